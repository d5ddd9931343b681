// The runnable scattering-delay-network reverberator: construction from a
// scene, sample-by-sample engine, impulse-response rendering, streaming
// processing, interactive position updates, and the closed-form
// frequency-domain transfer function used as an independent oracle.
#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdn/delay_line.hpp"
#include "sdn/geometry.hpp"
#include "sdn/impulse_response.hpp"
#include "sdn/iir.hpp"
#include "sdn/scattering.hpp"

namespace sdn {

enum class MatrixKind { Isotropic, Householder, Orthogonal, Permutation, Circulant };

const char* matrix_kind_name(MatrixKind kind);
std::optional<MatrixKind> parse_matrix_kind(const std::string& name);

// Scattering matrix for a given kind at the network's port count.
LosslessMatrix make_scattering_matrix(MatrixKind kind, int size, std::uint64_t seed,
                                      const std::optional<Eigen::VectorXd>& admittance = {});

struct AirAbsorption {
    bool enabled = false;
    double coeff = 0.0; // one-pole lowpass y[n] = (1-coeff) x[n] + coeff y[n-1], per internode line
};

class SdnNetwork {
public:
    // One node per wall at the first-order reflection points. Internode line
    // lengths are floored propagation delays clamped to >= 1 sample; the
    // node-to-mic delay takes up the flooring slack so that every first-order
    // arrival lands at floor(Fs * total_path / c) exactly.
    static SdnNetwork build(const SceneConfig& scene, const LosslessMatrix& scattering,
                            AirAbsorption air = {});
    static SdnNetwork build(const SceneConfig& scene, MatrixKind kind, std::uint64_t seed,
                            AirAbsorption air = {});

    // Bare backbone with explicit delays; used by tests and pole analysis.
    // Source/mic connect to node 0 with zero delay and unit gain.
    static SdnNetwork from_parts(const Eigen::MatrixXd& scattering,
                                 const Eigen::MatrixXi& internode_delays, double beta,
                                 double sample_rate);

    double tick(double input);
    void reset(); // clear all state, snap pending delay transitions

    ImpulseResponse render_rir(double duration_s);
    std::vector<double> process(std::span<const double> input);

    // Recompute node positions, delays and gains for new endpoints; delay
    // changes glide over ~50 ms of interpolated fractional reads.
    void update_scene(const Vec3& source_pos, const Vec3& mic_pos);

    // Closed-form transfer function evaluated per frequency by a direct
    // linear solve. Entries where the system is singular come back NaN.
    std::vector<std::complex<double>> frequency_response(std::span<const double> freqs_hz) const;
    std::complex<double> frequency_response_at(double freq_hz) const;

    int num_nodes() const { return n_; }
    int ports_per_node() const { return k_; }
    double sample_rate() const { return sample_rate_; }
    bool direct_path_enabled() const { return direct_enabled_; }
    long internode_delay(int i, int j) const { return lround(line(i, j).length.target); }
    long source_delay(int node) const { return lround(src_delay_[node].target); }
    long mic_delay(int node) const { return lround(mic_delay_[node].target); }
    long direct_delay() const { return lround(direct_delay_.target); }
    double source_gain(int node) const { return src_gain_[node]; }
    double mic_gain(int node) const { return mic_gain_[node]; }
    double direct_gain() const { return direct_gain_; }
    double wall_gain(int node) const { return beta_[node]; }
    bool has_wall_filter() const { return wall_filter_.has_value(); }
    const Eigen::MatrixXd& scattering() const { return a_; }
    const Eigen::VectorXd& extraction_weights() const { return w_; }
    const Vec3& node_position(int node) const { return node_pos_[node]; }
    long total_internode_delay() const;
    const SceneConfig& scene() const { return scene_; }

    // Sum of squares over the in-flight slots of every internode line.
    // Conserved tick-to-tick for orthogonal scattering with beta = 1 once
    // the source history has drained.
    double internode_state_energy() const;

    void dump(std::ostream& out) const;

private:
    SdnNetwork() = default;

    struct Line {
        RingBuffer buf{8};
        SlewedDelay length;
        double lp_state = 0.0; // optional air-absorption one-pole
    };

    Line& line(int i, int j) { return lines_[static_cast<std::size_t>(i) * n_ + j]; }
    const Line& line(int i, int j) const { return lines_[static_cast<std::size_t>(i) * n_ + j]; }
    static int port_of(int node, int other) { return other < node ? other : other - 1; }
    static long lround(double v) { return static_cast<long>(v + 0.5); }

    void apply_scene_parameters(const SceneConfig& scene, bool initial);
    void allocate(int n, std::size_t capacity, double sample_rate);

    // --- topology/parameters ---
    int n_ = 0; // nodes
    int k_ = 0; // ports per node = n - 1
    double sample_rate_ = 0.0;
    SceneConfig scene_;
    bool from_scene_ = false;
    Eigen::MatrixXd a_;
    Eigen::MatrixXd a_inv_;
    Eigen::VectorXd w_;
    std::vector<double> beta_;
    std::optional<IirCoeffs> wall_filter_;
    AirAbsorption air_;
    std::vector<Vec3> node_pos_;
    double glide_ticks_ = 0.0;

    // --- lines and taps ---
    std::vector<Line> lines_; // n*n, diagonal unused
    std::vector<SlewedDelay> src_delay_;
    std::vector<double> src_gain_;
    std::vector<RingBuffer> mic_lines_;
    std::vector<SlewedDelay> mic_delay_;
    std::vector<double> mic_gain_;
    RingBuffer input_hist_{8};
    SlewedDelay direct_delay_;
    double direct_gain_ = 0.0;
    bool direct_enabled_ = true;

    std::vector<IirState> port_filters_; // n*k when wall_filter_ is set

    // --- scratch ---
    Eigen::VectorXd scratch_in_, scratch_out_;
    std::vector<double> heads_;
    std::uint64_t tick_count_ = 0;
};

ImpulseResponse render_rir(const SceneConfig& scene, double duration_s, MatrixKind kind,
                           std::uint64_t seed);
std::vector<double> process_signal(const SceneConfig& scene, std::span<const double> input,
                                   MatrixKind kind, std::uint64_t seed);

// Poles of the recursive backbone as eigenvalues of the one-sample state
// transition matrix (state dimension = total internode delay, so keep the
// network tiny or the sample rate low). Scalar wall gains only.
std::vector<std::complex<double>> backbone_poles(const SdnNetwork& net);

// sigma_min/sigma_max of D_f(1/z) - beta*A_blk*P at a candidate pole; near
// zero iff z solves the characteristic determinant.
double backbone_pole_residual(const SdnNetwork& net, std::complex<double> z);

} // namespace sdn
