// Acoustic measurements and predictors: Schroeder decay and T60,
// Sabine/Eyring estimates, ISO source-mic distance, normalized echo
// density, octave-band T60, mode density, and the FLOPS/memory cost
// estimators.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdn/geometry.hpp"
#include "sdn/impulse_response.hpp"
#include "sdn/network.hpp"

namespace sdn {

// Backward-integrated energy decay curve in dB, one value per sample:
// EDC(t) = 10 log10( sum_{n>=t} h^2[n] / sum h^2[n] ). Clamped at floor_db.
std::vector<double> schroeder_edc_db(const ImpulseResponse& rir, double floor_db = -400.0);

struct T60Fit {
    double t60_s = 0.0;
    double slope_db_per_s = 0.0;
    double fit_begin_s = 0.0; // first crossing of the upper fit level
    double fit_end_s = 0.0;   // first crossing of the lower fit level
    double rms_residual_db = 0.0;
};

// Least-squares line through the EDC between its first crossings of
// fit_hi_db and fit_lo_db (T30-style extrapolation); T60 = -60 / slope.
// Throws std::runtime_error("insufficient decay") if fit_lo is never reached.
T60Fit t60_from_edc(const std::vector<double>& edc_db, double sample_rate,
                    double fit_hi_db = -5.0, double fit_lo_db = -35.0);

T60Fit measure_t60(const ImpulseResponse& rir, double fit_hi_db = -5.0,
                   double fit_lo_db = -35.0);

// T60 = 0.161 V / sum_i A_i alpha_i
double sabine_t60(const Vec3& room_dims, const std::array<double, kNumWalls>& alpha);

// T60 = -0.161 V / (sum_i A_i * ln(1 - mean alpha)), natural logarithm.
double eyring_t60(const Vec3& room_dims, const std::array<double, kNumWalls>& alpha);

// d_min = 2 sqrt(V / (c T_est))
double iso_min_distance(double volume_m3, double t60_estimate_s, double sound_speed);

struct NedCurve {
    std::vector<double> times_s; // window centers
    std::vector<double> ned;     // >= 0; about 1 for Gaussian noise
    double window_s = 0.0;
    double hop_s = 0.0;
};

// Fraction of samples beyond one window-local standard deviation from the
// window-local mean, normalized by the Gaussian expectation erfc(1/sqrt 2).
NedCurve ned_profile(const ImpulseResponse& rir, double window_s = 0.020,
                     double hop_s = 0.005);

// First time the curve reaches `level` (linear interpolation between hops);
// empty when it never does.
std::optional<double> ned_crossing_time(const NedCurve& curve, double level);

// Octave-band reverberation times through the 4th-order band-edge filter
// bank. Bands whose decay is insufficient (or that exceed Nyquist) come
// back without a fit.
struct BandT60 {
    double center_hz = 0.0;
    std::optional<T60Fit> fit;
    std::string error;
};
std::vector<BandT60> octave_band_t60(const ImpulseResponse& rir,
                                     const std::vector<double>& centers_hz);

constexpr std::array<double, 7> kDefaultOctaveCenters{125.0, 250.0, 500.0, 1000.0,
                                                      2000.0, 4000.0, 8000.0};

// Mode density of the network backbone in modes/Hz: the total internode
// delay divided by the sample rate (= polynomial order of the
// characteristic determinant over Fs).
double mode_density(const SdnNetwork& net);

// Schroeder's minimum usable mode density, T60 / 6.7 modes per Hz.
double mode_density_threshold(double t60_s);

// Closed form for a cube with centered endpoints: (6 + 12 sqrt 2) L / c.
double cubic_mode_density(double edge_m, double sound_speed);

struct ModeDensityTrial {
    Vec3 dims;
    double alpha = 0.0;
    double density = 0.0;
    double threshold = 0.0;
    bool sufficient = false;
};

struct ModeDensityMonteCarlo {
    std::vector<ModeDensityTrial> trials;
    double pass_rate = 0.0;
    double max_failing_alpha = 0.0;
};

// Random boxes with dims U[2,10] m, common absorption U[0,1], random
// interior endpoints; threshold from the Sabine estimate.
ModeDensityMonteCarlo mode_density_monte_carlo(int num_trials, std::uint64_t seed,
                                               double sample_rate = 44100.0,
                                               double sound_speed = 343.0);

// --- cost estimators (exact integer formulas) ---

// Fs [2K^3 + (P+2)K^2 + K + 1], P = operations per wall-filter sample.
long long flops_sdn(int ports, int filter_ops, double sample_rate);

// Fs [2Q^2 + (P+3)Q + 1] for a Q x Q feedback-matrix reverberator.
long long flops_fdn(int order, int filter_ops, double sample_rate);

// 25 ceil( (4/3) pi (T60 c)^3 / (Lx Ly Lz) ), total operations per computed
// response.
long long flops_ism(const Vec3& room_dims, double t60_s, double sound_speed);

// Overlap-add convolution cost per second at frame rate Fr; the dynamic
// variant includes the per-frame transform of a fresh response.
long long flops_overlap_add(double frame_rate_hz, double t60_s, double sample_rate,
                            bool dynamic);
long long overlap_add_fft_size(double frame_rate_hz, double t60_s, double sample_rate);

// Upper bound in bits: (N(N-1) + 2N + 1) (q Fs / c) R.
double memory_bound_bits(int num_nodes, double bits_per_sample, double sample_rate,
                         double sound_speed, double bounding_diameter_m);

} // namespace sdn
