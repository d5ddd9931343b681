#include "sdn/network.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sdn {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kGlideSeconds = 0.05;
} // namespace

const char* matrix_kind_name(MatrixKind kind) {
    switch (kind) {
        case MatrixKind::Isotropic: return "isotropic";
        case MatrixKind::Householder: return "householder";
        case MatrixKind::Orthogonal: return "orthogonal";
        case MatrixKind::Permutation: return "permutation";
        case MatrixKind::Circulant: return "circulant";
    }
    return "?";
}

std::optional<MatrixKind> parse_matrix_kind(const std::string& name) {
    if (name == "isotropic") return MatrixKind::Isotropic;
    if (name == "householder") return MatrixKind::Householder;
    if (name == "orthogonal") return MatrixKind::Orthogonal;
    if (name == "permutation") return MatrixKind::Permutation;
    if (name == "circulant") return MatrixKind::Circulant;
    return std::nullopt;
}

LosslessMatrix make_scattering_matrix(MatrixKind kind, int size, std::uint64_t seed,
                                      const std::optional<Eigen::VectorXd>& admittance) {
    switch (kind) {
        case MatrixKind::Isotropic:
            return isotropic_matrix(size);
        case MatrixKind::Householder:
            return admittance ? normalized_householder(*admittance)
                              : isotropic_matrix(size);
        case MatrixKind::Orthogonal:
            return random_lossless(RandomLosslessKind::OrthogonalGivens, size, seed);
        case MatrixKind::Permutation:
            return random_lossless(RandomLosslessKind::Permutation, size, seed);
        case MatrixKind::Circulant:
            return random_lossless(RandomLosslessKind::CirculantAllpass, size, seed);
    }
    throw std::invalid_argument("unknown matrix kind");
}

void SdnNetwork::allocate(int n, std::size_t capacity, double sample_rate) {
    n_ = n;
    k_ = n - 1;
    sample_rate_ = sample_rate;
    glide_ticks_ = kGlideSeconds * sample_rate;
    lines_.clear();
    lines_.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n * n; ++i)
        lines_.push_back(Line{RingBuffer(capacity), SlewedDelay{}, 0.0});
    src_delay_.assign(n, SlewedDelay{});
    src_gain_.assign(n, 0.0);
    mic_lines_.assign(n, RingBuffer(capacity));
    mic_delay_.assign(n, SlewedDelay{});
    mic_gain_.assign(n, 0.0);
    input_hist_ = RingBuffer(capacity);
    scratch_in_.resize(k_);
    scratch_out_.resize(k_);
    heads_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

void SdnNetwork::apply_scene_parameters(const SceneConfig& scene, bool initial) {
    const double fs = scene.sample_rate;
    const double c = scene.sound_speed;
    const auto points = first_order_reflection_points(scene);

    auto assign = [&](SlewedDelay& d, double value) {
        if (initial)
            d.set(value);
        else
            d.retarget(value, glide_ticks_);
    };

    node_pos_.resize(n_);
    for (int i = 0; i < n_; ++i) node_pos_[i] = points[i].position;

    for (int i = 0; i < n_; ++i) {
        const double d_src = distance(scene.source_pos, node_pos_[i]);
        const double d_mic = distance(node_pos_[i], scene.mic_pos);
        const long delay_src = delay_samples(d_src, fs, c);
        // Split so the total first-order delay is floor(Fs*(d1+d2)/c); the
        // node-to-mic line absorbs the flooring slack (at most one sample).
        const long delay_total = delay_samples(d_src + d_mic, fs, c);
        assign(src_delay_[i], static_cast<double>(delay_src));
        assign(mic_delay_[i], static_cast<double>(delay_total - delay_src));
        src_gain_[i] = directivity_gain(scene.source_dir, scene.source_axis,
                                        scene.source_pos, node_pos_[i]) /
                       d_src;
        mic_gain_[i] = directivity_gain(scene.mic_dir, scene.mic_axis,
                                        scene.mic_pos, node_pos_[i]) *
                       (d_src / (d_src + d_mic));
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            const long d = std::max(
                1L, delay_samples(distance(node_pos_[i], node_pos_[j]), fs, c));
            assign(line(i, j).length, static_cast<double>(d));
        }
    }

    const double d_sm = distance(scene.source_pos, scene.mic_pos);
    direct_enabled_ = scene.direct_path_enabled;
    if (d_sm > 0.0) {
        assign(direct_delay_, static_cast<double>(delay_samples(d_sm, fs, c)));
        direct_gain_ = directivity_gain(scene.source_dir, scene.source_axis,
                                        scene.source_pos, scene.mic_pos) *
                       directivity_gain(scene.mic_dir, scene.mic_axis, scene.mic_pos,
                                        scene.source_pos) /
                       d_sm;
    } else {
        // Coincident source and mic: no meaningful direct path.
        assign(direct_delay_, 0.0);
        direct_gain_ = 0.0;
        direct_enabled_ = false;
    }
}

SdnNetwork SdnNetwork::build(const SceneConfig& scene, const LosslessMatrix& scattering,
                             AirAbsorption air) {
    auto check = validate_scene(scene);
    if (!check.ok()) {
        std::ostringstream msg;
        msg << "invalid scene:";
        for (const auto& v : check.violations) msg << ' ' << v << ';';
        throw std::invalid_argument(msg.str());
    }
    if (scattering.m.rows() != kNumWalls - 1 || scattering.m.cols() != kNumWalls - 1)
        throw std::invalid_argument("scattering matrix must be (N-1)x(N-1) for N walls");

    SdnNetwork net;
    const Vec3 dims = scene.room_dims;
    const double diag = dims.norm();
    const std::size_t capacity =
        static_cast<std::size_t>(std::ceil(scene.sample_rate * diag / scene.sound_speed)) + 16;
    net.allocate(kNumWalls, capacity, scene.sample_rate);
    net.scene_ = scene;
    net.from_scene_ = true;
    net.air_ = air;

    net.a_ = scattering.m;
    net.a_inv_ = net.a_.partialPivLu().inverse();

    const bool weighted = (scattering.y.size() == net.k_) &&
                          ((scattering.y.array() - 1.0).abs().maxCoeff() > 1e-14);
    if (weighted) {
        // Physical admittance case: extraction weights from the junction
        // pressure, p_e = (2 / <1,y>) y^T p^-.
        net.w_ = (2.0 / scattering.y.sum()) * scattering.y;
    } else {
        const double s = Eigen::VectorXd::Ones(net.k_).dot(net.a_ * Eigen::VectorXd::Ones(net.k_));
        if (std::abs(s) < 1e-9)
            throw std::invalid_argument(
                "1^T A 1 = 0: constant extraction weights are undefined for this "
                "scattering matrix; supply admittance weights instead");
        net.w_ = Eigen::VectorXd::Constant(net.k_, 2.0 / s);
    }
    const double gain_check =
        net.w_.dot(net.a_ * Eigen::VectorXd::Ones(net.k_)); // must be 2 (first-order exactness)
    if (std::abs(gain_check - 2.0) > 1e-12)
        throw std::runtime_error("extraction weights violate w^T A 1 = 2");

    net.beta_.assign(net.n_, 0.0);
    if (scene.wall_filter) {
        net.wall_filter_ = scene.wall_filter;
        net.port_filters_.assign(static_cast<std::size_t>(net.n_) * net.k_,
                                 IirState(*scene.wall_filter));
    } else {
        for (int i = 0; i < net.n_; ++i) net.beta_[i] = scene.wall_beta(i);
    }

    net.apply_scene_parameters(scene, true);
    return net;
}

SdnNetwork SdnNetwork::build(const SceneConfig& scene, MatrixKind kind, std::uint64_t seed,
                             AirAbsorption air) {
    return build(scene, make_scattering_matrix(kind, kNumWalls - 1, seed), air);
}

SdnNetwork SdnNetwork::from_parts(const Eigen::MatrixXd& scattering,
                                  const Eigen::MatrixXi& internode_delays, double beta,
                                  double sample_rate) {
    const int n = static_cast<int>(internode_delays.rows());
    if (internode_delays.cols() != n || n < 2)
        throw std::invalid_argument("from_parts: delay matrix must be square, n >= 2");
    if (scattering.rows() != n - 1 || scattering.cols() != n - 1)
        throw std::invalid_argument("from_parts: scattering matrix must be (n-1)x(n-1)");

    long max_delay = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                if (internode_delays(i, j) < 1)
                    throw std::invalid_argument("from_parts: internode delays must be >= 1");
                max_delay = std::max(max_delay, static_cast<long>(internode_delays(i, j)));
            }

    SdnNetwork net;
    net.allocate(n, static_cast<std::size_t>(max_delay) + 8, sample_rate);
    net.a_ = scattering;
    net.a_inv_ = net.a_.partialPivLu().inverse();
    const double s = Eigen::VectorXd::Ones(net.k_).dot(net.a_ * Eigen::VectorXd::Ones(net.k_));
    net.w_ = std::abs(s) > 1e-9 ? Eigen::VectorXd::Constant(net.k_, 2.0 / s)
                                : Eigen::VectorXd::Constant(net.k_, 1.0);
    net.beta_.assign(n, beta);
    net.node_pos_.assign(n, Vec3{});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) net.line(i, j).length.set(internode_delays(i, j));
    for (int i = 0; i < n; ++i) {
        net.src_delay_[i].set(0.0);
        net.mic_delay_[i].set(0.0);
        net.src_gain_[i] = i == 0 ? 1.0 : 0.0;
        net.mic_gain_[i] = i == 0 ? 1.0 : 0.0;
    }
    net.direct_enabled_ = false;
    return net;
}

double SdnNetwork::tick(double input) {
    input_hist_.push(input);

    // Read every internode head before any write this tick.
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            const Line& l = line(i, j);
            heads_[static_cast<std::size_t>(i) * n_ + j] = l.buf.at_frac(l.length.current - 1.0);
        }

    double output = 0.0;
    for (int j = 0; j < n_; ++j) {
        // Soft-source injection: the delayed, gained source sample is spread
        // uniformly over the incoming wave variables.
        const double src = src_gain_[j] * input_hist_.at_frac(src_delay_[j].current);
        for (int p = 0; p < k_; ++p) {
            const int i = p < j ? p : p + 1;
            scratch_in_[p] = heads_[static_cast<std::size_t>(i) * n_ + j] + 0.5 * src;
        }
        scratch_out_.noalias() = a_ * scratch_in_;

        double pe = 0.0;
        if (wall_filter_) {
            for (int p = 0; p < k_; ++p) {
                scratch_out_[p] = port_filters_[static_cast<std::size_t>(j) * k_ + p].process(
                    scratch_out_[p]);
                pe += w_[p] * scratch_out_[p];
            }
        } else {
            scratch_out_ *= beta_[j];
            pe = w_.dot(scratch_out_);
        }

        for (int p = 0; p < k_; ++p) {
            const int m = p < j ? p : p + 1;
            Line& l = line(j, m);
            double v = scratch_out_[p];
            if (air_.enabled) {
                l.lp_state = (1.0 - air_.coeff) * v + air_.coeff * l.lp_state;
                v = l.lp_state;
            }
            l.buf.push(v);
        }

        mic_lines_[j].push(pe);
        output += mic_gain_[j] * mic_lines_[j].at_frac(mic_delay_[j].current);
    }

    if (direct_enabled_)
        output += direct_gain_ * input_hist_.at_frac(direct_delay_.current);

    for (int i = 0; i < n_; ++i) {
        src_delay_[i].advance();
        mic_delay_[i].advance();
        for (int j = 0; j < n_; ++j)
            if (i != j) line(i, j).length.advance();
    }
    direct_delay_.advance();

    ++tick_count_;
    if (!std::isfinite(output)) {
        std::ostringstream msg;
        msg << "non-finite output at sample " << (tick_count_ - 1)
            << " (unstable wall filter or corrupted state?)";
        throw std::runtime_error(msg.str());
    }
    return output;
}

void SdnNetwork::reset() {
    for (auto& l : lines_) {
        l.buf.clear();
        l.lp_state = 0.0;
        l.length.set(l.length.target);
    }
    for (auto& m : mic_lines_) m.clear();
    for (auto& d : src_delay_) d.set(d.target);
    for (auto& d : mic_delay_) d.set(d.target);
    direct_delay_.set(direct_delay_.target);
    input_hist_.clear();
    for (auto& f : port_filters_) f.reset();
    tick_count_ = 0;
}

ImpulseResponse SdnNetwork::render_rir(double duration_s) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("render_rir: duration must be positive");
    reset();
    const auto n = static_cast<std::size_t>(std::ceil(duration_s * sample_rate_));
    ImpulseResponse rir;
    rir.sample_rate = sample_rate_;
    rir.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) rir.samples[i] = tick(i == 0 ? 1.0 : 0.0);
    return rir;
}

std::vector<double> SdnNetwork::process(std::span<const double> input) {
    reset();
    std::vector<double> out(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) out[i] = tick(input[i]);
    return out;
}

void SdnNetwork::update_scene(const Vec3& source_pos, const Vec3& mic_pos) {
    if (!from_scene_)
        throw std::logic_error("update_scene: network was not built from a scene");
    SceneConfig next = scene_;
    next.source_pos = source_pos;
    next.mic_pos = mic_pos;
    auto check = validate_scene(next);
    if (!check.ok())
        throw std::invalid_argument("update_scene: " + check.violations.front());
    scene_ = next;
    apply_scene_parameters(scene_, false);
}

double SdnNetwork::internode_state_energy() const {
    double e = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            const Line& l = line(i, j);
            const long len = lround(l.length.current);
            for (long k = 0; k < len; ++k) {
                const double v = l.buf.at(static_cast<std::size_t>(k));
                e += v * v;
            }
        }
    return e;
}

long SdnNetwork::total_internode_delay() const {
    long total = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (i != j) total += internode_delay(i, j);
    return total;
}

std::complex<double> SdnNetwork::frequency_response_at(double freq_hz) const {
    const double w = 2.0 * kPi * freq_hz / sample_rate_;
    const auto zexp = [&](double delay) {
        return std::exp(std::complex<double>(0.0, -w * delay));
    };

    // Loop resolvent in the unfactored form (I - H A_blk P D_f)^{-1} H A_blk,
    // which stays well defined when a wall gain vanishes.
    const int dim = n_ * k_;
    Eigen::MatrixXcd ha = Eigen::MatrixXcd::Zero(dim, dim); // block diag H_i(z) A
    for (int i = 0; i < n_; ++i) {
        const std::complex<double> h =
            wall_filter_ ? wall_filter_->response(w) : std::complex<double>(beta_[i], 0.0);
        ha.block(i * k_, i * k_, k_, k_) = a_.cast<std::complex<double>>() * h;
    }

    const std::complex<double> air_h =
        air_.enabled
            ? (1.0 - air_.coeff) / (1.0 - air_.coeff * zexp(1.0))
            : std::complex<double>(1.0, 0.0);
    Eigen::MatrixXcd pdf = Eigen::MatrixXcd::Zero(dim, dim); // P D_f(z)
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            const int p = port_of(i, j); // outgoing slot at i toward j
            const int q = port_of(j, i); // incoming slot at j from i
            pdf(j * k_ + q, i * k_ + p) = zexp(static_cast<double>(internode_delay(i, j))) * air_h;
        }
    }

    Eigen::VectorXcd k_src(dim), k_mic(dim);
    for (int i = 0; i < n_; ++i) {
        const std::complex<double> zs = src_gain_[i] * zexp(static_cast<double>(source_delay(i)));
        const std::complex<double> zm = mic_gain_[i] * zexp(static_cast<double>(mic_delay(i)));
        for (int p = 0; p < k_; ++p) {
            k_src[i * k_ + p] = zs;
            k_mic[i * k_ + p] = zm * w_[p];
        }
    }

    const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim) - ha * pdf;
    const Eigen::VectorXcd rhs = ha * k_src;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    Eigen::VectorXcd u = lu.solve(rhs);
    if ((m * u - rhs).norm() > 1e-6 * (rhs.norm() + 1e-300))
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};

    std::complex<double> h = 0.5 * k_mic.cwiseProduct(u).sum(); // plain sum, no conjugation
    if (direct_enabled_)
        h += direct_gain_ * zexp(static_cast<double>(direct_delay()));
    return h;
}

std::vector<std::complex<double>> SdnNetwork::frequency_response(
    std::span<const double> freqs_hz) const {
    std::vector<std::complex<double>> out;
    out.reserve(freqs_hz.size());
    for (double f : freqs_hz) out.push_back(frequency_response_at(f));
    return out;
}

void SdnNetwork::dump(std::ostream& out) const {
    out << "sdn network: " << n_ << " nodes, Fs = " << sample_rate_ << " Hz\n";
    for (int i = 0; i < n_; ++i) {
        out << "  node " << i;
        if (from_scene_) out << " (wall " << wall_name(i) << ")";
        out << " pos (" << node_pos_[i].x << ", " << node_pos_[i].y << ", " << node_pos_[i].z
            << ")";
        if (!wall_filter_) out << " beta " << beta_[i];
        out << " src: D=" << source_delay(i) << " g=" << src_gain_[i]
            << " mic: D=" << mic_delay(i) << " g=" << mic_gain_[i] << '\n';
    }
    out << "  internode delays (samples):\n";
    for (int i = 0; i < n_; ++i) {
        out << "   ";
        for (int j = 0; j < n_; ++j) out << ' ' << (i == j ? 0 : internode_delay(i, j));
        out << '\n';
    }
    if (direct_enabled_)
        out << "  direct: D=" << direct_delay() << " g=" << direct_gain_ << '\n';
    else
        out << "  direct: disabled\n";
    if (wall_filter_) out << "  wall filter: order " << wall_filter_->a.size() - 1 << '\n';
    out << "  extraction w:";
    for (int p = 0; p < k_; ++p) out << ' ' << w_[p];
    out << '\n';
}

ImpulseResponse render_rir(const SceneConfig& scene, double duration_s, MatrixKind kind,
                           std::uint64_t seed) {
    auto net = SdnNetwork::build(scene, kind, seed);
    return net.render_rir(duration_s);
}

std::vector<double> process_signal(const SceneConfig& scene, std::span<const double> input,
                                   MatrixKind kind, std::uint64_t seed) {
    auto net = SdnNetwork::build(scene, kind, seed);
    return net.process(input);
}

std::vector<std::complex<double>> backbone_poles(const SdnNetwork& net) {
    if (net.has_wall_filter())
        throw std::invalid_argument("backbone_poles: scalar wall gains only");
    const int n = net.num_nodes();
    const int k = net.ports_per_node();

    // Slot layout: directed lines in (i, j) row-major order, newest first.
    std::vector<long> base(static_cast<std::size_t>(n) * n, -1);
    long dim = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                base[static_cast<std::size_t>(i) * n + j] = dim;
                dim += net.internode_delay(i, j);
            }
    if (dim > 4000)
        throw std::invalid_argument(
            "backbone_poles: state too large; use a toy network or a lower sample rate");

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
    const Eigen::MatrixXd& a = net.scattering();
    auto head_of = [&](int i, int j) {
        return base[static_cast<std::size_t>(i) * n + j] + net.internode_delay(i, j) - 1;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const long b = base[static_cast<std::size_t>(i) * n + j];
            const long d = net.internode_delay(i, j);
            for (long s = 1; s < d; ++s) t(b + s, b + s - 1) = 1.0;
            // Newest slot of line i->j comes from node i's scattering output.
            const int row_port = j < i ? j : j - 1;
            for (int p = 0; p < k; ++p) {
                const int mwall = p < i ? p : p + 1;
                t(b, head_of(mwall, i)) += net.wall_gain(i) * a(row_port, p);
            }
        }
    }
    Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(t, false).eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double backbone_pole_residual(const SdnNetwork& net, std::complex<double> z) {
    if (net.has_wall_filter())
        throw std::invalid_argument("backbone_pole_residual: scalar wall gains only");
    const int n = net.num_nodes();
    const int k = net.ports_per_node();
    const int dim = n * k;
    const Eigen::MatrixXd& a = net.scattering();

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int p = j < i ? j : j - 1;
            m(i * k + p, i * k + p) =
                std::pow(z, static_cast<double>(net.internode_delay(i, j)));
        }
    // minus beta * A_blk * P
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int s = i < j ? i : i - 1; // incoming slot (j, s) from i
            for (int p = 0; p < k; ++p)
                m(i * k + p, j * k + s) -= net.wall_gain(i) * a(p, j < i ? j : j - 1);
        }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1) / sv(0);
}

} // namespace sdn
