#include "sdn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sdn/iir.hpp"
#include "sdn/rng.hpp"

namespace sdn {

namespace {
constexpr double kPi = 3.14159265358979323846;
// erfc(1/sqrt 2): expected outlier fraction for Gaussian noise.
constexpr double kGaussianOutlierFraction = 0.31731050786291415;
} // namespace

std::vector<double> schroeder_edc_db(const ImpulseResponse& rir, double floor_db) {
    if (rir.samples.empty()) throw std::invalid_argument("schroeder_edc_db: empty response");
    const double total = rir.energy();
    if (total <= 0.0) throw std::invalid_argument("schroeder_edc_db: all-zero response");

    std::vector<double> edc(rir.samples.size());
    double tail = 0.0;
    for (std::size_t i = rir.samples.size(); i-- > 0;) {
        tail += rir.samples[i] * rir.samples[i];
        edc[i] = tail;
    }
    for (double& v : edc) {
        const double ratio = v / total;
        v = ratio > 0.0 ? std::max(floor_db, 10.0 * std::log10(ratio)) : floor_db;
    }
    return edc;
}

T60Fit t60_from_edc(const std::vector<double>& edc_db, double sample_rate, double fit_hi_db,
                    double fit_lo_db) {
    if (edc_db.empty() || sample_rate <= 0.0)
        throw std::invalid_argument("t60_from_edc: bad input");
    if (fit_hi_db <= fit_lo_db)
        throw std::invalid_argument("t60_from_edc: fit_hi must be above fit_lo");

    std::size_t begin = edc_db.size(), end = edc_db.size();
    for (std::size_t i = 0; i < edc_db.size(); ++i) {
        if (begin == edc_db.size() && edc_db[i] <= fit_hi_db) begin = i;
        if (edc_db[i] <= fit_lo_db) {
            end = i;
            break;
        }
    }
    if (end == edc_db.size()) throw std::runtime_error("insufficient decay");
    if (begin >= end) begin = end > 0 ? end - 1 : 0;

    // Least-squares line over [begin, end].
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto count = static_cast<double>(end - begin + 1);
    for (std::size_t i = begin; i <= end; ++i) {
        const double x = static_cast<double>(i) / sample_rate;
        sx += x;
        sy += edc_db[i];
        sxx += x * x;
        sxy += x * edc_db[i];
    }
    const double denom = count * sxx - sx * sx;
    if (denom <= 0.0) throw std::runtime_error("insufficient decay");
    const double slope = (count * sxy - sx * sy) / denom;
    if (!(slope < 0.0)) throw std::runtime_error("insufficient decay");
    const double intercept = (sy - slope * sx) / count;

    T60Fit fit;
    fit.slope_db_per_s = slope;
    fit.t60_s = -60.0 / slope;
    fit.fit_begin_s = static_cast<double>(begin) / sample_rate;
    fit.fit_end_s = static_cast<double>(end) / sample_rate;
    double ss = 0.0;
    for (std::size_t i = begin; i <= end; ++i) {
        const double x = static_cast<double>(i) / sample_rate;
        const double r = edc_db[i] - (slope * x + intercept);
        ss += r * r;
    }
    fit.rms_residual_db = std::sqrt(ss / count);
    return fit;
}

T60Fit measure_t60(const ImpulseResponse& rir, double fit_hi_db, double fit_lo_db) {
    return t60_from_edc(schroeder_edc_db(rir), rir.sample_rate, fit_hi_db, fit_lo_db);
}

namespace {

double absorbing_area(const Vec3& dims, const std::array<double, kNumWalls>& alpha) {
    SceneConfig probe;
    probe.room_dims = dims;
    double acc = 0.0;
    for (int w = 0; w < kNumWalls; ++w) acc += probe.wall_area(w) * alpha[w];
    return acc;
}

} // namespace

double sabine_t60(const Vec3& room_dims, const std::array<double, kNumWalls>& alpha) {
    const double a = absorbing_area(room_dims, alpha);
    if (!(a > 0.0)) throw std::invalid_argument("sabine_t60: no absorption (rigid room)");
    return 0.161 * room_dims.x * room_dims.y * room_dims.z / a;
}

double eyring_t60(const Vec3& room_dims, const std::array<double, kNumWalls>& alpha) {
    SceneConfig probe;
    probe.room_dims = room_dims;
    const double total_area = probe.total_wall_area();
    const double mean_alpha = absorbing_area(room_dims, alpha) / total_area;
    if (!(mean_alpha > 0.0) || mean_alpha >= 1.0)
        throw std::invalid_argument("eyring_t60: mean absorption must be in (0,1)");
    return -0.161 * room_dims.x * room_dims.y * room_dims.z /
           (total_area * std::log(1.0 - mean_alpha));
}

double iso_min_distance(double volume_m3, double t60_estimate_s, double sound_speed) {
    if (!(volume_m3 > 0.0 && t60_estimate_s > 0.0 && sound_speed > 0.0))
        throw std::invalid_argument("iso_min_distance: inputs must be positive");
    return 2.0 * std::sqrt(volume_m3 / (sound_speed * t60_estimate_s));
}

NedCurve ned_profile(const ImpulseResponse& rir, double window_s, double hop_s) {
    const auto window = static_cast<std::size_t>(std::lround(window_s * rir.sample_rate));
    const auto hop = static_cast<std::size_t>(std::lround(hop_s * rir.sample_rate));
    if (window < 10) throw std::invalid_argument("ned_profile: window must span >= 10 samples");
    if (hop < 1 || rir.samples.size() < window)
        throw std::invalid_argument("ned_profile: response shorter than one window");

    NedCurve curve;
    curve.window_s = window_s;
    curve.hop_s = hop_s;
    for (std::size_t start = 0; start + window <= rir.samples.size(); start += hop) {
        double mean = 0.0;
        for (std::size_t i = start; i < start + window; ++i) mean += rir.samples[i];
        mean /= static_cast<double>(window);
        double var = 0.0;
        for (std::size_t i = start; i < start + window; ++i) {
            const double d = rir.samples[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(window);
        const double sigma = std::sqrt(var);

        double ned = 0.0;
        if (sigma > 0.0) {
            std::size_t outliers = 0;
            for (std::size_t i = start; i < start + window; ++i)
                if (std::abs(rir.samples[i] - mean) > sigma) ++outliers;
            ned = static_cast<double>(outliers) / static_cast<double>(window) /
                  kGaussianOutlierFraction;
        }
        curve.times_s.push_back((static_cast<double>(start) + window / 2.0) / rir.sample_rate);
        curve.ned.push_back(ned);
    }
    return curve;
}

std::optional<double> ned_crossing_time(const NedCurve& curve, double level) {
    for (std::size_t i = 0; i < curve.ned.size(); ++i) {
        if (curve.ned[i] >= level) {
            if (i == 0) return curve.times_s[0];
            const double t0 = curve.times_s[i - 1], t1 = curve.times_s[i];
            const double v0 = curve.ned[i - 1], v1 = curve.ned[i];
            return v1 > v0 ? t0 + (level - v0) / (v1 - v0) * (t1 - t0) : t1;
        }
    }
    return std::nullopt;
}

std::vector<BandT60> octave_band_t60(const ImpulseResponse& rir,
                                     const std::vector<double>& centers_hz) {
    std::vector<BandT60> out;
    out.reserve(centers_hz.size());
    for (double fc : centers_hz) {
        BandT60 band;
        band.center_hz = fc;
        if (fc <= 0.0 || fc * std::sqrt(2.0) >= rir.sample_rate / 2.0) {
            band.error = "band outside (0, Nyquist)";
            out.push_back(std::move(band));
            continue;
        }
        BiquadChain chain(octave_bandpass(fc, rir.sample_rate));
        ImpulseResponse filtered;
        filtered.sample_rate = rir.sample_rate;
        filtered.samples.resize(rir.samples.size());
        for (std::size_t i = 0; i < rir.samples.size(); ++i)
            filtered.samples[i] = chain.process(rir.samples[i]);
        try {
            band.fit = measure_t60(filtered);
        } catch (const std::exception& e) {
            band.error = e.what();
        }
        out.push_back(std::move(band));
    }
    return out;
}

double mode_density(const SdnNetwork& net) {
    return static_cast<double>(net.total_internode_delay()) / net.sample_rate();
}

double mode_density_threshold(double t60_s) { return t60_s / 6.7; }

double cubic_mode_density(double edge_m, double sound_speed) {
    return (6.0 + 12.0 * std::sqrt(2.0)) * edge_m / sound_speed;
}

ModeDensityMonteCarlo mode_density_monte_carlo(int num_trials, std::uint64_t seed,
                                               double sample_rate, double sound_speed) {
    ModeDensityMonteCarlo mc;
    mc.trials.reserve(num_trials);
    int passes = 0;
    for (int trial = 0; trial < num_trials; ++trial) {
        Rng rng(derive_seed(seed, trial));
        SceneConfig scene;
        scene.room_dims = {rng.uniform(2.0, 10.0), rng.uniform(2.0, 10.0),
                           rng.uniform(2.0, 10.0)};
        const double alpha = rng.uniform();
        scene.wall_alpha.fill(alpha);
        for (int d = 0; d < 3; ++d) {
            scene.source_pos[d] = rng.uniform(0.0, scene.room_dims[d]);
            scene.mic_pos[d] = rng.uniform(0.0, scene.room_dims[d]);
        }
        scene.sample_rate = sample_rate;
        scene.sound_speed = sound_speed;
        scene.direct_path_enabled = false;

        auto net = SdnNetwork::build(scene, MatrixKind::Isotropic, 0);
        ModeDensityTrial t;
        t.dims = scene.room_dims;
        t.alpha = alpha;
        t.density = mode_density(net);
        t.threshold = alpha > 0.0
                          ? mode_density_threshold(sabine_t60(scene.room_dims, scene.wall_alpha))
                          : std::numeric_limits<double>::infinity();
        t.sufficient = t.density > t.threshold;
        if (t.sufficient)
            ++passes;
        else
            mc.max_failing_alpha = std::max(mc.max_failing_alpha, alpha);
        mc.trials.push_back(t);
    }
    mc.pass_rate = num_trials > 0 ? static_cast<double>(passes) / num_trials : 0.0;
    return mc;
}

long long flops_sdn(int ports, int filter_ops, double sample_rate) {
    const long long k = ports, p = filter_ops;
    return static_cast<long long>(sample_rate) * (2 * k * k * k + (p + 2) * k * k + k + 1);
}

long long flops_fdn(int order, int filter_ops, double sample_rate) {
    const long long q = order, p = filter_ops;
    return static_cast<long long>(sample_rate) * (2 * q * q + (p + 3) * q + 1);
}

long long flops_ism(const Vec3& room_dims, double t60_s, double sound_speed) {
    const double radius = t60_s * sound_speed;
    const double count =
        std::ceil(4.0 / 3.0 * kPi * radius * radius * radius /
                  (room_dims.x * room_dims.y * room_dims.z));
    return 25LL * static_cast<long long>(count);
}

long long overlap_add_fft_size(double frame_rate_hz, double t60_s, double sample_rate) {
    const long long need = static_cast<long long>(std::ceil(sample_rate / frame_rate_hz)) +
                           static_cast<long long>(std::ceil(t60_s * sample_rate)) - 1;
    long long n = 1;
    while (n < need) n <<= 1;
    return n;
}

long long flops_overlap_add(double frame_rate_hz, double t60_s, double sample_rate,
                            bool dynamic) {
    const long long n = overlap_add_fft_size(frame_rate_hz, t60_s, sample_rate);
    long long log2n = 0;
    while ((1LL << log2n) < n) ++log2n;
    const long long ffts = dynamic ? 18 : 12;
    const long long per_frame =
        ffts * n * log2n + 6 * n + static_cast<long long>(std::ceil(t60_s * sample_rate)) - 1;
    return static_cast<long long>(frame_rate_hz) * per_frame;
}

double memory_bound_bits(int num_nodes, double bits_per_sample, double sample_rate,
                         double sound_speed, double bounding_diameter_m) {
    if (num_nodes < 0 || bits_per_sample < 0.0 || sample_rate <= 0.0 || sound_speed <= 0.0 ||
        bounding_diameter_m < 0.0)
        throw std::invalid_argument("memory_bound_bits: bad input");
    const double lines = static_cast<double>(num_nodes) * (num_nodes - 1) + 2.0 * num_nodes + 1.0;
    return lines * (bits_per_sample * sample_rate / sound_speed) * bounding_diameter_m;
}

} // namespace sdn
