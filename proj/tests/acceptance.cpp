// Acceptance suite: one self-contained check per criterion, each printing a
// single [PASS]/[FAIL] line (plus indented details). Run with no arguments
// for the full suite or with a criterion number for one check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdn/analysis.hpp"
#include "sdn/fft.hpp"
#include "sdn/ism.hpp"
#include "sdn/network.hpp"
#include "sdn/rng.hpp"
#include "sdn/scattering.hpp"

using namespace sdn;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        details.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
    }
    void note(const std::string& what) { details.push_back("       " + what); }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

double relative_error(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

// ---------------------------------------------------------------------------
// 1. First-order exactness: SDN vs ISM on random boxes.
// ---------------------------------------------------------------------------

// A scene is usable for the bin-by-bin comparison when the direct and six
// first-order arrivals occupy distinct bins and no second-order energy (from
// either method) can land at or before the last of them.
bool first_order_bins_are_clean(const SceneConfig& scene, const SdnNetwork& net) {
    std::vector<long> bins{net.direct_delay()};
    long max_first = net.direct_delay();
    for (int k = 0; k < kNumWalls; ++k) {
        bins.push_back(net.source_delay(k) + net.mic_delay(k));
        max_first = std::max(max_first, bins.back());
    }
    std::sort(bins.begin(), bins.end());
    if (std::adjacent_find(bins.begin(), bins.end()) != bins.end()) return false;

    long min_second = std::numeric_limits<long>::max();
    for (int k = 0; k < kNumWalls; ++k)
        for (int m = 0; m < kNumWalls; ++m)
            if (k != m)
                min_second = std::min(min_second, net.source_delay(k) +
                                                      net.internode_delay(k, m) +
                                                      net.mic_delay(m));
    if (min_second <= max_first + 1) return false;

    const double horizon = (static_cast<double>(max_first) + 2.0) / scene.sample_rate;
    for (const auto& img : enumerate_images(scene, horizon))
        if (img.order >= 2 && img.delay <= max_first) return false;
    return true;
}

Outcome criterion_1() {
    Outcome out;
    const std::uint64_t master = 20240901;
    int accepted = 0, attempts = 0;
    while (accepted < 20 && attempts < 400) {
        Rng rng(derive_seed(master, attempts++));
        SceneConfig scene;
        scene.room_dims = {rng.uniform(3.0, 8.0), rng.uniform(3.0, 8.0), rng.uniform(3.0, 8.0)};
        // Central configurations keep every first-order arrival ahead of all
        // second-order energy, so the seven bins can be compared one-to-one.
        for (int d = 0; d < 3; ++d) {
            scene.source_pos[d] = scene.room_dims[d] * rng.uniform(0.35, 0.65);
            scene.mic_pos[d] = scene.room_dims[d] * rng.uniform(0.3, 0.7);
        }
        if (distance(scene.source_pos, scene.mic_pos) < 0.5) continue;
        scene.wall_alpha.fill(rng.uniform(0.2, 0.8));
        scene.sample_rate = 44100.0;

        auto net = SdnNetwork::build(scene, MatrixKind::Isotropic, 0);
        if (!first_order_bins_are_clean(scene, net)) continue;
        ++accepted;

        long max_first = net.direct_delay();
        for (int k = 0; k < kNumWalls; ++k)
            max_first = std::max(max_first, net.source_delay(k) + net.mic_delay(k));
        const double duration = (static_cast<double>(max_first) + 2.0) / scene.sample_rate;

        auto sdn_rir = net.render_rir(duration);
        auto ism_rir = render_rir_ism(scene, duration);

        // Delays agree sample-exactly: the ISM order<=1 image bins must be
        // exactly the direct bin plus the six network first-order bins.
        std::vector<long> ism_bins, sdn_bins{net.direct_delay()};
        for (const auto& img : enumerate_images(scene, duration))
            if (img.order <= 1) ism_bins.push_back(img.delay);
        for (int k = 0; k < kNumWalls; ++k)
            sdn_bins.push_back(net.source_delay(k) + net.mic_delay(k));
        std::sort(ism_bins.begin(), ism_bins.end());
        std::sort(sdn_bins.begin(), sdn_bins.end());
        if (ism_bins != sdn_bins) {
            out.check(false, fmt("scene %d: first-order delay sets differ", accepted));
            continue;
        }

        double worst = 0.0;
        for (long bin : sdn_bins)
            worst = std::max(worst, std::abs(sdn_rir.samples[static_cast<std::size_t>(bin)] -
                                             ism_rir.samples[static_cast<std::size_t>(bin)]));
        if (worst > 1e-9)
            out.check(false, fmt("scene %d: amplitude mismatch %.3g", accepted, worst));
    }
    out.check(accepted == 20, fmt("compared 20 scenes (%d candidates drawn)", attempts));
    if (out.pass) out.note("delays sample-exact, amplitudes within 1e-9 on all 20 scenes");
    return out;
}

// ---------------------------------------------------------------------------
// 2. T60 against Sabine/Eyring and ISM; linear growth with cube edge.
// ---------------------------------------------------------------------------

SceneConfig centered_cube(double edge, double alpha, double fs = 44100.0) {
    SceneConfig scene;
    scene.room_dims = {edge, edge, edge};
    scene.source_pos = scene.mic_pos = {edge / 2.0, edge / 2.0, edge / 2.0};
    scene.wall_alpha.fill(alpha);
    scene.sample_rate = fs;
    scene.direct_path_enabled = false;
    return scene;
}

Outcome criterion_2() {
    Outcome out;
    std::array<double, kNumWalls> alpha;
    alpha.fill(0.5);

    const double sab = sabine_t60({5, 5, 5}, alpha);
    const double eyr = eyring_t60({5, 5, 5}, alpha);
    out.note(fmt("predictors at 5 m: Eyring %.4f s, Sabine %.4f s", eyr, sab));

    auto scene = centered_cube(5.0, 0.5);
    const double sdn_t60 = measure_t60(render_rir(scene, 1.0, MatrixKind::Isotropic, 1)).t60_s;
    const double ism_t60 = measure_t60(render_rir_ism(scene, 1.0)).t60_s;
    out.note(fmt("measured at 5 m: SDN %.4f s, ISM %.4f s", sdn_t60, ism_t60));

    out.check(sdn_t60 > 0.9 * eyr && sdn_t60 < 1.1 * sab,
              fmt("SDN T60 within [0.9 Eyring, 1.1 Sabine] = [%.4f, %.4f]", 0.9 * eyr, 1.1 * sab));
    out.check(relative_error(sdn_t60, ism_t60) < 0.10,
              fmt("SDN vs ISM within 10%% (off by %.1f%%)",
                  100.0 * relative_error(sdn_t60, ism_t60)));

    std::vector<double> edges, t60s;
    for (double edge = 2.0; edge <= 10.0 + 1e-9; edge += 1.0) {
        auto sweep = centered_cube(edge, 0.5);
        const double duration = std::max(0.5, 3.2 * sabine_t60(sweep.room_dims, alpha));
        t60s.push_back(measure_t60(render_rir(sweep, duration, MatrixKind::Isotropic, 1)).t60_s);
        edges.push_back(edge);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < t60s.size(); ++i) monotone &= t60s[i] > t60s[i - 1];
    out.check(monotone, "T60 increases monotonically with the cube edge");

    // R^2 of the least-squares line through (edge, T60).
    const auto n = static_cast<double>(edges.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        sx += edges[i];
        sy += t60s[i];
        sxx += edges[i] * edges[i];
        sxy += edges[i] * t60s[i];
        syy += t60s[i] * t60s[i];
    }
    const double r2 = (n * sxy - sx * sy) * (n * sxy - sx * sy) /
                      ((n * sxx - sx * sx) * (n * syy - sy * sy));
    out.check(r2 > 0.98, fmt("linear fit R^2 = %.4f over edges 2..10 m", r2));
    return out;
}

// ---------------------------------------------------------------------------
// 3. Absorption sweep with ISO-compliant random pairs.
// ---------------------------------------------------------------------------

Outcome criterion_3() {
    Outcome out;
    const double edge = 5.0;
    std::array<double, kNumWalls> wall_alpha;

    for (double alpha : {0.5, 0.7, 0.9}) {
        wall_alpha.fill(alpha);
        const double sab = sabine_t60({edge, edge, edge}, wall_alpha);
        const double eyr = eyring_t60({edge, edge, edge}, wall_alpha);
        const double d_min = iso_min_distance(edge * edge * edge, sab, 343.0);

        double sdn_mean = 0.0, ism_mean = 0.0;
        const double duration = std::max(0.5, 3.0 * sab);
        for (int pair = 0; pair < 10; ++pair) {
            Rng rng(derive_seed(555000 + static_cast<std::uint64_t>(alpha * 100), pair));
            SceneConfig scene;
            scene.room_dims = {edge, edge, edge};
            scene.wall_alpha = wall_alpha;
            scene.sample_rate = 44100.0;
            scene.direct_path_enabled = false;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                for (int d = 0; d < 3; ++d) {
                    scene.mic_pos[d] = rng.uniform(1.0, edge - 1.0); // >= 1 m off the walls
                    scene.source_pos[d] = rng.uniform(0.3, edge - 0.3);
                }
                if (distance(scene.source_pos, scene.mic_pos) >= d_min) break;
            }
            sdn_mean += measure_t60(render_rir(scene, duration, MatrixKind::Isotropic, 1)).t60_s;
            ism_mean += measure_t60(render_rir_ism(scene, duration)).t60_s;
        }
        sdn_mean /= 10.0;
        ism_mean /= 10.0;
        out.note(fmt("alpha %.1f: SDN %.4f s, ISM %.4f s (Sabine %.4f, Eyring %.4f)", alpha,
                     sdn_mean, ism_mean, sab, eyr));
        out.check(relative_error(sdn_mean, ism_mean) < 0.15,
                  fmt("alpha %.1f: SDN vs ISM within 15%% (off by %.1f%%)", alpha,
                      100.0 * relative_error(sdn_mean, ism_mean)));
        if (alpha == 0.9) {
            out.check(relative_error(sdn_mean, eyr) < relative_error(sdn_mean, sab),
                      "alpha 0.9: SDN closer to Eyring than to Sabine");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 4. Frequency-dependent absorption through the printed wall filter.
// ---------------------------------------------------------------------------

Outcome criterion_4() {
    Outcome out;
    IirCoeffs carpet;
    carpet.b = {0.6876, -1.9207, 1.7899, -0.5567};
    carpet.a = {1.0, -2.7618, 2.5368, -0.7749};
    out.check(iir_is_stable(carpet), "wall filter is stable");

    SceneConfig scene;
    const double edge = 5.0;
    scene.room_dims = {edge, edge, edge};
    // Endpoints on the main diagonal, 2.96 m apart, symmetric about center.
    const double offset = 2.96 / 2.0 / std::sqrt(3.0);
    scene.source_pos = {edge / 2 - offset, edge / 2 - offset, edge / 2 - offset};
    scene.mic_pos = {edge / 2 + offset, edge / 2 + offset, edge / 2 + offset};
    scene.wall_filter = carpet;
    scene.sample_rate = 44100.0;
    scene.direct_path_enabled = false;

    auto rir = render_rir(scene, 1.8, MatrixKind::Isotropic, 1);
    auto bands = octave_band_t60(rir, {125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0});
    for (const auto& band : bands) {
        if (!band.fit) {
            out.check(false, fmt("%.0f Hz: no fit (%s)", band.center_hz, band.error.c_str()));
            continue;
        }
        const double w = 2.0 * M_PI * band.center_hz / scene.sample_rate;
        const double alpha_band = 1.0 - std::norm(carpet.response(w));
        const double predicted = 0.161 * edge / (6.0 * alpha_band);
        const double err = relative_error(band.fit->t60_s, predicted);
        out.check(err < 0.15, fmt("%.0f Hz: measured %.3f s vs Sabine %.3f s (off by %.1f%%)",
                                  band.center_hz, band.fit->t60_s, predicted, 100.0 * err));
    }
    return out;
}

// ---------------------------------------------------------------------------
// 5. Normalized echo density against the ISM.
// ---------------------------------------------------------------------------

Outcome criterion_5() {
    Outcome out;
    const double duration = 0.4;
    const int pairs = 50;

    std::map<std::string, std::vector<double>> mean_curves;
    std::vector<double> times;

    for (int pair = 0; pair < pairs; ++pair) {
        Rng rng(derive_seed(777001, pair));
        SceneConfig scene;
        scene.room_dims = {3.2, 4.0, 2.7};
        for (int d = 0; d < 3; ++d) {
            scene.source_pos[d] = rng.uniform(0.3, scene.room_dims[d] - 0.3);
            scene.mic_pos[d] = rng.uniform(0.3, scene.room_dims[d] - 0.3);
        }
        scene.wall_alpha.fill(0.1);
        scene.negative_beta = true; // beta = -sqrt(0.9)
        scene.sample_rate = 44100.0;

        const std::uint64_t seed = derive_seed(42, pair);
        std::map<std::string, ImpulseResponse> rirs;
        rirs["ism"] = render_rir_ism(scene, duration);
        rirs["isotropic"] = render_rir(scene, duration, MatrixKind::Isotropic, seed);
        rirs["orthogonal"] = render_rir(scene, duration, MatrixKind::Orthogonal, seed);
        rirs["permutation"] = render_rir(scene, duration, MatrixKind::Permutation, seed);

        for (const auto& [name, rir] : rirs) {
            auto curve = ned_profile(rir);
            auto& acc = mean_curves[name];
            if (acc.empty()) acc.assign(curve.ned.size(), 0.0);
            for (std::size_t i = 0; i < curve.ned.size(); ++i)
                acc[i] += curve.ned[i] / pairs;
            if (times.empty()) times = curve.times_s;
        }
    }

    auto crossing = [&](const std::string& name, double level) -> std::optional<double> {
        NedCurve curve;
        curve.times_s = times;
        curve.ned = mean_curves[name];
        return ned_crossing_time(curve, level);
    };

    const auto ism_03 = crossing("ism", 0.3), iso_03 = crossing("isotropic", 0.3);
    const auto ism_75 = crossing("ism", 0.75), iso_75 = crossing("isotropic", 0.75);
    if (!ism_03 || !iso_03 || !ism_75 || !iso_75) {
        out.check(false, "ISM or isotropic-SDN mean curve never reaches a breakpoint");
        return out;
    }
    out.note(fmt("crossings (s): NED=0.3 ism %.4f iso %.4f | NED=0.75 ism %.4f iso %.4f",
                 *ism_03, *iso_03, *ism_75, *iso_75));
    out.check(relative_error(*iso_03, *ism_03) < 0.20,
              fmt("isotropic matches ISM at NED=0.3 within 20%% (off by %.1f%%)",
                  100.0 * relative_error(*iso_03, *ism_03)));
    out.check(relative_error(*iso_75, *ism_75) < 0.20,
              fmt("isotropic matches ISM at NED=0.75 within 20%% (off by %.1f%%)",
                  100.0 * relative_error(*iso_75, *ism_75)));

    const auto perm_75 = crossing("permutation", 0.75);
    out.check(!perm_75 || *perm_75 > 0.2,
              perm_75 ? fmt("permutation reaches 0.75 only at %.3f s", *perm_75)
                      : std::string("permutation never reaches NED=0.75"));

    const auto orth_75 = crossing("orthogonal", 0.75);
    out.check(orth_75.has_value(), "random orthogonal does reach NED=0.75");
    if (orth_75)
        out.check(*orth_75 > *iso_75,
                  fmt("orthogonal reaches 0.75 later than isotropic (%.4f vs %.4f s)", *orth_75,
                      *iso_75));
    return out;
}

// ---------------------------------------------------------------------------
// 6. Mode density: closed form and Monte Carlo pass rate.
// ---------------------------------------------------------------------------

Outcome criterion_6() {
    Outcome out;
    double worst = 0.0;
    for (double edge : {2.0, 3.5, 5.0, 8.0, 10.0})
        worst = std::max(worst, relative_error(cubic_mode_density(edge, 343.0),
                                               23.0 * edge / 343.0));
    out.check(worst < 0.02, fmt("closed form within 2%% of 23 L/c (worst %.3f%%)", 100.0 * worst));

    auto mc = mode_density_monte_carlo(1000, 424242);
    out.note(fmt("Monte Carlo pass rate %.1f%%, max failing alpha %.3f", 100.0 * mc.pass_rate,
                 mc.max_failing_alpha));
    out.check(std::abs(mc.pass_rate - 0.947) <= 0.03,
              fmt("pass rate %.1f%% within 94.7%% +- 3%%", 100.0 * mc.pass_rate));
    out.check(mc.max_failing_alpha < 0.09,
              fmt("every failing trial has alpha < 0.09 (max %.3f)", mc.max_failing_alpha));
    return out;
}

// ---------------------------------------------------------------------------
// 7. Cost formulas.
// ---------------------------------------------------------------------------

Outcome criterion_7() {
    Outcome out;
    out.check(flops_sdn(5, 1, 44100.0) == 14597100LL,
              fmt("SDN K=5 P=1: %lld FLOPS (14.6 MFLOPS)", flops_sdn(5, 1, 44100.0)));
    out.check(flops_fdn(12, 1, 44100.0) == 14861700LL,
              fmt("FDN Q=12 P=1: %lld FLOPS (14.9 MFLOPS)", flops_fdn(12, 1, 44100.0)));

    // Allen-Berkley room, 10 x 15 x 12.5 ft.
    const Vec3 room{10 * 0.3048, 15 * 0.3048, 12.5 * 0.3048};
    double lo = 1e300, hi = 0.0;
    for (double t60 = 0.2; t60 <= 1.0 + 1e-9; t60 += 0.05) {
        const double dynamic = static_cast<double>(flops_overlap_add(50.0, t60, 44100.0, true));
        const double ratio = dynamic / static_cast<double>(flops_sdn(5, 1, 44100.0));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    out.note(fmt("dynamic path recomputes %.2g..%.2g image-method FLOPS per response over the "
                 "sweep",
                 static_cast<double>(flops_ism(room, 0.2, 343.0)),
                 static_cast<double>(flops_ism(room, 1.0, 343.0))));
    out.check(lo >= 10.0 && hi <= 100.0,
              fmt("dynamic-ISM/SDN cost ratio spans [%.1f, %.1f] inside [10, 100]", lo, hi));
    return out;
}

// ---------------------------------------------------------------------------
// 8. Frequency-domain oracle against the time-domain engine.
// ---------------------------------------------------------------------------

Outcome criterion_8() {
    Outcome out;
    SceneConfig scene;
    scene.room_dims = {5.0, 5.0, 5.0};
    scene.source_pos = {1.2, 2.3, 1.7};
    scene.mic_pos = {3.6, 2.9, 3.1};
    scene.wall_alpha.fill(0.5); // scalar beta
    scene.sample_rate = 16000.0;

    auto net = SdnNetwork::build(scene, MatrixKind::Isotropic, 1);
    const std::size_t nfft = 32768; // 2.05 s at 16 kHz; wraparound far below 1e-9
    std::vector<std::complex<double>> spectrum(nfft);
    for (std::size_t k = 0; k <= nfft / 2; ++k) {
        spectrum[k] = net.frequency_response_at(static_cast<double>(k) * scene.sample_rate /
                                                static_cast<double>(nfft));
        if (!std::isfinite(spectrum[k].real())) {
            out.check(false, fmt("singular solve at bin %zu", k));
            return out;
        }
        if (k != 0 && k != nfft / 2) spectrum[nfft - k] = std::conj(spectrum[k]);
    }
    fft_radix2(spectrum, true);

    auto rir = net.render_rir(0.5);
    double acc = 0.0;
    for (std::size_t n = 0; n < rir.samples.size(); ++n) {
        const double d = rir.samples[n] - spectrum[n].real();
        acc += d * d;
    }
    const double rms = std::sqrt(acc / static_cast<double>(rir.samples.size()));
    out.check(rms < 1e-6, fmt("inverse transform vs time-domain RIR: RMS %.3g over 0.5 s", rms));
    return out;
}

// ---------------------------------------------------------------------------
// 9. Scattering-matrix theorem suites.
// ---------------------------------------------------------------------------

Eigen::MatrixXd haar_orthogonal(int k, Rng& rng) {
    Eigen::MatrixXd g(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

Outcome criterion_9() {
    Outcome out;
    const int samples = 100000;

    // Monte Carlo oracles, one sample pool per size reused across targets.
    for (int k : {4, 5}) {
        Rng pool_rng(900 + k);
        std::vector<Eigen::MatrixXd> orth_pool;
        std::vector<Eigen::VectorXd> unit_pool;
        orth_pool.reserve(samples);
        unit_pool.reserve(samples);
        for (int s = 0; s < samples; ++s) {
            orth_pool.push_back(haar_orthogonal(k, pool_rng));
            Eigen::VectorXd v(k);
            for (int i = 0; i < k; ++i) v[i] = pool_rng.normal();
            unit_pool.push_back(v / v.norm());
        }

        Rng target_rng(1000 + k);
        int orth_beaten = 0, house_beaten = 0;
        for (int trial = 0; trial < 25; ++trial) {
            Eigen::MatrixXd d(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) d(i, j) = target_rng.normal();

            const double best_orth = (nearest_orthogonal(d).m - d).norm();
            bool beaten = false;
            for (const auto& q : orth_pool)
                if ((q - d).norm() < best_orth - 1e-12) beaten = true;
            if (!beaten) ++orth_beaten;

            auto fit = nearest_householder(d);
            const double best_house = (fit.matrix.m - d).norm();
            beaten = false;
            for (const auto& v : unit_pool) {
                const Eigen::MatrixXd cand =
                    2.0 * v * v.transpose() - Eigen::MatrixXd::Identity(k, k);
                if ((cand - d).norm() < best_house - 1e-12) beaten = true;
            }
            if (!beaten) ++house_beaten;
        }
        out.check(orth_beaten == 25,
                  fmt("nearest_orthogonal beats %d MC samples on all 25 %dx%d targets", samples,
                      k, k));
        out.check(house_beaten == 25,
                  fmt("nearest_householder beats %d MC samples on all 25 %dx%d targets", samples,
                      k, k));
    }

    // Every constructor output is lossless at 1e-10.
    bool all_lossless = true;
    Rng rng(31337);
    for (int k = 2; k <= 8; ++k) {
        all_lossless &= is_lossless(isotropic_matrix(k).m, Eigen::MatrixXd::Identity(k, k), 1e-10)
                            .lossless;
        Eigen::VectorXd y(k);
        for (int i = 0; i < k; ++i) y[i] = rng.uniform(0.2, 5.0);
        auto adm = admittance_scattering(y);
        all_lossless &=
            is_lossless(adm.m, Eigen::MatrixXd(y.asDiagonal()), 1e-10).lossless;
        all_lossless &= is_lossless(normalized_householder(y).m,
                                    Eigen::MatrixXd::Identity(k, k), 1e-10)
                            .lossless;
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (auto kind : {RandomLosslessKind::OrthogonalGivens, RandomLosslessKind::Permutation,
                          RandomLosslessKind::CirculantAllpass})
            all_lossless &= is_lossless(random_lossless(kind, 5, seed).m,
                                        Eigen::MatrixXd::Identity(5, 5), 1e-10)
                                .lossless;
        // Moderately conditioned T keeps the parametrized construction tight.
        Eigen::MatrixXd t(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t(i, j) = rng.normal();
        t += 5.0 * Eigen::MatrixXd::Identity(4, 4);
        BlockDiagonalSpectrum spec;
        spec.real_eigenvalues = {1.0, -1.0};
        spec.complex_pairs = {{1.0, rng.uniform(0.4, 2.7)}};
        all_lossless &= is_lossless_auto(construct_lossless(t, spec).m, 1e-10).lossless;
    }
    out.check(all_lossless, "every constructor output passes is_lossless at 1e-10");

    // Theorem 4 verdicts.
    bool iso_ok = check_isotropic_uniqueness(isotropic_matrix(5).m, 1e-9) &&
                  check_isotropic_uniqueness(-isotropic_matrix(5).m, 1e-9);
    out.check(iso_ok, "+isotropic and -isotropic verdicts are true");
    int false_positives = 0;
    for (int t = 0; t < 1000; ++t)
        if (check_isotropic_uniqueness(haar_orthogonal(5, rng), 1e-9)) ++false_positives;
    out.check(false_positives == 0,
              fmt("0/1000 random orthogonal matrices misclassified as isotropic"));
    return out;
}

using CriterionFn = std::function<Outcome()>;

const std::vector<std::pair<std::string, CriterionFn>> kCriteria = {
    {"first-order exactness vs ISM", criterion_1},
    {"T60 vs Sabine/Eyring/ISM and edge sweep", criterion_2},
    {"absorption sweep ordering", criterion_3},
    {"octave-band T60 with the printed wall filter", criterion_4},
    {"normalized echo density breakpoints", criterion_5},
    {"mode density closed form and Monte Carlo", criterion_6},
    {"computational cost formulas", criterion_7},
    {"frequency-domain oracle", criterion_8},
    {"lossless matrix theorem suites", criterion_9},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) {
            const int n = std::atoi(argv[i]);
            if (n < 1 || n > static_cast<int>(kCriteria.size())) {
                std::fprintf(stderr, "usage: %s [criterion 1..%zu]\n", argv[0], kCriteria.size());
                return 2;
            }
            which.push_back(n);
        }
    } else {
        for (std::size_t i = 1; i <= kCriteria.size(); ++i) which.push_back(static_cast<int>(i));
    }

    int failures = 0;
    for (int n : which) {
        const auto& [name, fn] = kCriteria[static_cast<std::size_t>(n - 1)];
        Outcome result;
        try {
            result = fn();
        } catch (const std::exception& e) {
            result.pass = false;
            result.details.push_back(std::string("  FAIL exception: ") + e.what());
        }
        std::printf("[%s] criterion %d: %s\n", result.pass ? "PASS" : "FAIL", n, name.c_str());
        for (const auto& line : result.details) std::printf("%s\n", line.c_str());
        if (!result.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
