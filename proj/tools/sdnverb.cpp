// sdnverb: room-acoustics synthesis toolkit command line.
//
// Subcommands: render, convolve, analyze, compare, matrix, estimate.
// Exit codes: 0 ok, 1 validation error, 2 runtime/numeric error.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sdn/analysis.hpp"
#include "sdn/audio_io.hpp"
#include "sdn/config.hpp"
#include "sdn/ism.hpp"
#include "sdn/network.hpp"
#include "sdn/rng.hpp"
#include "sdn/scattering.hpp"

using namespace sdn;

namespace {

int thread_cap() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SDN_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return static_cast<int>(n);
}

// Run fn(0..count-1) on up to thread_cap() workers; deterministic because
// each index owns its output slot.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    const int workers = std::min(count, thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::optional<std::string> matrix;
    bool no_direct_path = false;

    void attach(CLI::App* cmd, bool config_required = true) {
        auto* opt = cmd->add_option("--config", config_path, "toolkit config file (JSON)");
        if (config_required) opt->required();
        cmd->add_option("--seed", seed, "override the matrix seed");
        cmd->add_option("--duration", duration, "override the render duration in seconds");
        cmd->add_option("--matrix", matrix,
                        "scattering matrix kind: isotropic|householder|orthogonal|permutation|circulant");
        cmd->add_flag("--no-direct-path", no_direct_path, "remove the line-of-sight component");
    }

    ToolkitConfig load() const {
        ToolkitConfig cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (duration) cfg.duration_s = *duration;
        if (matrix) {
            auto kind = parse_matrix_kind(*matrix);
            if (!kind) throw std::invalid_argument("unknown matrix kind: " + *matrix);
            cfg.matrix_kind = *kind;
        }
        if (no_direct_path) cfg.scene.direct_path_enabled = false;
        return cfg;
    }
};

SdnNetwork build_from_config(const ToolkitConfig& cfg) {
    auto matrix = make_scattering_matrix(cfg.matrix_kind, kNumWalls - 1, cfg.seed,
                                         cfg.admittance);
    return SdnNetwork::build(cfg.scene, matrix, cfg.air);
}

void warn_scene(const ToolkitConfig& cfg) {
    for (const auto& w : validate_scene(cfg.scene).warnings)
        std::cerr << "warning: " << w << '\n';
}

void write_rir(const std::string& path, const std::string& format, const ImpulseResponse& rir) {
    if (format == "wav") {
        auto report = write_audio(path, to_audio(rir));
        if (report.clipped_samples > 0)
            std::cerr << "warning: " << report.clipped_samples << " samples clipped\n";
    } else if (format == "csv") {
        std::vector<double> time(rir.samples.size());
        for (std::size_t i = 0; i < time.size(); ++i)
            time[i] = static_cast<double>(i) / rir.sample_rate;
        export_curve(path, {"time_s", "pressure"}, {time, rir.samples},
                     {"sample_rate " + std::to_string(rir.sample_rate)});
    } else {
        throw std::invalid_argument("unknown format: " + format);
    }
}

ImpulseResponse read_rir(const std::string& path, double csv_sample_rate) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".wav") {
        auto buf = load_audio(path);
        return {buf.channels.at(0), buf.sample_rate};
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    ImpulseResponse rir;
    rir.sample_rate = csv_sample_rate;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find_last_of(',');
        const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            rir.samples.push_back(std::stod(cell));
        } catch (...) {
            continue; // header row
        }
    }
    if (rir.samples.empty()) throw std::runtime_error("no samples in " + path);
    return rir;
}

// ---------------------------------------------------------------------------

int cmd_render(const CommonFlags& flags, const std::string& out, const std::string& format) {
    auto cfg = flags.load();
    warn_scene(cfg);
    auto net = build_from_config(cfg);
    const auto total = static_cast<long>(std::ceil(cfg.duration_s * cfg.scene.sample_rate));
    std::cerr << "rendering " << total << " samples at " << cfg.scene.sample_rate << " Hz ("
              << matrix_kind_name(cfg.matrix_kind) << ", seed " << cfg.seed << ")\n";
    auto rir = net.render_rir(cfg.duration_s);
    write_rir(out, format, rir);
    std::cout << "wrote " << out << " (" << rir.samples.size() << " samples)\n";
    return 0;
}

int cmd_convolve(const CommonFlags& flags, const std::string& input, const std::string& out) {
    auto cfg = flags.load();
    warn_scene(cfg);
    auto audio = load_audio(input);
    if (std::abs(audio.sample_rate - cfg.scene.sample_rate) > 1e-9)
        std::cerr << "warning: input sample rate " << audio.sample_rate
                  << " Hz differs from scene rate " << cfg.scene.sample_rate << " Hz\n";

    auto net = build_from_config(cfg);
    AudioBuffer wet;
    wet.sample_rate = audio.sample_rate;
    wet.encoding = SampleEncoding::Float32;
    for (const auto& channel : audio.channels)
        wet.channels.push_back(net.process(channel)); // process() resets per channel
    auto report = write_audio(out, wet);
    if (report.clipped_samples > 0)
        std::cerr << "warning: " << report.clipped_samples << " samples clipped\n";
    std::cout << "wrote " << out << " (" << wet.channels.size() << " channel(s), "
              << wet.num_frames() << " samples)\n";
    return 0;
}

int cmd_analyze(const std::string& rir_path, double csv_fs, const std::string& prefix,
                double window_s, double hop_s, double fit_hi, double fit_lo) {
    auto rir = read_rir(rir_path, csv_fs);
    auto edc = schroeder_edc_db(rir);
    std::vector<double> time(edc.size());
    for (std::size_t i = 0; i < time.size(); ++i)
        time[i] = static_cast<double>(i) / rir.sample_rate;
    export_curve(prefix + "_edc.csv", {"time_s", "edc_db"}, {time, edc});

    try {
        auto fit = t60_from_edc(edc, rir.sample_rate, fit_hi, fit_lo);
        std::cout << "T60 " << fit.t60_s << " s (slope " << fit.slope_db_per_s << " dB/s, fit "
                  << fit.fit_begin_s << ".." << fit.fit_end_s << " s)\n";
    } catch (const std::exception& e) {
        std::cout << "T60 unavailable: " << e.what() << '\n';
    }

    auto ned = ned_profile(rir, window_s, hop_s);
    export_curve(prefix + "_ned.csv", {"time_s", "ned"}, {ned.times_s, ned.ned},
                 {"window_s " + std::to_string(window_s), "hop_s " + std::to_string(hop_s)});
    for (double level : {0.3, 0.75}) {
        auto t = ned_crossing_time(ned, level);
        std::cout << "NED reaches " << level << (t ? " at " + std::to_string(*t) + " s" : " never")
                  << '\n';
    }

    std::vector<double> centers;
    for (double fc : kDefaultOctaveCenters) {
        if (fc * std::sqrt(2.0) >= rir.sample_rate / 2.0) continue;
        centers.push_back(fc);
    }
    auto bands = octave_band_t60(rir, centers);
    std::vector<double> band_hz, band_t60;
    for (const auto& band : bands) {
        if (!band.fit) {
            std::cout << "band " << band.center_hz << " Hz: " << band.error << '\n';
            continue;
        }
        band_hz.push_back(band.center_hz);
        band_t60.push_back(band.fit->t60_s);
    }
    if (!band_hz.empty())
        export_curve(prefix + "_bands.csv", {"band_hz", "t60_s"}, {band_hz, band_t60});
    std::cout << "wrote " << prefix << "_edc.csv, " << prefix << "_ned.csv"
              << (band_hz.empty() ? "" : ", " + prefix + "_bands.csv") << '\n';
    return 0;
}

struct CompareResult {
    double sdn_t60 = 0.0, ism_t60 = 0.0;
    double first_order_diff = 0.0;
    std::optional<double> sdn_ned03, sdn_ned75, ism_ned03, ism_ned75;
};

CompareResult compare_once(const ToolkitConfig& cfg) {
    CompareResult r;
    auto net = build_from_config(cfg);
    auto sdn_rir = net.render_rir(cfg.duration_s);
    auto ism_rir = render_rir_ism(cfg.scene, cfg.duration_s);

    for (int k = 0; k < kNumWalls; ++k) {
        const long bin = net.source_delay(k) + net.mic_delay(k);
        if (bin < static_cast<long>(sdn_rir.samples.size()))
            r.first_order_diff =
                std::max(r.first_order_diff,
                         std::abs(sdn_rir.samples[static_cast<std::size_t>(bin)] -
                                  ism_rir.samples[static_cast<std::size_t>(bin)]));
    }
    r.sdn_t60 = measure_t60(sdn_rir, cfg.t60_fit_hi_db, cfg.t60_fit_lo_db).t60_s;
    r.ism_t60 = measure_t60(ism_rir, cfg.t60_fit_hi_db, cfg.t60_fit_lo_db).t60_s;
    auto sdn_ned = ned_profile(sdn_rir, cfg.ned_window_s, cfg.ned_hop_s);
    auto ism_ned = ned_profile(ism_rir, cfg.ned_window_s, cfg.ned_hop_s);
    r.sdn_ned03 = ned_crossing_time(sdn_ned, 0.3);
    r.sdn_ned75 = ned_crossing_time(sdn_ned, 0.75);
    r.ism_ned03 = ned_crossing_time(ism_ned, 0.3);
    r.ism_ned75 = ned_crossing_time(ism_ned, 0.75);
    return r;
}

int cmd_compare(const CommonFlags& flags, int trials) {
    auto cfg = flags.load();
    if (cfg.scene.wall_filter)
        throw std::invalid_argument("compare needs scalar wall absorption (the reference "
                                    "image-source renderer has no wall filters)");
    warn_scene(cfg);

    std::array<double, kNumWalls> alpha = cfg.scene.wall_alpha;
    std::cout << "predictors: Sabine " << sabine_t60(cfg.scene.room_dims, alpha) << " s, Eyring "
              << eyring_t60(cfg.scene.room_dims, alpha) << " s\n";

    if (trials <= 1) {
        auto r = compare_once(cfg);
        std::cout << "T60: SDN " << r.sdn_t60 << " s, ISM " << r.ism_t60 << " s\n"
                  << "max first-order amplitude difference: " << r.first_order_diff << '\n';
        auto show = [](const char* name, const std::optional<double>& v) {
            std::cout << name << (v ? std::to_string(*v) + " s" : std::string("never")) << '\n';
        };
        show("NED=0.30 SDN: ", r.sdn_ned03);
        show("NED=0.30 ISM: ", r.ism_ned03);
        show("NED=0.75 SDN: ", r.sdn_ned75);
        show("NED=0.75 ISM: ", r.ism_ned75);
        return 0;
    }

    std::vector<CompareResult> results(trials);
    std::vector<std::string> errors(trials);
    parallel_for(trials, [&](int i) {
        try {
            ToolkitConfig trial_cfg = cfg;
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            for (int d = 0; d < 3; ++d) {
                trial_cfg.scene.source_pos[d] =
                    rng.uniform(0.3, cfg.scene.room_dims[d] - 0.3);
                trial_cfg.scene.mic_pos[d] = rng.uniform(0.3, cfg.scene.room_dims[d] - 0.3);
            }
            trial_cfg.seed = derive_seed(cfg.seed, 1000000 + static_cast<std::uint64_t>(i));
            results[static_cast<std::size_t>(i)] = compare_once(trial_cfg);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    });

    double sdn_mean = 0.0, ism_mean = 0.0, worst_first = 0.0;
    int ok = 0;
    for (int i = 0; i < trials; ++i) {
        if (!errors[static_cast<std::size_t>(i)].empty()) {
            std::cerr << "trial " << i << " failed: " << errors[static_cast<std::size_t>(i)]
                      << '\n';
            continue;
        }
        const auto& r = results[static_cast<std::size_t>(i)];
        sdn_mean += r.sdn_t60;
        ism_mean += r.ism_t60;
        worst_first = std::max(worst_first, r.first_order_diff);
        ++ok;
    }
    if (ok == 0) throw std::runtime_error("all comparison trials failed");
    std::cout << "trials: " << ok << " of " << trials << " (random endpoint pairs)\n"
              << "mean T60: SDN " << sdn_mean / ok << " s, ISM " << ism_mean / ok << " s\n"
              << "worst first-order amplitude difference: " << worst_first << '\n';
    return 0;
}

int cmd_matrix(const std::string& op, int size, std::uint64_t seed, const std::string& y_csv,
               const std::string& in_path, const std::string& out_path, double tol) {
    auto parse_y = [&]() {
        if (y_csv.empty())
            throw std::invalid_argument("--y is required for this operation (comma-separated)");
        Eigen::VectorXd y(std::count(y_csv.begin(), y_csv.end(), ',') + 1);
        std::stringstream ss(y_csv);
        std::string cell;
        Eigen::Index i = 0;
        while (std::getline(ss, cell, ',')) y[i++] = std::stod(cell);
        return y;
    };
    auto need_input = [&]() {
        if (in_path.empty()) throw std::invalid_argument("--in is required for this operation");
        return load_matrix_csv(in_path);
    };
    auto emit = [&](const Eigen::MatrixXd& m, const std::string& what) {
        if (!out_path.empty()) {
            save_matrix_csv(out_path, m);
            std::cout << "wrote " << what << " to " << out_path << '\n';
        } else {
            std::cout << m << '\n';
        }
    };

    if (op == "isotropic") {
        emit(isotropic_matrix(size).m, "isotropic matrix");
    } else if (op == "householder") {
        emit(normalized_householder(parse_y()).m, "householder matrix");
    } else if (op == "admittance") {
        emit(admittance_scattering(parse_y()).m, "admittance scattering matrix");
    } else if (op == "orthogonal" || op == "permutation" || op == "circulant") {
        const auto kind = op == "orthogonal" ? RandomLosslessKind::OrthogonalGivens
                          : op == "permutation" ? RandomLosslessKind::Permutation
                                                : RandomLosslessKind::CirculantAllpass;
        emit(random_lossless(kind, size, seed).m, "random " + op + " matrix");
    } else if (op == "nearest-orthogonal") {
        auto d = need_input();
        auto a = nearest_orthogonal(d);
        std::cout << "distance ||A - D||_F = " << (a.m - d).norm() << '\n';
        emit(a.m, "nearest orthogonal matrix");
    } else if (op == "nearest-householder") {
        auto d = need_input();
        auto fit = nearest_householder(d);
        std::cout << "distance ||A - D||_F = " << (fit.matrix.m - d).norm()
                  << (fit.degenerate ? " (degenerate top eigenvalue)" : "") << '\n';
        emit(fit.matrix.m, "nearest householder reflection");
    } else if (op == "verify") {
        auto a = need_input();
        auto verdict = y_csv.empty() ? is_lossless_auto(a, tol)
                                     : is_lossless(a, Eigen::MatrixXd(parse_y().asDiagonal()),
                                                   tol);
        std::cout << (verdict.lossless ? "lossless" : "NOT lossless") << " (residual "
                  << verdict.residual << ", tol " << tol << ")"
                  << (verdict.note.empty() ? "" : "\n" + verdict.note) << '\n';
        return verdict.lossless ? 0 : 2;
    } else if (op == "isotropic-check") {
        auto a = need_input();
        const bool verdict = check_isotropic_uniqueness(a, tol);
        std::cout << (verdict ? "matrix is +-isotropic" : "matrix is not +-isotropic") << '\n';
    } else {
        throw std::invalid_argument("unknown matrix op: " + op);
    }
    return 0;
}

int cmd_estimate(double lx, double ly, double lz, double fs, double frame_rate, int filter_ops) {
    const Vec3 room{lx, ly, lz};
    std::cout << "costs at Fs = " << fs << " Hz (P = " << filter_ops << " per wall filter)\n";
    std::cout << "  SDN  K=5:  " << flops_sdn(5, filter_ops, fs) / 1e6 << " MFLOPS\n";
    std::cout << "  FDN  Q=12: " << flops_fdn(12, filter_ops, fs) / 1e6 << " MFLOPS\n";

    std::cout << "room " << lx << " x " << ly << " x " << lz << " m, frame rate " << frame_rate
              << " Hz\n";
    std::cout << "  T60[s]   ISM/response   OA-static/s   OA-dynamic/s   dynamic/SDN\n";
    for (double t60 = 0.2; t60 <= 1.0 + 1e-9; t60 += 0.2) {
        const auto ism = flops_ism(room, t60, 343.0);
        const auto oa_s = flops_overlap_add(frame_rate, t60, fs, false);
        const auto oa_d = flops_overlap_add(frame_rate, t60, fs, true);
        std::printf("  %-8.2f %-14.3g %-13.3g %-14.3g %-10.1f\n", t60,
                    static_cast<double>(ism), static_cast<double>(oa_s),
                    static_cast<double>(oa_d),
                    static_cast<double>(oa_d) / static_cast<double>(flops_sdn(5, filter_ops, fs)));
    }

    const double diag = room.norm();
    const double bits = memory_bound_bits(6, 32.0, fs, 343.0, diag);
    std::cout << "memory bound (6 nodes, 32-bit samples): " << bits / 8.0 / 1024.0 << " KiB\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scattering delay network room-acoustics toolkit"};
    app.require_subcommand(1);

    // render
    auto* render = app.add_subcommand("render", "render a room impulse response");
    CommonFlags render_flags;
    render_flags.attach(render);
    std::string render_out = "rir.wav", render_format = "wav";
    render->add_option("--out", render_out, "output path");
    render->add_option("--format", render_format, "wav or csv");

    // convolve
    auto* convolve = app.add_subcommand("convolve", "convolve input audio with the scene");
    CommonFlags convolve_flags;
    convolve_flags.attach(convolve);
    std::string convolve_in, convolve_out = "wet.wav";
    convolve->add_option("--input", convolve_in, "input WAV file")->required();
    convolve->add_option("--out", convolve_out, "output path");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "measure EDC/T60/NED/band-T60 of a response");
    std::string analyze_rir, analyze_prefix = "analysis";
    double analyze_fs = 44100.0, analyze_window = 0.020, analyze_hop = 0.005;
    double analyze_hi = -5.0, analyze_lo = -35.0;
    analyze->add_option("--rir", analyze_rir, "response file (.wav or .csv)")->required();
    analyze->add_option("--fs", analyze_fs, "sample rate for CSV input");
    analyze->add_option("--out-prefix", analyze_prefix, "prefix for exported CSV curves");
    analyze->add_option("--ned-window", analyze_window, "NED window in seconds");
    analyze->add_option("--ned-hop", analyze_hop, "NED hop in seconds");
    analyze->add_option("--fit-hi", analyze_hi, "upper EDC fit level (dB)");
    analyze->add_option("--fit-lo", analyze_lo, "lower EDC fit level (dB)");

    // compare
    auto* compare = app.add_subcommand("compare", "compare SDN against the image-source method");
    CommonFlags compare_flags;
    compare_flags.attach(compare);
    int compare_trials = 1;
    compare->add_option("--trials", compare_trials,
                        "random endpoint pairs (parallel, capped by SDN_THREADS)");

    // matrix
    auto* matrix = app.add_subcommand("matrix", "construct/verify/optimize scattering matrices");
    std::string matrix_op, matrix_y, matrix_in, matrix_out;
    int matrix_size = 5;
    std::uint64_t matrix_seed = 1;
    double matrix_tol = 1e-9;
    matrix->add_option("--op", matrix_op,
                       "isotropic|householder|admittance|orthogonal|permutation|circulant|"
                       "nearest-orthogonal|nearest-householder|verify|isotropic-check")
        ->required();
    matrix->add_option("--size", matrix_size, "matrix size K");
    matrix->add_option("--seed", matrix_seed, "seed for the random kinds");
    matrix->add_option("--y", matrix_y, "admittance weights, comma separated");
    matrix->add_option("--in", matrix_in, "input matrix CSV");
    matrix->add_option("--out", matrix_out, "output matrix CSV");
    matrix->add_option("--tol", matrix_tol, "verification tolerance");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "print FLOPS and memory estimates");
    double est_lx = 3.048, est_ly = 4.572, est_lz = 3.81;
    double est_fs = 44100.0, est_fr = 50.0;
    int est_p = 1;
    estimate->add_option("--lx", est_lx, "room x dimension (m)");
    estimate->add_option("--ly", est_ly, "room y dimension (m)");
    estimate->add_option("--lz", est_lz, "room z dimension (m)");
    estimate->add_option("--fs", est_fs, "sample rate");
    estimate->add_option("--frame-rate", est_fr, "overlap-add frame rate (Hz)");
    estimate->add_option("--filter-ops", est_p, "operations per wall filter sample");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (render->parsed()) return cmd_render(render_flags, render_out, render_format);
        if (convolve->parsed()) return cmd_convolve(convolve_flags, convolve_in, convolve_out);
        if (analyze->parsed())
            return cmd_analyze(analyze_rir, analyze_fs, analyze_prefix, analyze_window,
                               analyze_hop, analyze_hi, analyze_lo);
        if (compare->parsed()) return cmd_compare(compare_flags, compare_trials);
        if (matrix->parsed())
            return cmd_matrix(matrix_op, matrix_size, matrix_seed, matrix_y, matrix_in,
                              matrix_out, matrix_tol);
        if (estimate->parsed())
            return cmd_estimate(est_lx, est_ly, est_lz, est_fs, est_fr, est_p);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
