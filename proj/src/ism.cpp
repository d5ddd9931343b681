#include "sdn/ism.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdn {

namespace {

double powi(double base, int exponent) {
    double out = 1.0;
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

struct AxisSetup {
    double length;
    double src;
    double mic;
    double beta_lo; // wall at 0
    double beta_hi; // wall at L
    int n_min, n_max;
};

} // namespace

std::vector<ImageSource> enumerate_images(const SceneConfig& scene, double t_max_s) {
    if (!(t_max_s > 0.0)) throw std::invalid_argument("enumerate_images: t_max must be positive");
    auto check = validate_scene(scene);
    if (!check.ok()) throw std::invalid_argument("enumerate_images: " + check.violations.front());
    if (scene.wall_filter)
        throw std::invalid_argument("enumerate_images: scalar wall absorption only");

    const double reach = scene.sound_speed * t_max_s;

    std::array<AxisSetup, 3> ax{};
    for (int d = 0; d < 3; ++d) {
        ax[d].length = scene.room_dims[d];
        ax[d].src = scene.source_pos[d];
        ax[d].mic = scene.mic_pos[d];
        ax[d].beta_lo = scene.wall_beta(2 * d);
        ax[d].beta_hi = scene.wall_beta(2 * d + 1);
        // Image coordinate is 2 n L +- src; keep every n that could land
        // within `reach` of the mic for either parity.
        const double lo = (ax[d].mic - reach - ax[d].src) / (2.0 * ax[d].length) - 1.0;
        const double hi = (ax[d].mic + reach + ax[d].src) / (2.0 * ax[d].length) + 1.0;
        ax[d].n_min = static_cast<int>(std::floor(lo));
        ax[d].n_max = static_cast<int>(std::ceil(hi));
    }

    std::vector<ImageSource> images;
    for (int nx = ax[0].n_min; nx <= ax[0].n_max; ++nx)
        for (int ny = ax[1].n_min; ny <= ax[1].n_max; ++ny)
            for (int nz = ax[2].n_min; nz <= ax[2].n_max; ++nz)
                for (int px = 0; px <= 1; ++px)
                    for (int py = 0; py <= 1; ++py)
                        for (int pz = 0; pz <= 1; ++pz) {
                            const int n[3] = {nx, ny, nz};
                            const int p[3] = {px, py, pz};
                            Vec3 pos;
                            double gain = 1.0;
                            int order = 0;
                            for (int d = 0; d < 3; ++d) {
                                pos[d] = 2.0 * n[d] * ax[d].length +
                                         (p[d] ? -ax[d].src : ax[d].src);
                                const int hits_lo = std::abs(n[d] - p[d]);
                                const int hits_hi = std::abs(n[d]);
                                gain *= powi(ax[d].beta_lo, hits_lo) *
                                        powi(ax[d].beta_hi, hits_hi);
                                order += hits_lo + hits_hi;
                            }
                            const double dist = distance(pos, scene.mic_pos);
                            if (dist > reach) continue;
                            if (order == 0 && !scene.direct_path_enabled) continue;
                            ImageSource img;
                            img.lattice = {nx, ny, nz};
                            img.parity = {px, py, pz};
                            img.position = pos;
                            img.order = order;
                            // Coincident source and mic have no direct ray.
                            if (dist == 0.0) continue;
                            img.amplitude = gain / dist;
                            img.delay = delay_samples(dist, scene.sample_rate, scene.sound_speed);
                            images.push_back(img);
                        }

    auto shell = [](const ImageSource& s) {
        return std::max({std::abs(s.lattice[0]), std::abs(s.lattice[1]), std::abs(s.lattice[2])});
    };
    std::sort(images.begin(), images.end(), [&](const ImageSource& a, const ImageSource& b) {
        const int sa = shell(a), sb = shell(b);
        if (sa != sb) return sa < sb;
        if (a.lattice != b.lattice) return a.lattice < b.lattice;
        return a.parity < b.parity;
    });
    return images;
}

ImpulseResponse render_rir_ism(const SceneConfig& scene, double duration_s) {
    if (!(duration_s > 0.0))
        throw std::invalid_argument("render_rir_ism: duration must be positive");
    ImpulseResponse rir;
    rir.sample_rate = scene.sample_rate;
    rir.samples.assign(static_cast<std::size_t>(std::ceil(duration_s * scene.sample_rate)), 0.0);
    for (const ImageSource& img : enumerate_images(scene, duration_s)) {
        if (img.delay >= 0 && static_cast<std::size_t>(img.delay) < rir.samples.size())
            rir.samples[static_cast<std::size_t>(img.delay)] += img.amplitude;
    }
    return rir;
}

} // namespace sdn
