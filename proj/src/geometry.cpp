#include "sdn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sdn {

double Directivity::gain(double theta) const {
    switch (kind) {
        case Kind::Omni:
            return 1.0;
        case Kind::Cardioid:
            return std::max(0.0, cardioid_a + (1.0 - cardioid_a) * std::cos(theta));
        case Kind::Tabulated: {
            if (table.empty())
                throw std::invalid_argument("tabulated directivity has no entries");
            if (theta <= table.front().first) return table.front().second;
            if (theta >= table.back().first) return table.back().second;
            for (std::size_t i = 1; i < table.size(); ++i) {
                if (theta <= table[i].first) {
                    const auto& [t0, g0] = table[i - 1];
                    const auto& [t1, g1] = table[i];
                    const double f = (theta - t0) / (t1 - t0);
                    return g0 + f * (g1 - g0);
                }
            }
            return table.back().second;
        }
    }
    return 1.0;
}

double SceneConfig::wall_area(int wall_id) const {
    switch (wall_axis(wall_id)) {
        case 0: return room_dims.y * room_dims.z;
        case 1: return room_dims.x * room_dims.z;
        default: return room_dims.x * room_dims.y;
    }
}

double SceneConfig::wall_beta(int wall_id) const {
    const double beta = std::sqrt(std::max(0.0, 1.0 - wall_alpha[wall_id]));
    return negative_beta ? -beta : beta;
}

namespace {

double wall_plane_offset(const SceneConfig& s, int wall_id) {
    return wall_at_max(wall_id) ? s.room_dims[wall_axis(wall_id)] : 0.0;
}

bool strictly_inside(const Vec3& p, const Vec3& dims) {
    return p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y &&
           p.z > 0.0 && p.z < dims.z;
}

} // namespace

std::array<ReflectionPoint, kNumWalls> first_order_reflection_points(const SceneConfig& scene) {
    std::array<ReflectionPoint, kNumWalls> points;
    for (int wall = 0; wall < kNumWalls; ++wall) {
        const int ax = wall_axis(wall);
        const double plane = wall_plane_offset(scene, wall);

        Vec3 image = scene.source_pos;
        image[ax] = 2.0 * plane - image[ax];

        const double denom = scene.mic_pos[ax] - image[ax];
        if (denom == 0.0)
            throw std::invalid_argument(
                "degenerate scene: source and microphone lie on the plane of wall " +
                std::string(wall_name(wall)));
        const double t = (plane - image[ax]) / denom;
        points[wall] = {wall, image + (scene.mic_pos - image) * t};
        points[wall].position[ax] = plane; // pin exactly onto the wall plane
    }
    return points;
}

long delay_samples(double distance_m, double sample_rate, double sound_speed) {
    if (distance_m < 0.0)
        throw std::invalid_argument("delay_samples: negative distance");
    return static_cast<long>(std::floor(sample_rate * distance_m / sound_speed));
}

double directivity_gain(const Directivity& pattern, const Vec3& axis,
                        const Vec3& from, const Vec3& to) {
    const Vec3 dir = to - from;
    if (dir.norm() == 0.0)
        throw std::invalid_argument("directivity_gain: zero-length direction");
    if (pattern.kind == Directivity::Kind::Omni) return 1.0;
    return pattern.gain(angle_between(axis, dir));
}

SceneCheck validate_scene(const SceneConfig& scene, std::optional<double> t60_estimate_s) {
    SceneCheck check;
    auto fail = [&](const std::string& msg) { check.violations.push_back(msg); };

    if (!(scene.room_dims.x > 0.0 && scene.room_dims.y > 0.0 && scene.room_dims.z > 0.0))
        fail("room dimensions must be positive");
    if (!(scene.sample_rate > 0.0)) fail("sample_rate must be positive");
    if (!(scene.sound_speed > 0.0)) fail("sound_speed must be positive");

    if (!scene.wall_filter) {
        for (int w = 0; w < kNumWalls; ++w) {
            if (scene.wall_alpha[w] < 0.0 || scene.wall_alpha[w] > 1.0) {
                std::ostringstream msg;
                msg << "wall " << wall_name(w) << " absorption " << scene.wall_alpha[w]
                    << " outside [0,1]";
                fail(msg.str());
            }
        }
    } else if (!iir_is_stable(*scene.wall_filter)) {
        fail("wall filter is unstable (pole on or outside the unit circle)");
    }

    if (!check.violations.empty()) return check;

    if (!strictly_inside(scene.source_pos, scene.room_dims))
        fail("source outside room (positions must be strictly inside the box)");
    if (!strictly_inside(scene.mic_pos, scene.room_dims))
        fail("microphone outside room (positions must be strictly inside the box)");
    if (!check.violations.empty()) return check;

    // ISO 3382 placement advisories, non-fatal.
    double min_wall_dist = scene.mic_pos.x;
    min_wall_dist = std::min(min_wall_dist, scene.room_dims.x - scene.mic_pos.x);
    min_wall_dist = std::min(min_wall_dist, scene.mic_pos.y);
    min_wall_dist = std::min(min_wall_dist, scene.room_dims.y - scene.mic_pos.y);
    min_wall_dist = std::min(min_wall_dist, scene.mic_pos.z);
    min_wall_dist = std::min(min_wall_dist, scene.room_dims.z - scene.mic_pos.z);
    if (min_wall_dist < 1.0) {
        std::ostringstream msg;
        msg << "microphone is " << min_wall_dist << " m from the nearest wall (< 1 m)";
        check.warnings.push_back(msg.str());
    }

    double t_est = 0.0;
    if (t60_estimate_s) {
        t_est = *t60_estimate_s;
    } else if (!scene.wall_filter) {
        double absorbing = 0.0;
        for (int w = 0; w < kNumWalls; ++w)
            absorbing += scene.wall_area(w) * scene.wall_alpha[w];
        if (absorbing > 0.0) t_est = 0.161 * scene.volume() / absorbing;
    }
    if (t_est > 0.0) {
        const double d_min = 2.0 * std::sqrt(scene.volume() / (scene.sound_speed * t_est));
        const double d = distance(scene.source_pos, scene.mic_pos);
        if (d < d_min) {
            std::ostringstream msg;
            msg << "source-microphone distance " << d << " m is below the ISO minimum "
                << d_min << " m for T_est = " << t_est << " s";
            check.warnings.push_back(msg.str());
        }
    }
    return check;
}

} // namespace sdn
