// Scene description for rectangular rooms: wall layout, first-order
// reflection points, propagation delays and directivity gains.
//
// Wall indexing is fixed as [x=0, x=Lx, y=0, y=Ly, z=0, z=Lz]; every port
// ordering in the network derives from it.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sdn/iir.hpp"
#include "sdn/vec3.hpp"

namespace sdn {

constexpr int kNumWalls = 6;

// Axis (0=x,1=y,2=z) and plane offset of a wall.
inline int wall_axis(int wall_id) { return wall_id / 2; }
inline bool wall_at_max(int wall_id) { return wall_id % 2 == 1; }
inline const char* wall_name(int wall_id) {
    static const char* names[kNumWalls] = {"x0", "x1", "y0", "y1", "z0", "z1"};
    return names[wall_id];
}

struct Directivity {
    enum class Kind { Omni, Cardioid, Tabulated };

    Kind kind = Kind::Omni;
    double cardioid_a = 0.5;                         // gain = max(0, a + (1-a) cos theta)
    std::vector<std::pair<double, double>> table;    // (theta rad in [0,pi], gain), sorted

    double gain(double theta) const;

    static Directivity omni() { return {}; }
    static Directivity cardioid(double a) {
        Directivity d;
        d.kind = Kind::Cardioid;
        d.cardioid_a = a;
        return d;
    }
};

struct SceneConfig {
    Vec3 room_dims{5.0, 5.0, 5.0};
    Vec3 source_pos{2.5, 2.5, 2.5};
    Vec3 mic_pos{2.5, 2.5, 2.5};
    Directivity source_dir;
    Vec3 source_axis{1.0, 0.0, 0.0};
    Directivity mic_dir;
    Vec3 mic_axis{1.0, 0.0, 0.0};

    std::array<double, kNumWalls> wall_alpha{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    std::optional<IirCoeffs> wall_filter;  // when set, replaces the scalar gains on all walls
    bool negative_beta = false;            // reflection gain -sqrt(1-alpha) instead of +sqrt

    double sample_rate = 44100.0;
    double sound_speed = 343.0;
    bool direct_path_enabled = true;

    double volume() const { return room_dims.x * room_dims.y * room_dims.z; }
    double total_wall_area() const {
        return 2.0 * (room_dims.x * room_dims.y + room_dims.x * room_dims.z +
                      room_dims.y * room_dims.z);
    }
    double wall_area(int wall_id) const;
    // Signed reflection gain beta_i = +-sqrt(1 - alpha_i) for wall i.
    double wall_beta(int wall_id) const;
};

struct ReflectionPoint {
    int wall_id = 0;
    Vec3 position;
};

// Specular first-order bounce points: intersection of each wall plane with
// the segment from the source's mirror image (across that wall) to the mic.
std::array<ReflectionPoint, kNumWalls> first_order_reflection_points(const SceneConfig& scene);

// floor(Fs * d / c)
long delay_samples(double distance_m, double sample_rate, double sound_speed);

// Gain of `pattern` oriented along `axis`, evaluated toward (to - from).
double directivity_gain(const Directivity& pattern, const Vec3& axis,
                        const Vec3& from, const Vec3& to);

struct SceneCheck {
    std::vector<std::string> violations; // fatal
    std::vector<std::string> warnings;   // ISO placement advisories
    bool ok() const { return violations.empty(); }
};

// Checks invariants; ISO placement issues (mic >= 1 m from walls, source/mic
// distance >= 2 sqrt(V / (c T_est))) are reported as non-fatal warnings.
// T_est defaults to the Sabine estimate from the scalar absorption.
SceneCheck validate_scene(const SceneConfig& scene,
                          std::optional<double> t60_estimate_s = std::nullopt);

} // namespace sdn
