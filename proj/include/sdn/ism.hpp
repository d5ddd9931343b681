// Time-domain image source method for rectangular rooms, in the classic
// Allen-Berkley formulation. Used as the reference for first-order timing,
// reverberation time and echo-density comparisons. Impulses land on
// floor(Fs * distance / c) with no fractional-delay smoothing.
#pragma once

#include <array>
#include <vector>

#include "sdn/geometry.hpp"
#include "sdn/impulse_response.hpp"

namespace sdn {

struct ImageSource {
    std::array<int, 3> lattice{};  // (n_x, n_y, n_z)
    std::array<int, 3> parity{};   // 0 or 1 per axis
    Vec3 position;
    double amplitude = 0.0; // product of wall reflection gains / distance
    long delay = 0;         // floor(Fs * distance / c)
    int order = 0;          // total number of wall reflections
};

// All image sources whose distance to the microphone is at most
// c * t_max_s, ordered by (lattice shell, lexicographic index, parity).
// Per-wall reflection gains follow the scene (beta_i = +-sqrt(1 - alpha_i)).
std::vector<ImageSource> enumerate_images(const SceneConfig& scene, double t_max_s);

// Accumulate the image impulses into a sampled response. Omnidirectional
// source and microphone; honors scene.direct_path_enabled.
ImpulseResponse render_rir_ism(const SceneConfig& scene, double duration_s);

} // namespace sdn
