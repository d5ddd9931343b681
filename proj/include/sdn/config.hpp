// Toolkit configuration file: a JSON document with a strict schema
// (unknown keys are rejected). Committed config files make experiments
// reproducible.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sdn/geometry.hpp"
#include "sdn/network.hpp"

namespace sdn {

struct ToolkitConfig {
    SceneConfig scene;
    MatrixKind matrix_kind = MatrixKind::Isotropic;
    std::uint64_t seed = 1;
    std::optional<Eigen::VectorXd> admittance; // householder weighting when given
    AirAbsorption air;
    double duration_s = 1.0;

    // analysis switches
    double ned_window_s = 0.020;
    double ned_hop_s = 0.005;
    double t60_fit_hi_db = -5.0;
    double t60_fit_lo_db = -35.0;
};

ToolkitConfig parse_config(const std::string& json_text);
ToolkitConfig load_config(const std::string& path);
std::string serialize_config(const ToolkitConfig& config);
void save_config(const std::string& path, const ToolkitConfig& config);

// Field-by-field comparison used by the round-trip test and the CLI.
bool config_equal(const ToolkitConfig& a, const ToolkitConfig& b);

} // namespace sdn
