// Run configuration: JSON schema parsing, CLI overrides and the shipped
// default configuration.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtolctrl/aero.hpp"
#include "vtolctrl/models.hpp"
#include "vtolctrl/sim.hpp"

namespace vtolctrl {

/// Text of config/default.json as compiled into the library.
const std::string &default_config_text();

/// Parses the file at path, or the built-in default when path is empty.
nlohmann::json load_config_json(const std::optional<std::filesystem::path> &path);

enum class TraceOutput { All, First, None };

/// One "summary" column: a state, its printed label and display unit.
struct SummaryColumn {
    std::size_t state = 0;
    std::string label;
    bool degrees = false;
};

struct RunConfig {
    std::string scenario;
    LinearModel model;
    std::vector<std::string> controllers; ///< subset of pid, lqr, h2, in config order
    std::optional<WeightSpec> lqr_weights;
    std::optional<Matrix> h2_cz, h2_du; ///< H2 performance output
    std::optional<PidCascade> pid;
    SimConfig sim; ///< includes the Dryden parameters
    std::vector<double> saturation;
    TraceOutput traces = TraceOutput::All;
    std::vector<SummaryColumn> summary;
    std::size_t seeds = 1;
    std::uint64_t seed_base = 1;
    std::filesystem::path output_dir;
    std::string config_hash; ///< FNV-1a of the effective configuration

    bool wants(const std::string &controller) const;
};

/// Command-line values that replace the corresponding config fields.
struct Overrides {
    std::optional<std::vector<std::string>> controllers;
    std::optional<std::size_t> seeds;
    std::optional<std::uint64_t> seed_base;
    std::optional<std::string> output_dir;
};

/// Applies overrides to the JSON document before parsing, so the hash
/// describes what actually runs. output_dir precedence: override, then the
/// VTOLCTRL_OUT environment variable, then the file.
void apply_overrides(nlohmann::json &root, const std::string &scenario, const Overrides &overrides);

/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json &root, const std::string &scenario);

struct AeroConfig {
    WingGeometry geometry;
    double rho = 1.225;
    double airspeed = 22.49;
    double alpha_start_deg = 0.0;
    double alpha_end_deg = 10.0;
    double alpha_step_deg = 1.0;
    std::filesystem::path output_dir;
    std::string config_hash;
};

AeroConfig parse_aero_config(const nlohmann::json &root);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string &text);

/// Right pseudo-inverse of the Bu rows selected by rate_states.
Matrix rate_mixer(const LinearModel &model, const std::vector<std::size_t> &rate_states);

std::vector<std::string> split_list(const std::string &csv);

} // namespace vtolctrl
