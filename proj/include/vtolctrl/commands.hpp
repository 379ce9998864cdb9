// CLI commands. Each returns a process exit code: 0 success, 1 usage or
// config error, 2 numerical or certificate failure.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtolctrl/config.hpp"
#include "vtolctrl/synthesis.hpp"

namespace vtolctrl {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int numerical = 2;
} // namespace exit_code

/// Config, parse and I/O problems map to 1; everything else to 2.
int exit_code_for(const Error &e);

struct SynthOutcome {
    std::string controller;
    Matrix K;
    double spectral_abscissa = 0.0;
    std::optional<double> gamma;   ///< h2 only
    std::optional<double> h2_norm; ///< lqr: norm under its cost-equivalent output
    int iterations = 0;
    double residual = 0.0;
    int theorem = 1;
    CertificateReport certificate;
};

/// The run's model with Cz, Du replaced by the configured H2 output.
LinearModel h2_model(const RunConfig &config);

SynthOutcome synthesize_lqr(const RunConfig &config);
SynthOutcome synthesize_h2(const RunConfig &config);
nlohmann::json to_json(const SynthOutcome &s);

/// Policies for config.controllers in order; synthesizes gains as needed.
std::vector<ControllerPolicy> build_policies(const RunConfig &config);

struct ControllerSummary {
    std::string name;
    std::vector<double> mean_rms; ///< per state, internal units
    std::vector<double> columns;  ///< config.summary columns, display units
    std::vector<std::vector<double>> seed_rms;
    std::vector<std::uint64_t> diverged_seeds;
};

/// Multi-seed comparison of the configured controllers.
std::vector<ControllerSummary> run_comparison(const RunConfig &config);

/// Table with controllers as rows and config.summary labels as columns.
std::string format_summary_table(const RunConfig &config, const std::vector<ControllerSummary> &rows);

int cmd_synth(const RunConfig &config, std::ostream &out, std::ostream &err);
int cmd_simulate(const RunConfig &config, std::ostream &out, std::ostream &err);
int cmd_aero(const AeroConfig &config, std::ostream &out, std::ostream &err);
int cmd_gust(const RunConfig &config, std::optional<double> t_final, std::ostream &out, std::ostream &err);
int cmd_model(const RunConfig &config, std::ostream &out, std::ostream &err);

} // namespace vtolctrl
