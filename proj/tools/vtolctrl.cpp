// vtolctrl: controller synthesis, gust simulation and VLM sweeps for the
// hybrid VTOL attitude study.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vtolctrl/commands.hpp"

namespace {

struct Common {
    std::string config_path;
    std::string scenario = "case1_level";
    std::string controllers;
    std::optional<std::size_t> seeds;
    std::optional<std::uint64_t> seed_base;
    std::optional<std::string> out;
};

void add_common(CLI::App *cmd, Common &c, bool run_flags) {
    cmd->add_option("--config", c.config_path, "JSON config (default: built-in config/default.json)");
    cmd->add_option("--out", c.out, "output directory (overrides VTOLCTRL_OUT and the config)");
    if (!run_flags)
        return;
    cmd->add_option("--scenario", c.scenario, "scenario name, e.g. case1_level, case2_hover");
    cmd->add_option("--controllers", c.controllers, "comma list from pid,lqr,h2");
    cmd->add_option("--seeds", c.seeds, "number of gust seeds")->check(CLI::PositiveNumber);
    cmd->add_option("--seed-base", c.seed_base, "first gust seed");
}

nlohmann::json load(const Common &c) {
    auto root = vtolctrl::load_config_json(c.config_path.empty() ? std::nullopt
                                                                 : std::optional<std::filesystem::path>(c.config_path));
    vtolctrl::Overrides o;
    if (!c.controllers.empty())
        o.controllers = vtolctrl::split_list(c.controllers);
    o.seeds = c.seeds;
    o.seed_base = c.seed_base;
    o.output_dir = c.out;
    vtolctrl::apply_overrides(root, c.scenario, o);
    return root;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Attitude-controller synthesis and simulation for a hybrid VTOL UAV"};
    app.require_subcommand(1);

    Common common;
    std::optional<double> gust_t_final;
    auto *synth = app.add_subcommand("synth", "synthesize LQR/H2 gains and check the LMI certificates");
    auto *simulate = app.add_subcommand("simulate", "multi-seed gust simulation and RMS comparison");
    auto *aero = app.add_subcommand("aero", "vortex-lattice angle-of-attack sweep");
    auto *gust = app.add_subcommand("gust", "export one Dryden gust realization as CSV");
    auto *model = app.add_subcommand("model", "export the scenario's linear model as JSON");
    for (auto *cmd : {synth, simulate, gust, model})
        add_common(cmd, common, true);
    add_common(aero, common, false);
    gust->add_option("--t-final", gust_t_final, "duration in seconds (default: sim.t_final)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : vtolctrl::exit_code::usage;
    }

    try {
        const auto root = load(common);
        if (aero->parsed())
            return vtolctrl::cmd_aero(vtolctrl::parse_aero_config(root), std::cout, std::cerr);
        const auto config = vtolctrl::parse_run_config(root, common.scenario);
        if (synth->parsed())
            return vtolctrl::cmd_synth(config, std::cout, std::cerr);
        if (simulate->parsed())
            return vtolctrl::cmd_simulate(config, std::cout, std::cerr);
        if (gust->parsed())
            return vtolctrl::cmd_gust(config, gust_t_final, std::cout, std::cerr);
        return vtolctrl::cmd_model(config, std::cout, std::cerr);
    } catch (const vtolctrl::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return vtolctrl::exit_code_for(e);
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return vtolctrl::exit_code::usage;
    }
}
