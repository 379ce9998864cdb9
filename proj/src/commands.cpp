#include "vtolctrl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "vtolctrl/report.hpp"

namespace vtolctrl {

using nlohmann::json;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string display_name(const std::string &c) {
    if (c == "pid")
        return "PID";
    if (c == "lqr")
        return "LQR";
    if (c == "h2")
        return "H2";
    return c;
}

std::string state_name(const LinearModel &m, std::size_t i) {
    return i < m.state_names.size() ? m.state_names[i] : "x" + std::to_string(i + 1);
}

std::filesystem::path scenario_dir(const RunConfig &c) { return c.output_dir / c.scenario; }

void write_json(const std::filesystem::path &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

json rms_object(const LinearModel &m, const std::vector<double> &v) {
    json o = json::object();
    for (std::size_t i = 0; i < v.size(); ++i)
        o[state_name(m, i)] = std::isfinite(v[i]) ? json(v[i]) : json(nullptr);
    return o;
}

double display_value(const SummaryColumn &col, double v) { return col.degrees ? v * kRadToDeg : v; }

} // namespace

int exit_code_for(const Error &e) {
    switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
        return exit_code::usage;
    default:
        return exit_code::numerical;
    }
}

LinearModel h2_model(const RunConfig &config) {
    if (!config.h2_cz || !config.h2_du)
        throw Error(ErrorCode::ConfigError, "field 'scenarios." + config.scenario + ".weights.h2': missing");
    LinearModel m = config.model;
    m.Cz = *config.h2_cz;
    m.Du = *config.h2_du;
    return m;
}

SynthOutcome synthesize_lqr(const RunConfig &config) {
    if (!config.lqr_weights)
        throw Error(ErrorCode::ConfigError, "field 'scenarios." + config.scenario + ".weights.lqr': missing");
    const GainMatrix g = lqr_synthesize(config.model, *config.lqr_weights);
    SynthOutcome s;
    s.controller = "lqr";
    s.K = g.K;
    s.spectral_abscissa = g.spectral_abscissa;
    s.h2_norm = g.h2_norm;
    s.iterations = g.iterations;
    s.residual = g.residual;
    s.theorem = 1;
    s.certificate = lqr_certificate(config.model, *config.lqr_weights, g.K, g.P);
    return s;
}

SynthOutcome synthesize_h2(const RunConfig &config) {
    const LinearModel m = h2_model(config);
    const H2Result h = h2_synthesize(m);
    SynthOutcome s;
    s.controller = "h2";
    s.K = h.K;
    s.spectral_abscissa = h.spectral_abscissa;
    s.gamma = h.gamma;
    s.iterations = h.iterations;
    s.residual = h.residual;
    s.theorem = 2;
    s.certificate = h2_certificate(m, h.K, h.gramian, h.gamma);
    return s;
}

json to_json(const SynthOutcome &s) {
    json j;
    j["controller"] = s.controller;
    j["K"] = s.K.to_rows();
    j["spectral_abscissa"] = s.spectral_abscissa;
    if (s.gamma)
        j["gamma"] = *s.gamma;
    if (s.h2_norm)
        j["h2_norm"] = *s.h2_norm;
    j["iterations"] = s.iterations;
    j["riccati_residual"] = s.residual;
    j["certificate"] = {{"theorem", s.theorem},
                        {"satisfied", s.certificate.satisfied},
                        {"worst_eigenvalue", s.certificate.worst_eigenvalue},
                        {"slack", s.certificate.slack_used}};
    return j;
}

std::vector<ControllerPolicy> build_policies(const RunConfig &config) {
    std::vector<ControllerPolicy> out;
    for (const auto &c : config.controllers) {
        ControllerPolicy p;
        p.name = c;
        p.saturation = config.saturation;
        if (c == "pid") {
            if (!config.pid)
                throw Error(ErrorCode::ConfigError, "field 'scenarios." + config.scenario + ".pid': missing");
            p.law = *config.pid;
        } else if (c == "lqr") {
            p.law = StateFeedback{synthesize_lqr(config).K};
        } else {
            p.law = StateFeedback{synthesize_h2(config).K};
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<ControllerSummary> run_comparison(const RunConfig &config) {
    const auto policies = build_policies(config);
    const auto cmp = compare(config.model, policies, config.sim, config.seeds, config.seed_base);
    std::vector<ControllerSummary> rows;
    for (const auto &c : cmp) {
        ControllerSummary s;
        s.name = c.name;
        s.mean_rms = c.mean_rms;
        s.seed_rms = c.seed_rms;
        s.diverged_seeds = c.diverged_seeds;
        for (const auto &col : config.summary)
            s.columns.push_back(display_value(col, c.mean_rms[col.state]));
        rows.push_back(std::move(s));
    }
    return rows;
}

std::string format_summary_table(const RunConfig &config, const std::vector<ControllerSummary> &rows) {
    std::size_t first = 10;
    for (const auto &r : rows)
        first = std::max(first, display_name(r.name).size() + 2);
    std::ostringstream ss;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(first), "Controller");
    ss << buf;
    for (const auto &col : config.summary)
        ss << "  " << col.label;
    ss << '\n';
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(first), display_name(r.name).c_str());
        ss << buf;
        for (std::size_t i = 0; i < config.summary.size(); ++i) {
            const int width = static_cast<int>(config.summary[i].label.size());
            std::snprintf(buf, sizeof buf, "  %*.4f", width, r.columns[i]);
            ss << buf;
        }
        ss << '\n';
    }
    return ss.str();
}

int cmd_synth(const RunConfig &config, std::ostream &out, std::ostream &err) {
    const auto dir = scenario_dir(config) / "gains";
    int code = exit_code::ok;
    for (const auto &c : config.controllers) {
        if (c == "pid") {
            out << "pid: no synthesis step (gains come from the config)\n";
            continue;
        }
        try {
            const SynthOutcome s = c == "lqr" ? synthesize_lqr(config) : synthesize_h2(config);
            write_json(dir / (c + ".json"), to_json(s));
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s: Theorem %d certificate %s (worst eigenvalue %.3e, slack %.3e)",
                          c.c_str(), s.theorem, s.certificate.satisfied ? "satisfied" : "VIOLATED",
                          s.certificate.worst_eigenvalue, s.certificate.slack_used);
            out << buf << "; spectral abscissa " << s.spectral_abscissa;
            if (s.gamma)
                out << ", gamma " << *s.gamma;
            out << '\n';
            if (!s.certificate.satisfied)
                code = std::max(code, exit_code::numerical);
        } catch (const Error &e) {
            err << c << ": " << e.what() << '\n';
            code = std::max(code, exit_code_for(e));
        }
    }
    return code;
}

int cmd_simulate(const RunConfig &config, std::ostream &out, std::ostream &err) {
    const auto dir = scenario_dir(config);
    const auto policies = build_policies(config);
    const auto cmp = compare(config.model, policies, config.sim, config.seeds, config.seed_base);
    std::vector<ControllerSummary> rows;
    int code = exit_code::ok;
    for (const auto &c : cmp) {
        ControllerSummary s{c.name, c.mean_rms, {}, c.seed_rms, c.diverged_seeds};
        for (const auto &col : config.summary)
            s.columns.push_back(display_value(col, c.mean_rms[col.state]));
        if (!c.diverged_seeds.empty()) {
            err << "warning: " << c.name << " diverged for " << c.diverged_seeds.size() << " seed(s):";
            for (auto seed : c.diverged_seeds)
                err << ' ' << seed;
            err << " (excluded from means)\n";
        }
        if (c.diverged_seeds.size() == config.seeds)
            code = exit_code::numerical;
        rows.push_back(std::move(s));
    }

    // Traces and per-run metrics for the requested seeds; reruns are cheap
    // and bitwise identical to the compared runs.
    const std::size_t trace_seeds =
        config.traces == TraceOutput::All ? config.seeds : config.traces == TraceOutput::First ? 1 : 0;
    json per_run = json::array();
    std::vector<std::optional<SimTrace>> first(policies.size());
    for (std::size_t p = 0; p < policies.size(); ++p) {
        for (std::size_t k = 0; k < std::max<std::size_t>(trace_seeds, 1); ++k) {
            const std::uint64_t seed = config.seed_base + k;
            SimConfig sc = config.sim;
            sc.dryden.seed = seed;
            SimTrace tr;
            try {
                tr = simulate(config.model, policies[p], sc);
            } catch (const Error &e) {
                if (e.code() != ErrorCode::Diverged && e.code() != ErrorCode::NonFinite)
                    throw;
                per_run.push_back({{"controller", policies[p].name}, {"seed", seed}, {"diverged", true}});
                continue;
            }
            if (k < trace_seeds) {
                write_trace_csv(dir / "traces" / (policies[p].name + "_seed" + std::to_string(seed) + ".csv"),
                                config.model, tr);
                const Metrics mt = metrics(tr, config.sim.reference);
                json settle = json::object();
                for (std::size_t i = 0; i < mt.settling_time.size(); ++i)
                    settle[state_name(config.model, i)] =
                        mt.settling_time[i] ? json(*mt.settling_time[i]) : json(nullptr);
                per_run.push_back({{"controller", policies[p].name},
                                   {"seed", seed},
                                   {"rms", rms_object(config.model, mt.rms)},
                                   {"peak", rms_object(config.model, mt.peak)},
                                   {"settling_time", settle}});
            }
            if (k == 0)
                first[p] = std::move(tr);
        }
    }

    for (const auto &col : config.summary) {
        std::vector<PlotSeries> series;
        for (std::size_t p = 0; p < policies.size(); ++p) {
            if (!first[p])
                continue;
            PlotSeries s{display_name(policies[p].name), first[p]->times, first[p]->states.col(col.state)};
            for (double &v : s.y)
                v = display_value(col, v);
            series.push_back(std::move(s));
        }
        const std::string name = state_name(config.model, col.state);
        write_text(dir / ("compare_" + name + ".svg"),
                   render_svg(config.scenario + ": " + col.label + ", seed " + std::to_string(config.seed_base),
                              "t (s)", col.label, series));
    }

    json summary;
    summary["scenario"] = config.scenario;
    summary["config_hash"] = config.config_hash;
    summary["seeds"] = config.seeds;
    summary["seed_base"] = config.seed_base;
    json labels = json::array();
    for (const auto &col : config.summary)
        labels.push_back(col.label);
    summary["columns"] = labels;
    json ctrl = json::array();
    json seeds_json = json::array();
    for (const auto &r : rows) {
        json values = json::array();
        for (double v : r.columns)
            values.push_back(std::isfinite(v) ? json(v) : json(nullptr));
        ctrl.push_back({{"name", r.name},
                        {"values", values},
                        {"mean_rms", rms_object(config.model, r.mean_rms)},
                        {"diverged_seeds", r.diverged_seeds}});
        json per_seed = json::array();
        for (std::size_t k = 0; k < r.seed_rms.size(); ++k)
            per_seed.push_back({{"seed", config.seed_base + k},
                                {"rms", r.seed_rms[k].empty() ? json(nullptr) : rms_object(config.model, r.seed_rms[k])}});
        seeds_json.push_back({{"name", r.name}, {"per_seed", per_seed}});
    }
    summary["controllers"] = ctrl;
    write_json(dir / "summary.json", summary);
    write_json(dir / "metrics.json", {{"scenario", config.scenario},
                                      {"config_hash", config.config_hash},
                                      {"controllers", seeds_json},
                                      {"traced_runs", per_run}});

    const std::string table = format_summary_table(config, rows);
    write_text(dir / "summary.txt", table);
    out << "Scenario " << config.scenario << ": mean RMS over " << config.seeds << " seed(s) from "
        << config.seed_base << " (config " << config.config_hash << ")\n"
        << table;
    return code;
}

int cmd_aero(const AeroConfig &config, std::ostream &out, std::ostream &) {
    const auto rows = alpha_sweep(config.geometry, config.alpha_start_deg, config.alpha_end_deg,
                                  config.alpha_step_deg, config.rho, config.airspeed);
    const auto dir = config.output_dir / "aero";
    write_polar_csv(dir / "polar.csv", rows);
    PlotSeries cl{"CL", {}, {}}, cdi{"CDi x 10", {}, {}}, cm{"Cm", {}, {}};
    for (const auto &r : rows) {
        for (auto *s : {&cl, &cdi, &cm})
            s->x.push_back(r.alpha_deg);
        cl.y.push_back(r.CL);
        cdi.y.push_back(10.0 * r.CDi);
        cm.y.push_back(r.Cm);
    }
    write_text(dir / "polar.svg", render_svg("VLM polar", "alpha (deg)", "coefficient", {cl, cdi, cm}));
    const PanelGrid grid = build_panels(config.geometry);
    out << "VLM: " << grid.panels.size() << " panels, area " << grid.area << " m^2, "
        << rows.size() << " angles -> " << (dir / "polar.csv").string() << '\n';
    out << "alpha_deg,CL,CDi,Cm\n";
    for (const auto &r : rows)
        out << format_number(r.alpha_deg) << ',' << format_number(r.CL) << ',' << format_number(r.CDi) << ','
            << format_number(r.Cm) << '\n';
    return exit_code::ok;
}

int cmd_gust(const RunConfig &config, std::optional<double> t_final, std::ostream &out, std::ostream &) {
    DrydenParams p = config.sim.dryden;
    p.seed = config.seed_base;
    const double tf = t_final.value_or(config.sim.t_final);
    if (!(tf > 0.0))
        throw Error(ErrorCode::ConfigError, "field 't_final': must be positive");
    const GustRealization g = generate(p, tf);
    const auto path = scenario_dir(config) / ("gust_seed" + std::to_string(p.seed) + ".csv");
    write_gust_csv(path, g);
    out << "wrote " << g.size() << " gust samples to " << path.string() << '\n';
    return exit_code::ok;
}

int cmd_model(const RunConfig &config, std::ostream &out, std::ostream &) {
    const auto path = scenario_dir(config) / "model.json";
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    save_model(config.model, path);
    out << "wrote " << path.string() << '\n';
    return exit_code::ok;
}

} // namespace vtolctrl
