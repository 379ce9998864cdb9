#include "vtolctrl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vtolctrl/default_config.hpp"

namespace vtolctrl {

using nlohmann::json;

namespace {

// The output location does not change results, so it is left out of the hash.
std::string config_hash(const json &root) {
    json copy = root;
    if (copy.is_object())
        copy.erase("output_dir");
    return fnv1a_hex(copy.dump());
}

[[noreturn]] void fail(const std::string &field, const std::string &what) {
    throw Error(ErrorCode::ConfigError, "field '" + field + "': " + what);
}

const json &require(const json &obj, const std::string &key, const std::string &path) {
    if (!obj.is_object() || !obj.contains(key))
        fail(path.empty() ? key : path + "." + key, "missing");
    return obj.at(key);
}

double number(const json &j, const std::string &path) {
    if (!j.is_number())
        fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        fail(path, "must be finite");
    return v;
}

double number_or(const json &obj, const std::string &key, const std::string &path, double fallback) {
    return obj.contains(key) ? number(obj.at(key), path + "." + key) : fallback;
}

std::size_t count(const json &j, const std::string &path) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

std::vector<double> vector_of(const json &j, const std::string &path) {
    if (!j.is_array())
        fail(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

Matrix matrix_of(const json &j, const std::string &path) {
    if (!j.is_array() || j.empty())
        fail(path, "expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        rows.push_back(vector_of(j[i], path + "[" + std::to_string(i) + "]"));
        if (rows.back().size() != rows.front().size() || rows.back().empty())
            fail(path, "rows must be non-empty and of equal length");
    }
    return Matrix::from_rows(rows);
}

Matrix sqrt_diag(const std::vector<double> &d, const std::string &path) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] < 0.0)
            fail(path, "diagonal weights must be non-negative");
        m(i, i) = std::sqrt(d[i]);
    }
    return m;
}

// Q/R pair from either {Q_diag, R_diag} or full {Q, R}.
std::pair<Matrix, Matrix> qr_pair(const json &w, const std::string &path) {
    if (w.contains("Q_diag") || w.contains("R_diag"))
        return {Matrix::diag(vector_of(require(w, "Q_diag", path), path + ".Q_diag")),
                Matrix::diag(vector_of(require(w, "R_diag", path), path + ".R_diag"))};
    return {matrix_of(require(w, "Q", path), path + ".Q"), matrix_of(require(w, "R", path), path + ".R")};
}

LinearModel model_of(const json &sc, const std::string &path) {
    LinearModel m;
    if (sc.contains("model_file")) {
        if (!sc.at("model_file").is_string())
            fail(path + ".model_file", "expected a path string");
        m = load_model(sc.at("model_file").get<std::string>());
    } else {
        const json &name = require(sc, "model", path);
        if (name == "level")
            m = build_level_model();
        else if (name == "hover")
            m = build_hover_model();
        else
            fail(path + ".model", "expected \"level\", \"hover\" or a model_file entry");
    }
    if (sc.value("three_axis_gust", false))
        m = with_three_axis_gust(m);
    return m;
}

std::size_t state_index(const LinearModel &m, const json &j, const std::string &path) {
    if (j.is_string()) {
        const auto it = std::find(m.state_names.begin(), m.state_names.end(), j.get<std::string>());
        if (it == m.state_names.end())
            fail(path, "unknown state '" + j.get<std::string>() + "'");
        return static_cast<std::size_t>(it - m.state_names.begin());
    }
    const std::size_t i = count(j, path);
    if (i >= m.states())
        fail(path, "state index out of range");
    return i;
}

PidCascade pid_of(const LinearModel &model, const json &p, const std::string &path) {
    PidCascade c;
    const json &axes = require(p, "axes", path);
    if (!axes.is_array() || axes.empty())
        fail(path + ".axes", "expected a non-empty array");
    std::vector<std::size_t> rate_states;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string ap = path + ".axes[" + std::to_string(i) + "]";
        const json &a = axes[i];
        PidAxis ax;
        ax.rate_state = state_index(model, require(a, "rate_state", ap), ap + ".rate_state");
        if (a.contains("angle_state") && !a.at("angle_state").is_null()) {
            ax.angle_state = state_index(model, a.at("angle_state"), ap + ".angle_state");
            ax.angle_gain = number(require(a, "angle_gain", ap), ap + ".angle_gain");
        }
        ax.rate.kp = number_or(a, "kp", ap, 0.0);
        ax.rate.ki = number_or(a, "ki", ap, 0.0);
        ax.rate.kd = number_or(a, "kd", ap, 0.0);
        ax.rate.tau_d = number_or(a, "tau_d", ap, 0.01);
        if (a.contains("integral_limit") && !a.at("integral_limit").is_null())
            ax.rate.integral_limit = number(a.at("integral_limit"), ap + ".integral_limit");
        try {
            ax.rate.validate();
        } catch (const Error &e) {
            fail(ap, e.what());
        }
        rate_states.push_back(ax.rate_state);
        c.axes.push_back(ax);
    }
    const std::string mode = p.value("mixer", std::string("pseudo_inverse"));
    if (mode == "direct") {
        if (model.inputs() != c.axes.size())
            fail(path + ".mixer", "\"direct\" needs one axis per input");
        c.mixer = Matrix::identity(model.inputs());
    } else if (mode == "pseudo_inverse") {
        try {
            c.mixer = rate_mixer(model, rate_states);
        } catch (const Error &e) {
            fail(path + ".mixer", e.what());
        }
    } else {
        fail(path + ".mixer", "expected \"direct\" or \"pseudo_inverse\"");
    }
    return c;
}

} // namespace

const std::string &default_config_text() {
    static const std::string text = detail::kDefaultConfigJson;
    return text;
}

json load_config_json(const std::optional<std::filesystem::path> &path) {
    std::string text;
    std::string where = "built-in default config";
    if (path) {
        std::ifstream in(*path);
        if (!in)
            throw Error(ErrorCode::ConfigError, "cannot open config file " + path->string());
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
        where = path->string();
    } else {
        text = default_config_text();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
}

bool RunConfig::wants(const std::string &controller) const {
    return std::find(controllers.begin(), controllers.end(), controller) != controllers.end();
}

void apply_overrides(json &root, const std::string &scenario, const Overrides &o) {
    if (!root.is_object())
        fail("<root>", "expected a JSON object");
    if (o.controllers) {
        if (!root.contains("scenarios") || !root["scenarios"].contains(scenario))
            fail("scenarios." + scenario, "missing");
        root["scenarios"][scenario]["controllers"] = *o.controllers;
    }
    if (o.seeds)
        root["seeds"] = *o.seeds;
    if (o.seed_base)
        root["seed_base"] = *o.seed_base;
    if (o.output_dir)
        root["output_dir"] = *o.output_dir;
    else if (const char *env = std::getenv("VTOLCTRL_OUT"); env && *env)
        root["output_dir"] = env;
}

RunConfig parse_run_config(const json &root, const std::string &scenario) {
    const json &scenarios = require(root, "scenarios", "");
    const std::string path = "scenarios." + scenario;
    const json &sc = require(scenarios, scenario, "scenarios");

    RunConfig rc;
    rc.scenario = scenario;
    rc.config_hash = config_hash(root);
    try {
        rc.model = model_of(sc, path);
    } catch (const Error &e) {
        if (e.code() == ErrorCode::ConfigError)
            throw;
        fail(path + ".model", e.what());
    }
    const LinearModel &model = rc.model;
    const std::size_t n = model.states(), m = model.inputs();

    const json &ctrl = require(sc, "controllers", path);
    if (!ctrl.is_array() || ctrl.empty())
        fail(path + ".controllers", "expected a non-empty array");
    for (const auto &c : ctrl) {
        if (!c.is_string() || (c != "pid" && c != "lqr" && c != "h2"))
            fail(path + ".controllers", "entries must be \"pid\", \"lqr\" or \"h2\"");
        if (!rc.wants(c.get<std::string>()))
            rc.controllers.push_back(c.get<std::string>());
    }

    if (rc.wants("lqr") || rc.wants("h2")) {
        const json &w = require(sc, "weights", path);
        const std::string wp = path + ".weights";
        if (rc.wants("lqr")) {
            auto [q, r] = qr_pair(require(w, "lqr", wp), wp + ".lqr");
            WeightSpec ws{q, r};
            try {
                ws.validate(n, m);
            } catch (const Error &e) {
                fail(wp + ".lqr", e.what());
            }
            rc.lqr_weights = ws;
        }
        if (rc.wants("h2")) {
            const json &h = require(w, "h2", wp);
            const std::string hp = wp + ".h2";
            Matrix cz, du;
            if (h.contains("Cz") || h.contains("Du")) {
                cz = matrix_of(require(h, "Cz", hp), hp + ".Cz");
                du = matrix_of(require(h, "Du", hp), hp + ".Du");
            } else {
                // Du^T Du is left as given: a zero R entry must surface as
                // SingularFeedthrough at synthesis time, not as a config error.
                const auto q = vector_of(require(h, "Q_diag", hp), hp + ".Q_diag");
                const auto r = vector_of(require(h, "R_diag", hp), hp + ".R_diag");
                if (q.size() != n || r.size() != m)
                    fail(hp, "Q_diag needs " + std::to_string(n) + " and R_diag " + std::to_string(m) + " entries");
                cz = Matrix(n + m, n);
                du = Matrix(n + m, m);
                cz.set_block(0, 0, sqrt_diag(q, hp + ".Q_diag"));
                du.set_block(n, 0, sqrt_diag(r, hp + ".R_diag"));
            }
            if (cz.cols() != n || du.cols() != m || cz.rows() != du.rows())
                fail(hp, "Cz must be z x " + std::to_string(n) + " and Du z x " + std::to_string(m));
            rc.h2_cz = cz;
            rc.h2_du = du;
        }
    }

    if (rc.wants("pid"))
        rc.pid = pid_of(model, require(sc, "pid", path), path + ".pid");

    const json &d = require(sc, "dryden", path);
    const std::string dp = path + ".dryden";
    DrydenParams dry;
    dry.mean_wind_20ft = number_or(d, "mean_wind_20ft", dp, dry.mean_wind_20ft);
    dry.altitude = number_or(d, "altitude", dp, dry.altitude);
    dry.wingspan = number_or(d, "wingspan", dp, dry.wingspan);
    dry.airspeed = number_or(d, "airspeed", dp, dry.airspeed);

    const json &s = require(sc, "sim", path);
    const std::string sp = path + ".sim";
    rc.sim.dt = number_or(s, "dt", sp, rc.sim.dt);
    rc.sim.t_final = number_or(s, "t_final", sp, rc.sim.t_final);
    rc.sim.x0 = s.contains("x0") ? vector_of(s.at("x0"), sp + ".x0") : std::vector<double>(n, 0.0);
    if (s.contains("reference"))
        rc.sim.reference = vector_of(s.at("reference"), sp + ".reference");
    rc.sim.gusts = s.value("gusts", true);
    dry.dt = rc.sim.dt;
    rc.sim.dryden = dry;
    try {
        dry.validate();
    } catch (const Error &e) {
        fail(dp, e.what());
    }
    try {
        rc.sim.validate(model);
    } catch (const Error &e) {
        fail(sp, e.what());
    }
    const std::string traces = s.value("traces", std::string("all"));
    if (traces == "all")
        rc.traces = TraceOutput::All;
    else if (traces == "first")
        rc.traces = TraceOutput::First;
    else if (traces == "none")
        rc.traces = TraceOutput::None;
    else
        fail(sp + ".traces", "expected \"all\", \"first\" or \"none\"");

    if (sc.contains("saturation") && !sc.at("saturation").is_null()) {
        rc.saturation = vector_of(sc.at("saturation"), path + ".saturation");
        if (rc.saturation.size() != m)
            fail(path + ".saturation", "one limit per input required");
        for (double v : rc.saturation)
            if (!(v > 0.0))
                fail(path + ".saturation", "limits must be positive");
    }

    if (sc.contains("summary")) {
        const json &cols = sc.at("summary");
        if (!cols.is_array())
            fail(path + ".summary", "expected an array");
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const std::string cp = path + ".summary[" + std::to_string(i) + "]";
            SummaryColumn col;
            col.state = state_index(model, require(cols[i], "state", cp), cp + ".state");
            col.label = cols[i].value("label", model.state_names.empty() ? "x" + std::to_string(col.state)
                                                                         : model.state_names[col.state]);
            const std::string unit = cols[i].value("unit", std::string("rad"));
            if (unit != "rad" && unit != "deg")
                fail(cp + ".unit", "expected \"rad\" or \"deg\"");
            col.degrees = unit == "deg";
            rc.summary.push_back(col);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            rc.summary.push_back({i, model.state_names.empty() ? "x" + std::to_string(i) : model.state_names[i], false});
    }

    if (root.contains("seeds")) {
        rc.seeds = count(root.at("seeds"), "seeds");
        if (rc.seeds == 0)
            fail("seeds", "must be at least 1");
    }
    if (root.contains("seed_base")) {
        if (!root.at("seed_base").is_number_unsigned() && !root.at("seed_base").is_number_integer())
            fail("seed_base", "expected an integer");
        rc.seed_base = root.at("seed_base").get<std::uint64_t>();
    }
    rc.output_dir = root.value("output_dir", std::string("out"));
    return rc;
}

AeroConfig parse_aero_config(const json &root) {
    AeroConfig ac;
    ac.config_hash = config_hash(root);
    ac.output_dir = root.value("output_dir", std::string("out"));
    const json empty = json::object();
    const json &a = root.contains("aero") ? root.at("aero") : empty;
    WingGeometry &g = ac.geometry;
    g.span = number_or(a, "span", "aero", g.span);
    g.root_chord = number_or(a, "root_chord", "aero", g.root_chord);
    g.tip_chord = number_or(a, "tip_chord", "aero", g.tip_chord);
    g.sweep = number_or(a, "sweep_deg", "aero", g.sweep * 180.0 / std::numbers::pi) * std::numbers::pi / 180.0;
    if (a.contains("spanwise_panels"))
        g.spanwise_panels = count(a.at("spanwise_panels"), "aero.spanwise_panels");
    if (a.contains("chordwise_panels"))
        g.chordwise_panels = count(a.at("chordwise_panels"), "aero.chordwise_panels");
    g.x_cg = number_or(a, "x_cg", "aero", g.x_cg);
    try {
        g.validate();
    } catch (const Error &e) {
        fail("aero", e.what());
    }
    ac.rho = number_or(a, "rho", "aero", ac.rho);
    ac.airspeed = number_or(a, "airspeed", "aero", ac.airspeed);
    ac.alpha_start_deg = number_or(a, "alpha_start_deg", "aero", ac.alpha_start_deg);
    ac.alpha_end_deg = number_or(a, "alpha_end_deg", "aero", ac.alpha_end_deg);
    ac.alpha_step_deg = number_or(a, "alpha_step_deg", "aero", ac.alpha_step_deg);
    if (!(ac.rho > 0.0) || !(ac.airspeed > 0.0))
        fail("aero", "rho and airspeed must be positive");
    if (!(ac.alpha_step_deg > 0.0) || ac.alpha_end_deg < ac.alpha_start_deg)
        fail("aero", "alpha sweep needs step > 0 and end >= start");
    if (std::max(std::abs(ac.alpha_start_deg), std::abs(ac.alpha_end_deg)) >= 15.0)
        fail("aero", "alpha sweep must stay within |alpha| < 15 deg");
    return ac;
}

std::string fnv1a_hex(const std::string &text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Matrix rate_mixer(const LinearModel &model, const std::vector<std::size_t> &rate_states) {
    Matrix rows(rate_states.size(), model.inputs());
    for (std::size_t i = 0; i < rate_states.size(); ++i)
        for (std::size_t j = 0; j < model.inputs(); ++j)
            rows(i, j) = model.Bu(rate_states[i], j);
    return right_pseudo_inverse(rows);
}

std::vector<std::string> split_list(const std::string &csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

} // namespace vtolctrl
