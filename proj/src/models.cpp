#include "vtolctrl/models.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vtolctrl {

using nlohmann::json;

namespace {

void check_dims(const Matrix &m, std::size_t rows, std::size_t cols, const char *name) {
    if (m.rows() != rows || m.cols() != cols)
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    if (!m.all_finite())
        throw Error(ErrorCode::NonFinite, std::string(name) + " has non-finite entries");
}

} // namespace

std::string to_string(FlightMode mode) { return mode == FlightMode::Level ? "level" : "hover"; }

void WeightSpec::validate(std::size_t n, std::size_t m, const Tolerances &tol) const {
    check_dims(Q, n, n, "Q");
    check_dims(R, m, m, "R");
    if ((Q - Q.transpose()).norm() > 1e-12 * std::max(1.0, Q.norm()))
        throw Error(ErrorCode::NotSymmetric, "Q must be symmetric");
    if ((R - R.transpose()).norm() > 1e-12 * std::max(1.0, R.norm()))
        throw Error(ErrorCode::NotSymmetric, "R must be symmetric");
    if (min_eigenvalue_sym(Q, tol) < -tol.definiteness_slack * std::max(1.0, Q.norm()))
        throw Error(ErrorCode::InvalidArgument, "Q must be positive semidefinite");
    if (!(min_eigenvalue_sym(R, tol) > 0.0))
        throw Error(ErrorCode::InvalidArgument, "R must be positive definite");
}

void LinearModel::validate() const {
    const std::size_t n = A.rows();
    check_dims(A, n, n, "A");
    check_dims(Bu, n, Bu.cols(), "Bu");
    check_dims(Bw, n, Bw.cols(), "Bw");
    check_dims(C, C.rows(), n, "C");
    check_dims(Cz, Cz.rows(), n, "Cz");
    check_dims(Du, Cz.rows(), Bu.cols(), "Du");
    if (!state_names.empty() && state_names.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "state_names length differs from state count");
    if (!input_names.empty() && input_names.size() != Bu.cols())
        throw Error(ErrorCode::DimensionMismatch, "input_names length differs from input count");
}

LinearModel LinearModel::with_weights(const WeightSpec &w) const {
    const std::size_t n = states(), m = inputs();
    w.validate(n, m);
    LinearModel out = *this;
    out.Cz = Matrix(n + m, n);
    out.Cz.set_block(0, 0, sqrt_psd(w.Q));
    out.Du = Matrix(n + m, m);
    out.Du.set_block(n, 0, sqrt_psd(w.R));
    return out;
}

WeightSpec default_level_weights() {
    const double q[] = {1.0, 0.01, 0.01, 10.0};
    const double r[] = {1.0};
    return {Matrix::diag(q), Matrix::diag(r)};
}

WeightSpec default_hover_weights() {
    const double q[] = {50.0, 50.0, 50.0, 1.0, 1.0, 1.0};
    return {Matrix::diag(q), 0.01 * Matrix::identity(4)};
}

LinearModel build_level_model() {
    LinearModel m;
    m.name = "level";
    m.A = Matrix{{0.0, 0.0, 0.0, 1.0},
                 {0.0, 0.0002, -0.0235, -0.1360},
                 {0.0, 0.0011, -0.1793, 20.4845},
                 {0.0, 0.0135, -2.1745, -3.2657}};
    m.Bu = Matrix{{0.0}, {0.0009}, {-0.0407}, {-0.6544}};
    m.Bw = Matrix{{0.0}, {0.0}, {0.0}, {1.0}};
    m.C = Matrix::identity(4);
    m.state_names = {"theta", "u", "w", "q"};
    m.input_names = {"elevon"};
    // Only V is published for this trim; the body split stores it along x.
    m.trim = {FlightMode::Level, 22.49, {0.0, 0.0, 0.0}, {22.49, 0.0, 0.0}};
    return m.with_weights(default_level_weights());
}

LinearModel build_hover_model() {
    LinearModel m;
    m.name = "hover";
    m.A = Matrix(6, 6);
    m.A.set_block(0, 3, Matrix::identity(3));
    m.Bu = Matrix(6, 4);
    m.Bu.set_block(3, 0, Matrix{{-153.5, 153.5, 153.5, -153.5},
                                {36.9, -37.1, 36.9, -37.1},
                                {-1.8, -1.8, 1.8, 1.8}});
    m.Bw = Matrix{{0.0}, {0.0}, {0.0}, {1.0}, {1.0}, {1.0}};
    m.C = Matrix::identity(6);
    m.state_names = {"phi", "theta", "psi", "p", "q", "r"};
    m.input_names = {"pwm1", "pwm2", "pwm3", "pwm4"};
    m.trim = {FlightMode::Hover, 0.0, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    return m.with_weights(default_hover_weights());
}

LinearModel with_three_axis_gust(const LinearModel &hover) {
    if (hover.states() != 6)
        throw Error(ErrorCode::DimensionMismatch, "three-axis gust input needs the 6-state hover model");
    LinearModel out = hover;
    out.name = hover.name + "_3axis_gust";
    out.Bw = Matrix(6, 3);
    out.Bw.set_block(3, 0, Matrix::identity(3));
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json matrix_to_json(const Matrix &m) { return m.to_rows(); }

Matrix matrix_from_json(const json &j, const char *field) {
    if (!j.is_array())
        throw Error(ErrorCode::ParseError, std::string("field '") + field + "' must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto &r = j[i];
        if (!r.is_array())
            throw Error(ErrorCode::ParseError,
                        std::string("field '") + field + "' row " + std::to_string(i) + " is not an array");
        std::vector<double> row;
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (!r[k].is_number())
                throw Error(ErrorCode::ParseError, std::string("field '") + field + "'[" +
                                                       std::to_string(i) + "][" + std::to_string(k) +
                                                       "] is not a number");
            row.push_back(r[k].get<double>());
        }
        rows.push_back(std::move(row));
    }
    try {
        return Matrix::from_rows(rows);
    } catch (const Error &e) {
        throw Error(ErrorCode::DimensionMismatch, std::string("field '") + field + "': " + e.what());
    }
}

const json &require(const json &obj, const char *field) {
    auto it = obj.find(field);
    if (it == obj.end())
        throw Error(ErrorCode::ParseError, std::string("missing field '") + field + "'");
    return *it;
}

std::vector<std::string> names_from_json(const json &j, const char *field) {
    if (!j.is_array())
        throw Error(ErrorCode::ParseError, std::string("field '") + field + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto &s : j) {
        if (!s.is_string())
            throw Error(ErrorCode::ParseError, std::string("field '") + field + "' must hold strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

} // namespace

std::string model_to_json_text(const LinearModel &model) {
    json j;
    j["name"] = model.name;
    j["states"] = model.state_names;
    j["inputs"] = model.input_names;
    j["A"] = matrix_to_json(model.A);
    j["Bu"] = matrix_to_json(model.Bu);
    j["Bw"] = matrix_to_json(model.Bw);
    j["C"] = matrix_to_json(model.C);
    j["Cz"] = matrix_to_json(model.Cz);
    j["Du"] = matrix_to_json(model.Du);
    j["trim"] = {{"flight_mode", to_string(model.trim.mode)},
                 {"airspeed", model.trim.airspeed},
                 {"rates", model.trim.rates},
                 {"body_velocities", model.trim.body_velocity}};
    return j.dump(2) + "\n";
}

LinearModel model_from_json_text(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        // nlohmann reports a byte offset; translate it to a line number
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
            line += text[i] == '\n';
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, "model file must hold a JSON object");

    LinearModel m;
    try {
        m.name = require(j, "name").get<std::string>();
        m.state_names = names_from_json(require(j, "states"), "states");
        m.input_names = names_from_json(require(j, "inputs"), "inputs");
        m.A = matrix_from_json(require(j, "A"), "A");
        m.Bu = matrix_from_json(require(j, "Bu"), "Bu");
        m.Bw = matrix_from_json(require(j, "Bw"), "Bw");
        m.C = matrix_from_json(require(j, "C"), "C");
        m.Cz = matrix_from_json(require(j, "Cz"), "Cz");
        m.Du = matrix_from_json(require(j, "Du"), "Du");
        if (auto it = j.find("trim"); it != j.end()) {
            const json &t = *it;
            const std::string mode = t.value("flight_mode", std::string("level"));
            if (mode != "level" && mode != "hover")
                throw Error(ErrorCode::ParseError, "trim.flight_mode must be 'level' or 'hover'");
            m.trim.mode = mode == "level" ? FlightMode::Level : FlightMode::Hover;
            m.trim.airspeed = t.value("airspeed", 0.0);
            m.trim.rates = t.value("rates", std::vector<double>{0.0, 0.0, 0.0});
            m.trim.body_velocity = t.value("body_velocities", std::vector<double>{0.0, 0.0, 0.0});
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    m.validate();
    return m;
}

LinearModel load_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open model file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return model_from_json_text(ss.str());
    } catch (const Error &e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void save_model(const LinearModel &model, const std::filesystem::path &path) {
    model.validate();
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::InvalidArgument, "cannot write model file " + path.string());
    out << model_to_json_text(model);
}

} // namespace vtolctrl
