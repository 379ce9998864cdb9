// Linearized attitude plants of the hybrid VTOL vehicle and model file I/O.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vtolctrl/linalg.hpp"

namespace vtolctrl {

enum class FlightMode { Level, Hover };

struct TrimPoint {
    FlightMode mode = FlightMode::Level;
    double airspeed = 0.0;                       ///< m/s
    std::vector<double> rates{0.0, 0.0, 0.0};    ///< p, q, r [rad/s]
    std::vector<double> body_velocity{0.0, 0.0, 0.0}; ///< u, v, w [m/s]
};

/// Quadratic weights x'Qx + u'Ru.
struct WeightSpec {
    Matrix Q;
    Matrix R;

    /// Q symmetric PSD (within slack) and R symmetric PD.
    void validate(std::size_t n, std::size_t m, const Tolerances &tol = {}) const;
};

/// dx/dt = A x + Bu u + Bw w,  y = C x,  z = Cz x + Du u.
struct LinearModel {
    std::string name;
    Matrix A, Bu, Bw, C, Cz, Du;
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;
    TrimPoint trim;

    std::size_t states() const noexcept { return A.rows(); }
    std::size_t inputs() const noexcept { return Bu.cols(); }
    std::size_t disturbances() const noexcept { return Bw.cols(); }

    /// Throws DimensionMismatch / NonFinite on inconsistent data.
    void validate() const;

    /// Copy with Cz = [Q^{1/2}; 0] and Du = [0; R^{1/2}], the output
    /// weighting under which H2 and LQR share the same optimal gain.
    LinearModel with_weights(const WeightSpec &w) const;
};

/// Longitudinal model at the level-flight trim (V = 22.49 m/s).
/// States [dtheta, du, dw, dq], input elevon deflection.
LinearModel build_level_model();

/// Hover model. States [dphi, dtheta, dpsi, dp, dq, dr], inputs PWM1..PWM4.
LinearModel build_hover_model();

WeightSpec default_level_weights();
WeightSpec default_hover_weights();

/// Replaces Bw by a widened three-column matrix feeding independent p, q, r
/// gust channels. Not part of the published hover model.
LinearModel with_three_axis_gust(const LinearModel &hover);

LinearModel load_model(const std::filesystem::path &path);
void save_model(const LinearModel &model, const std::filesystem::path &path);

LinearModel model_from_json_text(const std::string &text);
std::string model_to_json_text(const LinearModel &model);

std::string to_string(FlightMode mode);

} // namespace vtolctrl
