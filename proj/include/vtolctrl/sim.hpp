// Fixed-step closed-loop simulation of the linear plants under state
// feedback or cascaded PID, with Dryden gust disturbance.
#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vtolctrl/linalg.hpp"
#include "vtolctrl/models.hpp"
#include "vtolctrl/wind.hpp"

namespace vtolctrl {

/// One classical Runge-Kutta step of dx/dt = A x + Bu u + Bw w with u and w
/// held over the step. Throws NonFinite if the result is not finite.
std::vector<double> rk4_step(const LinearModel &model, std::span<const double> x, std::span<const double> u,
                             std::span<const double> w, double dt);

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double tau_d = 0.01; ///< derivative filter time constant [s]
    double integral_limit = std::numeric_limits<double>::infinity();

    void validate() const;
};

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    double derivative = 0.0;
    bool primed = false; ///< first call seeds prev_error (no kick from the initial offset)
};

struct PidStep {
    double output;
    PidState state;
};

/// Proportional + trapezoidal integral (clamped) + first-order filtered
/// derivative.
PidStep pid_step(const PidGains &gains, const PidState &state, double error, double dt);

/// One attitude axis: optional outer angle P loop producing a rate setpoint,
/// inner rate PID producing an angular-acceleration command.
struct PidAxis {
    std::optional<std::size_t> angle_state;
    double angle_gain = 0.0;
    std::size_t rate_state = 0;
    PidGains rate;
};

struct PidCascade {
    std::vector<PidAxis> axes;
    Matrix mixer; ///< inputs x axes: angular-acceleration commands -> actuator inputs
};

struct StateFeedback {
    Matrix K; ///< u = K x
};

struct ControllerPolicy {
    std::string name;
    std::variant<StateFeedback, PidCascade> law;
    std::vector<double> saturation; ///< symmetric |u_i| limits; empty = none

    void validate(const LinearModel &model) const;
};

/// Right pseudo-inverse of the rate rows of Bu (states 3..5 for hover).
Matrix hover_mixer(const LinearModel &model);

/// 1 x 1 mixer mapping a pitch angular-acceleration command to elevon.
Matrix level_mixer(const LinearModel &model);

struct SimConfig {
    double dt = 0.002;
    double t_final = 10.0;
    std::vector<double> x0;
    DrydenParams dryden;
    bool gusts = true;
    std::vector<double> reference; ///< constant setpoint; empty = zero

    void validate(const LinearModel &model) const;
};

struct SimTrace {
    std::vector<double> times;
    Matrix states;      ///< samples x n
    Matrix inputs;      ///< samples x m
    Matrix disturbance; ///< samples x nw

    std::size_t size() const noexcept { return times.size(); }
};

/// Throws Diverged when ||x|| exceeds 1e6.
SimTrace simulate(const LinearModel &model, const ControllerPolicy &policy, const SimConfig &config);

struct Metrics {
    std::vector<double> rms;
    std::vector<double> peak;
    std::vector<std::optional<double>> settling_time; ///< nullopt = not settled
};

/// RMS, peak and 5%-band settling time of x - reference per state.
Metrics metrics(const SimTrace &trace, std::span<const double> reference = {});

struct PolicyComparison {
    std::string name;
    std::vector<double> mean_rms;               ///< over non-diverged seeds
    std::vector<std::vector<double>> seed_rms;  ///< per seed, empty if diverged
    std::vector<std::uint64_t> diverged_seeds;
};

/// Runs each policy over seeds seed_base .. seed_base + n_seeds - 1 (the
/// same gust realization per seed for every policy).
std::vector<PolicyComparison> compare(const LinearModel &model, const std::vector<ControllerPolicy> &policies,
                                      const SimConfig &config, std::size_t n_seeds, std::uint64_t seed_base);

/// Single-threaded reference for compare(); results must match exactly.
std::vector<PolicyComparison> compare_serial(const LinearModel &model,
                                             const std::vector<ControllerPolicy> &policies,
                                             const SimConfig &config, std::size_t n_seeds,
                                             std::uint64_t seed_base);

} // namespace vtolctrl
