#include "vtolctrl/sim.hpp"

#include <algorithm>
#include <cmath>

namespace vtolctrl {

namespace {

constexpr double kDivergenceNorm = 1e6;

void add_product(std::vector<double> &out, const Matrix &m, std::span<const double> v, double scale = 1.0) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            s += m(i, j) * v[j];
        out[i] += scale * s;
    }
}

} // namespace

std::vector<double> rk4_step(const LinearModel &model, std::span<const double> x, std::span<const double> u,
                             std::span<const double> w, double dt) {
    const std::size_t n = model.states();
    if (x.size() != n || u.size() != model.inputs() || w.size() != model.disturbances())
        throw Error(ErrorCode::DimensionMismatch, "rk4_step: vector sizes do not match the model");

    // constant forcing Bu u + Bw w over the step
    std::vector<double> forcing(n, 0.0);
    add_product(forcing, model.Bu, u);
    add_product(forcing, model.Bw, w);

    auto deriv = [&](std::span<const double> s) {
        std::vector<double> d = forcing;
        add_product(d, model.A, s);
        return d;
    };
    auto offset = [&](const std::vector<double> &k, double h) {
        std::vector<double> s(x.begin(), x.end());
        for (std::size_t i = 0; i < n; ++i)
            s[i] += h * k[i];
        return s;
    };

    const auto k1 = deriv(x);
    const auto k2 = deriv(offset(k1, 0.5 * dt));
    const auto k3 = deriv(offset(k2, 0.5 * dt));
    const auto k4 = deriv(offset(k3, dt));
    std::vector<double> next(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) {
        next[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(next[i]))
            throw Error(ErrorCode::NonFinite, "state left the finite range");
    }
    return next;
}

void PidGains::validate() const {
    if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd))
        throw Error(ErrorCode::InvalidArgument, "PID gains must be finite");
    if (!(tau_d > 0.0))
        throw Error(ErrorCode::InvalidArgument, "derivative filter time constant must be positive");
    if (!(integral_limit > 0.0))
        throw Error(ErrorCode::InvalidArgument, "integral limit must be positive");
}

PidStep pid_step(const PidGains &g, const PidState &state, double error, double dt) {
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidArgument, "pid_step: dt must be positive");
    PidState s = state;
    if (!s.primed) {
        s.prev_error = error;
        s.primed = true;
    }
    s.integral = std::clamp(s.integral + 0.5 * dt * (error + s.prev_error), -g.integral_limit, g.integral_limit);
    s.derivative = (g.tau_d * s.derivative + (error - s.prev_error)) / (g.tau_d + dt);
    s.prev_error = error;
    return {g.kp * error + g.ki * s.integral + g.kd * s.derivative, s};
}

Matrix hover_mixer(const LinearModel &model) {
    if (model.states() != 6 || model.inputs() != 4)
        throw Error(ErrorCode::DimensionMismatch, "hover mixer needs the 6-state, 4-input model");
    return right_pseudo_inverse(model.Bu.block(3, 0, 3, 4));
}

Matrix level_mixer(const LinearModel &model) {
    if (model.states() != 4 || model.inputs() != 1)
        throw Error(ErrorCode::DimensionMismatch, "level mixer needs the 4-state, 1-input model");
    return right_pseudo_inverse(model.Bu.block(3, 0, 1, 1));
}

void ControllerPolicy::validate(const LinearModel &model) const {
    const std::size_t n = model.states(), m = model.inputs();
    if (const auto *sf = std::get_if<StateFeedback>(&law)) {
        if (sf->K.rows() != m || sf->K.cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "policy '" + name + "': K must be inputs x states");
        if (!sf->K.all_finite())
            throw Error(ErrorCode::NonFinite, "policy '" + name + "': K has non-finite entries");
    } else {
        const auto &pid = std::get<PidCascade>(law);
        if (pid.mixer.rows() != m || pid.mixer.cols() != pid.axes.size())
            throw Error(ErrorCode::DimensionMismatch, "policy '" + name + "': mixer must be inputs x axes");
        for (const auto &ax : pid.axes) {
            ax.rate.validate();
            if (ax.rate_state >= n || (ax.angle_state && *ax.angle_state >= n))
                throw Error(ErrorCode::DimensionMismatch, "policy '" + name + "': PID axis state index out of range");
            if (!std::isfinite(ax.angle_gain))
                throw Error(ErrorCode::InvalidArgument, "policy '" + name + "': angle gain must be finite");
        }
    }
    if (!saturation.empty() && saturation.size() != m)
        throw Error(ErrorCode::DimensionMismatch, "policy '" + name + "': one saturation limit per input");
}

void SimConfig::validate(const LinearModel &model) const {
    if (!(dt > 0.0) || !(t_final >= dt))
        throw Error(ErrorCode::InvalidArgument, "simulation needs dt > 0 and t_final >= dt");
    if (x0.size() != model.states())
        throw Error(ErrorCode::DimensionMismatch, "x0 has " + std::to_string(x0.size()) + " entries, model has " +
                                                      std::to_string(model.states()) + " states");
    if (!reference.empty() && reference.size() != model.states())
        throw Error(ErrorCode::DimensionMismatch, "reference must have one entry per state");
}

SimTrace simulate(const LinearModel &model, const ControllerPolicy &policy, const SimConfig &config) {
    model.validate();
    policy.validate(model);
    config.validate(model);
    const std::size_t n = model.states(), m = model.inputs(), nw = model.disturbances();
    const auto steps = static_cast<std::size_t>(std::llround(config.t_final / config.dt));
    const std::vector<double> ref = config.reference.empty() ? std::vector<double>(n, 0.0) : config.reference;

    Matrix wseries(steps + 1, nw);
    if (config.gusts) {
        DrydenParams dp = config.dryden;
        dp.dt = config.dt;
        wseries = disturbance_channel(generate(dp, config.t_final), model);
    }

    SimTrace tr;
    tr.times.resize(steps + 1);
    tr.states = Matrix(steps + 1, n);
    tr.inputs = Matrix(steps + 1, m);
    tr.disturbance = wseries;

    const auto *sf = std::get_if<StateFeedback>(&policy.law);
    const auto *pid = std::get_if<PidCascade>(&policy.law);
    std::vector<PidState> pid_states(pid ? pid->axes.size() : 0);
    std::vector<double> cmd(pid ? pid->axes.size() : 0);

    std::vector<double> x = config.x0;
    std::vector<double> u(m), w(nw);
    for (std::size_t k = 0; k <= steps; ++k) {
        tr.times[k] = static_cast<double>(k) * config.dt;
        if (sf) {
            std::vector<double> err(n);
            for (std::size_t i = 0; i < n; ++i)
                err[i] = x[i] - ref[i];
            u = mat_vec(sf->K, err);
        } else {
            for (std::size_t a = 0; a < pid->axes.size(); ++a) {
                const PidAxis &ax = pid->axes[a];
                double rate_sp = ref[ax.rate_state];
                if (ax.angle_state)
                    rate_sp += ax.angle_gain * (ref[*ax.angle_state] - x[*ax.angle_state]);
                const PidStep st = pid_step(ax.rate, pid_states[a], rate_sp - x[ax.rate_state], config.dt);
                pid_states[a] = st.state;
                cmd[a] = st.output;
            }
            u = mat_vec(pid->mixer, cmd);
        }
        for (std::size_t i = 0; i < policy.saturation.size(); ++i)
            u[i] = std::clamp(u[i], -policy.saturation[i], policy.saturation[i]);
        for (std::size_t j = 0; j < nw; ++j)
            w[j] = wseries(k, j);

        std::copy(x.begin(), x.end(), tr.states.row(k).begin());
        std::copy(u.begin(), u.end(), tr.inputs.row(k).begin());

        if (k < steps) {
            x = rk4_step(model, x, u, w, config.dt);
            double nrm = 0.0;
            for (double v : x)
                nrm += v * v;
            if (std::sqrt(nrm) > kDivergenceNorm)
                throw Error(ErrorCode::Diverged, "policy '" + policy.name + "' diverged at t = " +
                                                     std::to_string(tr.times[k] + config.dt) + " s");
        }
    }
    return tr;
}

Metrics metrics(const SimTrace &trace, std::span<const double> reference) {
    const std::size_t samples = trace.size();
    if (samples == 0)
        throw Error(ErrorCode::EmptyTrace, "metrics of an empty trace");
    const std::size_t n = trace.states.cols();
    if (!reference.empty() && reference.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "reference must have one entry per state");

    Metrics out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<std::optional<double>>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double r = reference.empty() ? 0.0 : reference[i];
        double sq = 0.0, peak = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const double e = trace.states(k, i) - r;
            sq += e * e;
            peak = std::max(peak, std::abs(e));
        }
        out.rms[i] = std::sqrt(sq / static_cast<double>(samples));
        out.peak[i] = peak;

        const double band = 0.05 * peak;
        std::optional<std::size_t> last_out;
        for (std::size_t k = samples; k-- > 0;)
            if (std::abs(trace.states(k, i) - r) > band) {
                last_out = k;
                break;
            }
        if (!last_out)
            out.settling_time[i] = trace.times.front();
        else if (*last_out + 1 < samples)
            out.settling_time[i] = trace.times[*last_out + 1];
    }
    return out;
}

} // namespace vtolctrl
