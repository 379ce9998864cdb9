#include "vtolctrl/wind.hpp"

#include <cmath>
#include <numbers>

#include "vtolctrl/synthesis.hpp"

namespace vtolctrl {

namespace {

constexpr double kFeetPerMeter = 1.0 / 0.3048;
constexpr double kMaxStep = 0.01;

// First-order lag gain / (1 + T s).
ShapingFilter first_order(GustChannel ch, std::size_t noise, double gain, double tau) {
    return {ch, noise, Matrix{{-1.0 / tau}}, Matrix{{1.0}}, Matrix{{gain / tau}}};
}

// gain (1 + sqrt(3) T s) / (1 + T s)^2 in controllable canonical form.
ShapingFilter second_order(GustChannel ch, std::size_t noise, double gain, double tau) {
    const double k = gain / (tau * tau);
    return {ch, noise, Matrix{{0.0, 1.0}, {-1.0 / (tau * tau), -2.0 / tau}}, Matrix{{0.0}, {1.0}},
            Matrix{{k, k * std::sqrt(3.0) * tau}}};
}

// sign (s / V) / (1 + T s) applied to the output of a base filter.
ShapingFilter rate_from(GustChannel ch, const ShapingFilter &base, double airspeed, double tau, double sign) {
    const std::size_t nb = base.A.rows();
    ShapingFilter f{ch, base.noise_source, Matrix(nb + 1, nb + 1), Matrix(nb + 1, 1), Matrix(1, nb + 1)};
    f.A.set_block(0, 0, base.A);
    f.A.set_block(nb, 0, base.C * (1.0 / tau));
    f.A(nb, nb) = -1.0 / tau;
    f.B.set_block(0, 0, base.B);
    const double g = sign / (airspeed * tau);
    f.C.set_block(0, 0, base.C * g);
    f.C(0, nb) = -g;
    return f;
}

std::uint64_t splitmix64(std::uint64_t &x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

std::string to_string(GustChannel c) {
    static constexpr const char *names[] = {"u_g", "v_g", "w_g", "p_g", "q_g", "r_g"};
    return names[static_cast<std::size_t>(c)];
}

void DrydenParams::validate() const {
    if (!(airspeed > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Dryden airspeed must be positive");
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Dryden dt must be positive");
    if (!(mean_wind_20ft >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "mean wind must be non-negative");
    if (!(altitude > 0.0) || !(wingspan > 0.0))
        throw Error(ErrorCode::InvalidArgument, "altitude and wingspan must be positive");
}

DrydenScales dryden_scales(const DrydenParams &p) {
    p.validate();
    const double h_ft = p.altitude * kFeetPerMeter;
    const double denom = 0.177 + 0.000823 * h_ft;
    DrydenScales s{};
    s.length_w = p.altitude;
    s.length_u = s.length_v = p.altitude / std::pow(denom, 1.2);
    s.sigma_w = 0.1 * p.mean_wind_20ft;
    s.sigma_u = s.sigma_v = s.sigma_w / std::pow(denom, 0.4);
    return s;
}

std::vector<ShapingFilter> dryden_filters(const DrydenParams &p) {
    const DrydenScales s = dryden_scales(p);
    const double v = p.airspeed;
    const double b = p.wingspan;
    // The handbook transfer functions assume one-sided spectra; a factor
    // sqrt(pi) converts them to unit-intensity white noise input.
    const double sqrt_pi = std::sqrt(std::numbers::pi);

    const ShapingFilter fu =
        first_order(GustChannel::U, 0, s.sigma_u * std::sqrt(2.0 * s.length_u / v), s.length_u / v);
    const ShapingFilter fv = second_order(GustChannel::V, 1, s.sigma_v * std::sqrt(s.length_v / v), s.length_v / v);
    const ShapingFilter fw = second_order(GustChannel::W, 2, s.sigma_w * std::sqrt(s.length_w / v), s.length_w / v);

    const double p_gain = sqrt_pi * s.sigma_w * std::sqrt(0.8 / v) *
                          std::pow(std::numbers::pi / (4.0 * b), 1.0 / 6.0) / std::cbrt(s.length_w);
    const ShapingFilter fp = first_order(GustChannel::P, 3, p_gain, 4.0 * b / (std::numbers::pi * v));
    const ShapingFilter fq = rate_from(GustChannel::Q, fw, v, 4.0 * b / (std::numbers::pi * v), +1.0);
    const ShapingFilter fr = rate_from(GustChannel::R, fv, v, 3.0 * b / (std::numbers::pi * v), -1.0);
    return {fu, fv, fw, fp, fq, fr};
}

double stationary_variance(const ShapingFilter &f) {
    const Matrix p = solve_lyapunov(f.A.transpose(), f.B * f.B.transpose());
    return (f.C * p * f.C.transpose())(0, 0);
}

// ---------------------------------------------------------------------------

GaussianSource::GaussianSource(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto &w : s_)
        w = splitmix64(x);
}

std::uint64_t GaussianSource::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double GaussianSource::next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double GaussianSource::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_uniform()));
    const double theta = 2.0 * std::numbers::pi * next_uniform();
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

// ---------------------------------------------------------------------------

DiscreteDryden discretize(const std::vector<ShapingFilter> &filters, double dt) {
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidArgument, "discretization step must be positive");
    if (dt > kMaxStep)
        throw Error(ErrorCode::StepTooLarge, "gust step " + std::to_string(dt) + " s exceeds 0.01 s");
    DiscreteDryden d;
    d.dt = dt;
    for (const auto &f : filters) {
        const std::size_t n = f.A.rows();
        // exp([[A, B], [0, 0]] dt) = [[Phi, Gamma], [0, I]]
        Matrix aug(n + 1, n + 1);
        aug.set_block(0, 0, f.A);
        aug.set_block(0, n, f.B);
        const Matrix e = mat_exp(aug, dt);
        d.blocks.push_back({f.channel, f.noise_source, e.block(0, 0, n, n), e.block(0, n, n, 1), f.C});
    }
    return d;
}

GustState initial_gust_state(const DiscreteDryden &model) {
    GustState s;
    for (const auto &b : model.blocks)
        s.x.emplace_back(b.Phi.rows(), 0.0);
    return s;
}

GustSample gust_step(const DiscreteDryden &model, GustState &state, std::span<const double, 4> white) {
    GustSample out{};
    std::vector<double> next;
    for (std::size_t k = 0; k < model.blocks.size(); ++k) {
        const auto &b = model.blocks[k];
        auto &x = state.x[k];
        const std::size_t n = x.size();
        double y = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            y += b.C(0, j) * x[j];
        out[static_cast<std::size_t>(b.channel)] = y;

        const double nk = white[b.noise_source];
        next.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b.Gamma(i, 0) * nk;
            for (std::size_t j = 0; j < n; ++j)
                s += b.Phi(i, j) * x[j];
            next[i] = s;
        }
        x.swap(next);
    }
    return out;
}

GustRealization generate(const DrydenParams &params, double t_final) {
    params.validate();
    if (!(t_final >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "t_final must be non-negative");
    const DiscreteDryden model = discretize(dryden_filters(params), params.dt);
    GustState state = initial_gust_state(model);
    GaussianSource rng(params.seed);
    const double noise_std = 1.0 / std::sqrt(params.dt);

    const auto steps = static_cast<std::size_t>(std::llround(t_final / params.dt));
    GustRealization r;
    r.times.resize(steps + 1);
    for (auto &c : r.channels)
        c.resize(steps + 1);
    std::array<double, 4> white{};
    for (std::size_t k = 0; k <= steps; ++k) {
        for (auto &w : white)
            w = noise_std * rng.next_normal();
        const GustSample y = gust_step(model, state, white);
        r.times[k] = static_cast<double>(k) * params.dt;
        for (std::size_t c = 0; c < kGustChannels; ++c)
            r.channels[c][k] = y[c];
    }
    return r;
}

Matrix disturbance_channel(const GustRealization &realization, const LinearModel &model) {
    const std::size_t n = realization.size();
    const std::size_t width = model.disturbances();
    Matrix w(n, width);
    if (width == 1) {
        const auto &q = realization[GustChannel::Q];
        for (std::size_t k = 0; k < n; ++k)
            w(k, 0) = q[k];
    } else if (width == 3) {
        const GustChannel chans[] = {GustChannel::P, GustChannel::Q, GustChannel::R};
        for (std::size_t c = 0; c < 3; ++c) {
            const auto &s = realization[chans[c]];
            for (std::size_t k = 0; k < n; ++k)
                w(k, c) = s[k];
        }
    } else {
        throw Error(ErrorCode::DimensionMismatch,
                    "gust channel supports Bw with 1 or 3 columns, got " + std::to_string(width));
    }
    return w;
}

} // namespace vtolctrl
