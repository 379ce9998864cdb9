// Dryden turbulence: low-altitude (< 1000 ft) shaping filters driven by
// seeded white noise.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtolctrl/linalg.hpp"
#include "vtolctrl/models.hpp"

namespace vtolctrl {

struct DrydenParams {
    double mean_wind_20ft = 10.0; ///< W20 [m/s]
    double altitude = 50.0;       ///< [m]
    double wingspan = 1.2;        ///< [m]
    double airspeed = 22.49;      ///< relative airspeed used in the filters [m/s]
    double dt = 0.002;            ///< [s]
    std::uint64_t seed = 1;

    void validate() const;
};

enum class GustChannel : std::size_t { U = 0, V, W, P, Q, R };
inline constexpr std::size_t kGustChannels = 6;
std::string to_string(GustChannel c);

/// Turbulence intensities [m/s] and scale lengths [m].
struct DrydenScales {
    double sigma_u, sigma_v, sigma_w;
    double length_u, length_v, length_w;
};

DrydenScales dryden_scales(const DrydenParams &params);

/// Continuous single-output shaping filter dx = A x + B n, y = C x driven by
/// unit-intensity white noise n (E[n(t) n(s)] = delta(t - s)).
/// The q and r filters embed the w and v filters they are derived from and
/// share those noise sources.
struct ShapingFilter {
    GustChannel channel;
    std::size_t noise_source; ///< 0: u, 1: v, 2: w, 3: p
    Matrix A, B, C;
};

std::vector<ShapingFilter> dryden_filters(const DrydenParams &params);

/// Stationary output variance C P C^T with A P + P A^T + B B^T = 0.
double stationary_variance(const ShapingFilter &filter);

/// xoshiro256** (Blackman & Vigna), seeded through splitmix64, with a
/// Box-Muller normal transform. Part of the reproducibility contract: the
/// same seed yields the same stream on every platform.
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed);
    std::uint64_t next_u64();
    double next_uniform(); ///< (0, 1]
    double next_normal();  ///< N(0, 1)

  private:
    std::array<std::uint64_t, 4> s_{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Zero-order-hold discretization of each shaping filter at a fixed step.
struct DiscreteDryden {
    struct Block {
        GustChannel channel;
        std::size_t noise_source;
        Matrix Phi, Gamma, C;
    };
    std::vector<Block> blocks;
    double dt = 0.0;
};

DiscreteDryden discretize(const std::vector<ShapingFilter> &filters, double dt);

struct GustState {
    std::vector<std::vector<double>> x; ///< one state vector per block
};

GustState initial_gust_state(const DiscreteDryden &model);

using GustSample = std::array<double, kGustChannels>;

/// Emits the outputs at the current state, then advances every block with
/// held white samples (one per noise source, variance 1/dt each).
GustSample gust_step(const DiscreteDryden &model, GustState &state, std::span<const double, 4> white);

struct GustRealization {
    std::vector<double> times;
    std::array<std::vector<double>, kGustChannels> channels; ///< u_g, v_g, w_g [m/s]; p_g, q_g, r_g [rad/s]

    std::size_t size() const noexcept { return times.size(); }
    const std::vector<double> &operator[](GustChannel c) const { return channels[static_cast<std::size_t>(c)]; }
};

/// Samples at t_k = k dt for k = 0 .. round(t_final / dt).
/// Throws StepTooLarge when dt > 0.01 s.
GustRealization generate(const DrydenParams &params, double t_final);

/// Disturbance input w(t) for a model, one row per sample. A one-column Bw is
/// driven by q_g; a three-column Bw (non-published widening) by (p_g, q_g, r_g).
Matrix disturbance_channel(const GustRealization &realization, const LinearModel &model);

} // namespace vtolctrl
