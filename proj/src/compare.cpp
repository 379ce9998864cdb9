#include "vtolctrl/sim.hpp"

#include <limits>
#include <optional>

namespace vtolctrl {

namespace {

// RMS vector of one (policy, seed) run, or nullopt when the run diverged.
std::optional<std::vector<double>> run_one(const LinearModel &model, const ControllerPolicy &policy,
                                           SimConfig config, std::uint64_t seed) {
    config.dryden.seed = seed;
    try {
        const SimTrace tr = simulate(model, policy, config);
        return metrics(tr, config.reference).rms;
    } catch (const Error &e) {
        if (e.code() == ErrorCode::Diverged || e.code() == ErrorCode::NonFinite)
            return std::nullopt;
        throw;
    }
}

// Merges run results in (policy, seed) order so the output does not depend
// on the schedule that produced them.
std::vector<PolicyComparison> merge(const LinearModel &model, const std::vector<ControllerPolicy> &policies,
                                    std::size_t n_seeds, std::uint64_t seed_base,
                                    const std::vector<std::optional<std::vector<double>>> &runs) {
    const std::size_t n = model.states();
    std::vector<PolicyComparison> out;
    for (std::size_t p = 0; p < policies.size(); ++p) {
        PolicyComparison c{policies[p].name, std::vector<double>(n, 0.0), {}, {}};
        std::size_t ok = 0;
        for (std::size_t s = 0; s < n_seeds; ++s) {
            const auto &r = runs[p * n_seeds + s];
            if (!r) {
                c.diverged_seeds.push_back(seed_base + s);
                c.seed_rms.emplace_back();
                continue;
            }
            ++ok;
            for (std::size_t i = 0; i < n; ++i)
                c.mean_rms[i] += (*r)[i];
            c.seed_rms.push_back(*r);
        }
        for (double &v : c.mean_rms)
            v = ok ? v / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(c));
    }
    return out;
}

void check_inputs(const LinearModel &model, const std::vector<ControllerPolicy> &policies,
                  const SimConfig &config, std::size_t n_seeds) {
    if (n_seeds == 0)
        throw Error(ErrorCode::InvalidArgument, "compare needs at least one seed");
    model.validate();
    config.validate(model);
    for (const auto &p : policies)
        p.validate(model);
}

} // namespace

std::vector<PolicyComparison> compare_serial(const LinearModel &model,
                                             const std::vector<ControllerPolicy> &policies,
                                             const SimConfig &config, std::size_t n_seeds,
                                             std::uint64_t seed_base) {
    check_inputs(model, policies, config, n_seeds);
    std::vector<std::optional<std::vector<double>>> runs(policies.size() * n_seeds);
    for (std::size_t p = 0; p < policies.size(); ++p)
        for (std::size_t s = 0; s < n_seeds; ++s)
            runs[p * n_seeds + s] = run_one(model, policies[p], config, seed_base + s);
    return merge(model, policies, n_seeds, seed_base, runs);
}

std::vector<PolicyComparison> compare(const LinearModel &model, const std::vector<ControllerPolicy> &policies,
                                      const SimConfig &config, std::size_t n_seeds, std::uint64_t seed_base) {
    check_inputs(model, policies, config, n_seeds);
    const std::size_t total = policies.size() * n_seeds;
    std::vector<std::optional<std::vector<double>>> runs(total);

    // Exceptions may not cross the parallel region; keep the first one.
    std::optional<Error> failure;
#ifdef VTOLCTRL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
        const auto i = static_cast<std::size_t>(idx);
        try {
            runs[i] = run_one(model, policies[i / n_seeds], config, seed_base + i % n_seeds);
        } catch (const Error &e) {
#ifdef VTOLCTRL_HAVE_OPENMP
#pragma omp critical(vtolctrl_compare_error)
#endif
            if (!failure)
                failure = e;
        }
    }
    if (failure)
        throw *failure;
    return merge(model, policies, n_seeds, seed_base, runs);
}

} // namespace vtolctrl
