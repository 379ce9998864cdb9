// Serial reference vs OpenMP kernels: multi-seed comparison and VLM
// influence-matrix assembly. Prints wall times and checks the results agree.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef VTOLCTRL_HAVE_OPENMP
#include <omp.h>
#endif

#include "vtolctrl/aero.hpp"
#include "vtolctrl/commands.hpp"

namespace {

template <class F> double best_of(int reps, F &&f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        best = std::min(best, dt.count());
    }
    return best;
}

void report(const char *name, double serial, double parallel, bool same) {
    std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char **argv) {
    const std::size_t seeds = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20;
#ifdef VTOLCTRL_HAVE_OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths are serial\n");
#endif
    bool all_same = true;

    {
        const auto root = vtolctrl::load_config_json(std::nullopt);
        const auto cfg = vtolctrl::parse_run_config(root, "case1_level");
        const auto policies = vtolctrl::build_policies(cfg);
        std::vector<vtolctrl::PolicyComparison> a, b;
        const double ts = best_of(3, [&] { a = vtolctrl::compare_serial(cfg.model, policies, cfg.sim, seeds, 1); });
        const double tp = best_of(3, [&] { b = vtolctrl::compare(cfg.model, policies, cfg.sim, seeds, 1); });
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].seed_rms == b[i].seed_rms;
        all_same = all_same && same;
        report("compare (case1, 3 ctrl)", ts, tp, same);
    }

    for (std::size_t ns : {64, 128, 256}) {
        vtolctrl::WingGeometry g;
        g.spanwise_panels = ns;
        g.chordwise_panels = 4;
        const auto grid = vtolctrl::build_panels(g);
        vtolctrl::Matrix a, b;
        const double ts = best_of(3, [&] { a = vtolctrl::influence_matrix_serial(grid); });
        const double tp = best_of(3, [&] { b = vtolctrl::influence_matrix(grid); });
        char name[64];
        std::snprintf(name, sizeof name, "AIC %zu panels", grid.panels.size());
        all_same = all_same && a == b;
        report(name, ts, tp, a == b);
    }
    return all_same ? 0 : 1;
}
