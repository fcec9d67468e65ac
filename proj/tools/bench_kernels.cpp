// Times the serial reference history kernel against the chunked OpenMP one
// on long-memory integrations, plus the threshold sweep at both settings.
#include <cstdio>
#include <vector>

#include <omp.h>

#include "fracdose/baselines.hpp"
#include "fracdose/frac_solver.hpp"

using namespace fracdose;

namespace {

double time_integration(int steps, frac::HistoryKernel kernel) {
    model::ModelParams params;
    params.mu = 0.7;
    frac::FracGrid grid{0.01, steps, params.mu};
    std::vector<double> schedule(steps);
    for (int i = 0; i < steps; ++i) schedule[i] = i % 2 ? 1.0 : 0.0;
    const double t0 = omp_get_wtime();
    const auto traj = frac::integrate_piecewise(params, schedule,
                                                model::PopulationState{1000.0, 0.0}, grid,
                                                kernel);
    const double elapsed = omp_get_wtime() - t0;
    std::printf("  steps=%-7d kernel=%-6s  %8.3f s   (cost %.6f)\n", steps,
                kernel == frac::HistoryKernel::Serial ? "serial" : "openmp", elapsed,
                episode_cost(traj));
    return elapsed;
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());

    std::printf("history convolution, mu=0.7, alternating dose:\n");
    for (int steps : {10000, 30000, 60000}) {
        const double serial = time_integration(steps, frac::HistoryKernel::Serial);
        const double par = time_integration(steps, frac::HistoryKernel::OpenMP);
        std::printf("  speedup %.2fx\n", serial / par);
    }

    std::printf("threshold sweep (231 pairs, mu=1, 10^4 steps each):\n");
    env::EnvConfig cfg;
    const double t0 = omp_get_wtime();
    const auto result = baselines::sweep_thresholds(cfg);
    std::printf("  %zu pairs in %.3f s, best (%.2f, %.2f) cost %.4f\n", result.table.size(),
                omp_get_wtime() - t0, result.best_lo, result.best_hi, result.best_cost);
    return 0;
}
