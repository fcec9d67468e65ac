#include "fracdose/pmp.hpp"

#include <cmath>
#include <stdexcept>

#include "fracdose/frac_solver.hpp"

namespace fracdose::pmp {

double hamiltonian(const model::ModelParams& p, double phi, double u, double lambda) {
    return lambda * model::riccati_rhs(p, phi, u);
}

double switching_coefficient(const model::ModelParams& p, double phi, double lambda) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0,1]");
    const double dks = p.kappa_s_max - p.kappa_s_min;
    const double dkr = p.kappa_r_max - p.kappa_r_min;
    return lambda * (p.alpha_max - (dks + dkr) * phi * phi +
                     (dks + dkr + p.delta_max - p.alpha_max) * phi);
}

SwitchingEvaluation evaluate_switching(const model::ModelParams& p, double phi, double lambda) {
    const double b = switching_coefficient(p, phi, lambda);
    const double tol = 1e-12 * std::max(1.0, std::fabs(lambda));
    ImpliedAction action = ImpliedAction::Indeterminate;
    if (b < -tol) action = ImpliedAction::Treat;
    else if (b > tol) action = ImpliedAction::Pause;
    return SwitchingEvaluation{phi, lambda, b, action};
}

OracleResult bang_bang_oracle(const model::ModelParams& p, int intervals,
                              std::span<const double> dose_levels, double mu,
                              double horizon_hours, double h) {
    if (intervals < 1 || intervals > 6) {
        throw std::invalid_argument("oracle interval count must lie in [1,6]");
    }
    if (dose_levels.empty()) throw std::invalid_argument("oracle needs dose levels");
    double total = 1.0;
    for (int k = 0; k < intervals; ++k) total *= static_cast<double>(dose_levels.size());
    if (total > 1e4) {
        throw std::invalid_argument("oracle enumeration would exceed 10^4 schedules");
    }
    if (!(horizon_hours > 0.0 && h > 0.0)) {
        throw std::invalid_argument("oracle horizon and step must be > 0");
    }

    model::ModelParams params = p;
    params.mu = mu;
    params.validate();

    // Grid-align the interval boundaries.
    int steps_per_interval = static_cast<int>(std::ceil(horizon_hours / (h * intervals)));
    if (steps_per_interval < 1) steps_per_interval = 1;
    const int steps = steps_per_interval * intervals;
    frac::FracGrid grid{h, steps, mu};

    const int count = static_cast<int>(total);
    const int base = static_cast<int>(dose_levels.size());

    OracleResult result;
    result.table.resize(count);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int idx = 0; idx < count; ++idx) {
        // Digits of idx in the level base, most significant interval first,
        // so enumeration order is lexicographic in the schedule.
        std::vector<double> levels(intervals);
        int rem = idx;
        for (int k = intervals - 1; k >= 0; --k) {
            levels[k] = dose_levels[rem % base];
            rem /= base;
        }
        std::vector<double> schedule(steps);
        for (int k = 0; k < intervals; ++k) {
            for (int s = 0; s < steps_per_interval; ++s) {
                schedule[k * steps_per_interval + s] = levels[k];
            }
        }
        const Trajectory traj =
            frac::integrate_piecewise(params, schedule, model::PopulationState{1000.0, 0.0}, grid);
        result.table[idx] = ScheduleCost{std::move(levels), episode_cost(traj)};
    }

    int best = 0;
    for (int idx = 1; idx < count; ++idx) {
        if (result.table[idx].cost < result.table[best].cost) best = idx;
    }
    result.best_schedule = result.table[best].levels;
    result.best_cost = result.table[best].cost;
    return result;
}

}  // namespace fracdose::pmp
