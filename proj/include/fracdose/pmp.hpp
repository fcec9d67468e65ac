#pragma once

#include <span>
#include <vector>

#include "fracdose/dose_model.hpp"

namespace fracdose::pmp {

// H(phi, u, lambda) = lambda * f(phi, u) with f the resistant-fraction
// dynamics; the terminal-cost control problem has no running cost.
double hamiltonian(const model::ModelParams& p, double phi, double u, double lambda);

// Coefficient of g(u) in the Hamiltonian:
//   B(phi, lambda) = lambda [ alpha_max - (dks + dkr) phi^2
//                             + (dks + dkr + delta_max - alpha_max) phi ]
// with dks = kappa_s_max - kappa_s_min and dkr = kappa_r_max - kappa_r_min,
// so H(phi,u,lambda) = H(phi,0,lambda) + g(u) B(phi,lambda). Minimizing over
// u therefore picks an extreme dose whenever B is nonzero.
double switching_coefficient(const model::ModelParams& p, double phi, double lambda);

enum class ImpliedAction { Pause = 0, Treat = 1, Indeterminate = 2 };

struct SwitchingEvaluation {
    double phi;
    double lambda;
    double coefficient;
    ImpliedAction action;
};

// Treat iff B < 0, pause iff B > 0, indeterminate within
// 1e-12 * max(1, |lambda|) of zero.
SwitchingEvaluation evaluate_switching(const model::ModelParams& p, double phi, double lambda);

struct ScheduleCost {
    std::vector<double> levels;  // dose per interval
    double cost;
};

struct OracleResult {
    std::vector<double> best_schedule;
    double best_cost;
    std::vector<ScheduleCost> table;  // enumeration order: lexicographic in level index
};

// Exhaustively simulates every piecewise-constant schedule on an equal
// split of [0, horizon_hours] into `intervals` pieces, each interval held
// at one of `dose_levels`. The enumeration (at most ~10^4 schedules) is an
// independent check that the optimum is attained at extreme dose values.
// Ties break toward the lexicographically smallest schedule.
OracleResult bang_bang_oracle(const model::ModelParams& p, int intervals,
                              std::span<const double> dose_levels, double mu,
                              double horizon_hours, double h = 0.01);

}  // namespace fracdose::pmp
