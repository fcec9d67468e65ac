#include "fracdose/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdose::baselines {

PulsingPolicy::PulsingPolicy(double phi_lo, double phi_hi) : phi_lo_(phi_lo), phi_hi_(phi_hi) {
    if (!(phi_lo > 0.0 && phi_lo <= phi_hi && phi_hi < 1.0)) {
        throw std::invalid_argument("pulsing thresholds must satisfy 0 < lo <= hi < 1");
    }
}

int PulsingPolicy::act(double phi) {
    if (!(phi >= 0.0 && phi <= 1.0)) {
        throw std::invalid_argument("phi must lie in [0,1]");
    }
    if (phase_ == Phase::Treatment) {
        if (phi >= phi_hi_) {
            phase_ = Phase::Pause;
            return 0;
        }
        return 1;
    }
    if (phi <= phi_lo_) {
        phase_ = Phase::Treatment;
        return 1;
    }
    return 0;
}

namespace {

// Single rollout engine; the chooser sees either the observation or phi,
// which keeps the privileged-information boundary in one place.
template <typename Chooser>
EvalResult rollout(Chooser&& choose, const env::EnvConfig& cfg, const EvalOptions& opts) {
    env::EnvConfig ecfg = cfg;
    ecfg.terminate_on_regrowth = opts.terminate_on_regrowth;
    env::DosingEnv environment(ecfg);
    env::Observation obs = environment.reset();
    while (!environment.done()) {
        const int action = choose(obs, environment.resistant_fraction());
        const auto res = environment.step(action);
        obs = res.observation;
    }
    EvalResult out;
    out.trajectory = environment.trajectory();
    out.summary.cost = episode_cost(out.trajectory);
    out.summary.mean_phi = mean_resistant_fraction(out.trajectory);
    out.summary.toggles = toggle_count(out.trajectory);
    out.summary.steps = environment.steps_taken();
    out.summary.final_population = environment.population();
    out.summary.reason = environment.done_reason();
    return out;
}

}  // namespace

EvalResult evaluate_policy(const GrowthPolicy& policy, const env::EnvConfig& cfg,
                           const EvalOptions& opts) {
    return rollout([&](const env::Observation& obs, double) { return policy(obs); }, cfg, opts);
}

EvalResult evaluate_policy(const FractionPolicy& policy, const env::EnvConfig& cfg,
                           const EvalOptions& opts) {
    return rollout([&](const env::Observation&, double phi) { return policy(phi); }, cfg, opts);
}

EvalResult evaluate_schedule(std::span<const int> actions, const env::EnvConfig& cfg,
                             const EvalOptions& opts) {
    size_t i = 0;
    return rollout(
        [&](const env::Observation&, double) {
            if (i >= actions.size()) {
                throw std::invalid_argument("schedule shorter than the episode");
            }
            return actions[i++];
        },
        cfg, opts);
}

SweepResult sweep_thresholds(const env::EnvConfig& cfg, double grid_lo, double grid_hi,
                             double step) {
    if (!(grid_lo > 0.0 && grid_lo <= grid_hi && grid_hi < 1.0 && step > 0.0)) {
        throw std::invalid_argument("invalid sweep grid");
    }
    std::vector<double> values;
    for (int k = 0;; ++k) {
        const double v = grid_lo + k * step;
        if (v > grid_hi + 1e-12) break;
        values.push_back(v);
    }

    SweepResult result;
    for (size_t i = 0; i < values.size(); ++i) {
        for (size_t j = i; j < values.size(); ++j) {
            result.table.push_back({values[i], values[j], 0.0});
        }
    }

    const int count = static_cast<int>(result.table.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int k = 0; k < count; ++k) {
        FractionPolicy policy = [pol = PulsingPolicy(result.table[k].phi_lo,
                                                     result.table[k].phi_hi)](double phi) mutable {
            return pol.act(phi);
        };
        result.table[k].cost = evaluate_policy(policy, cfg).summary.cost;
    }

    // Deterministic reduction in grid order; ties prefer the narrower band,
    // then the smaller lower threshold (matching table order).
    int best = 0;
    for (int k = 1; k < count; ++k) {
        const auto& cand = result.table[k];
        const auto& cur = result.table[best];
        const double cand_width = cand.phi_hi - cand.phi_lo;
        const double cur_width = cur.phi_hi - cur.phi_lo;
        if (cand.cost < cur.cost ||
            (cand.cost == cur.cost &&
             (cand_width < cur_width || (cand_width == cur_width && cand.phi_lo < cur.phi_lo)))) {
            best = k;
        }
    }
    result.best_lo = result.table[best].phi_lo;
    result.best_hi = result.table[best].phi_hi;
    result.best_cost = result.table[best].cost;
    return result;
}

}  // namespace fracdose::baselines
