#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fracdose/control_env.hpp"

namespace fracdose::baselines {

struct ConstantPolicy {
    int dose;  // 0 or 1
    int act() const { return dose; }
};

// Two-threshold pulsing on the resistant fraction: treat until phi reaches
// phi_hi, pause until it falls back to phi_lo, repeat.
class PulsingPolicy {
  public:
    enum class Phase { Treatment, Pause };

    PulsingPolicy(double phi_lo, double phi_hi);  // requires 0 < lo <= hi < 1

    int act(double phi);  // advances the phase on threshold crossings
    Phase phase() const { return phase_; }
    double lo() const { return phi_lo_; }
    double hi() const { return phi_hi_; }

  private:
    double phi_lo_;
    double phi_hi_;
    Phase phase_ = Phase::Treatment;
};

// Controllers that see only what the RL agent sees (growth-rate frames)...
using GrowthPolicy = std::function<int(const env::Observation&)>;
// ...versus privileged controllers that read the resistant fraction directly.
using FractionPolicy = std::function<int(double phi)>;

struct EvalOptions {
    // Policy comparisons roll the full horizon by default; training-style
    // early termination is opt-in.
    bool terminate_on_regrowth = false;
};

struct EvalSummary {
    double cost = 0.0;
    double mean_phi = 0.0;
    int toggles = 0;
    int steps = 0;
    double final_population = 0.0;
    env::DoneReason reason = env::DoneReason::None;
};

struct EvalResult {
    EvalSummary summary;
    Trajectory trajectory;
};

EvalResult evaluate_policy(const GrowthPolicy& policy, const env::EnvConfig& cfg,
                           const EvalOptions& opts = {});
EvalResult evaluate_policy(const FractionPolicy& policy, const env::EnvConfig& cfg,
                           const EvalOptions& opts = {});
// Open-loop replay of a fixed action sequence (truncated at the horizon).
EvalResult evaluate_schedule(std::span<const int> actions, const env::EnvConfig& cfg,
                             const EvalOptions& opts = {});

struct SweepRow {
    double phi_lo;
    double phi_hi;
    double cost;
};

struct SweepResult {
    double best_lo = 0.0;
    double best_hi = 0.0;
    double best_cost = 0.0;
    std::vector<SweepRow> table;  // grid order: lo ascending, then hi
};

// Grid search over threshold pairs with phi_lo <= phi_hi, evaluating each
// pair over the configured horizon. Grid points run in parallel; ties break
// toward the narrower band, then the smaller phi_lo.
SweepResult sweep_thresholds(const env::EnvConfig& cfg, double grid_lo = 0.1,
                             double grid_hi = 0.9, double step = 0.04);

}  // namespace fracdose::baselines
