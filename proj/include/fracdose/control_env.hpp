#pragma once

#include <vector>

#include <json.hpp>

#include "fracdose/dose_model.hpp"
#include "fracdose/frac_solver.hpp"
#include "fracdose/trajectory.hpp"

namespace fracdose::env {

struct EnvConfig {
    double delta = 0.01;  // hours simulated per action
    int frames = 5;       // growth-rate estimates stacked into the observation
    int horizon = 10000;  // steps per episode
    model::PopulationState x0{1000.0, 0.0};
    model::ModelParams params;
    // Episode ends as soon as N exceeds its initial value. Disabled for
    // fixed-horizon policy comparisons; always on during training.
    bool terminate_on_regrowth = true;
    frac::HistoryKernel kernel = frac::HistoryKernel::Serial;

    void validate() const;
    nlohmann::json to_json() const;
    static EnvConfig from_json(const nlohmann::json& j);
};

// The K most recent growth-rate estimates c_t = log(N_t/N_{t-delta})/delta,
// oldest first, zero-padded at the start of an episode.
using Observation = std::vector<double>;

enum class DoneReason { None, Horizon, PopulationExceeded };
const char* to_string(DoneReason r);

struct StepResult {
    Observation observation;
    double reward;  // -c_t, so summed rewards telescope to log(N_0/N_T)/delta
    bool done;
    DoneReason reason;
};

// Episodic environment: binary dosing actions drive the fractional
// two-phenotype dynamics; the agent observes growth rates only.
class DosingEnv {
  public:
    explicit DosingEnv(EnvConfig cfg);

    Observation reset();
    StepResult step(int action);  // throws std::logic_error once done

    bool done() const { return done_; }
    DoneReason done_reason() const { return reason_; }
    int steps_taken() const { return steps_; }
    double time() const { return steps_ * cfg_.delta; }
    double population() const;
    double initial_population() const { return n0_; }
    double resistant_fraction() const;
    const Observation& observation() const { return obs_; }
    const EnvConfig& config() const { return cfg_; }
    const Trajectory& trajectory() const { return traj_; }

  private:
    EnvConfig cfg_;
    frac::FdeSolver solver_;
    Observation obs_;
    Trajectory traj_;
    double n0_ = 0.0;
    double prev_total_ = 0.0;
    int steps_ = 0;
    bool done_ = true;
    DoneReason reason_ = DoneReason::None;
};

}  // namespace fracdose::env
