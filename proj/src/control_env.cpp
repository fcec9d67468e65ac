#include "fracdose/control_env.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdose::env {

void EnvConfig::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (frames < 1) throw std::invalid_argument("frames must be >= 1");
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (!(x0.total() > 0.0)) throw std::invalid_argument("initial population must be > 0");
    x0.validate();
    params.validate();
}

nlohmann::json EnvConfig::to_json() const {
    return nlohmann::json{
        {"delta", delta},
        {"frames", frames},
        {"horizon", horizon},
        {"x0", {x0.susceptible, x0.resistant}},
        {"model", params.to_json()},
    };
}

EnvConfig EnvConfig::from_json(const nlohmann::json& j) {
    EnvConfig cfg;
    cfg.delta = j.at("delta").get<double>();
    cfg.frames = j.at("frames").get<int>();
    cfg.horizon = j.at("horizon").get<int>();
    const auto x0 = j.at("x0");
    cfg.x0 = model::PopulationState{x0.at(0).get<double>(), x0.at(1).get<double>()};
    cfg.params = model::ModelParams::from_json(j.at("model"));
    cfg.validate();
    return cfg;
}

const char* to_string(DoneReason r) {
    switch (r) {
        case DoneReason::None: return "none";
        case DoneReason::Horizon: return "horizon";
        case DoneReason::PopulationExceeded: return "population-exceeded";
    }
    return "none";
}

DosingEnv::DosingEnv(EnvConfig cfg)
    : cfg_(std::move(cfg)),
      solver_(cfg_.delta, cfg_.params.mu, 2, frac::population_rhs(cfg_.params), cfg_.kernel) {
    cfg_.validate();
}

Observation DosingEnv::reset() {
    const double init[2] = {cfg_.x0.susceptible, cfg_.x0.resistant};
    solver_.reset(init);
    n0_ = cfg_.x0.total();
    prev_total_ = n0_;
    steps_ = 0;
    done_ = cfg_.horizon == 0;
    reason_ = done_ ? DoneReason::Horizon : DoneReason::None;
    obs_.assign(cfg_.frames, 0.0);
    traj_ = Trajectory{};
    traj_.time.push_back(0.0);
    traj_.susceptible.push_back(cfg_.x0.susceptible);
    traj_.resistant.push_back(cfg_.x0.resistant);
    traj_.phi.push_back(cfg_.x0.resistant / n0_);
    traj_.growth.push_back(0.0);
    return obs_;
}

StepResult DosingEnv::step(int action) {
    if (done_) throw std::logic_error("step() called on a finished episode");
    if (action != 0 && action != 1) throw std::invalid_argument("action must be 0 or 1");

    solver_.step(static_cast<double>(action));
    ++steps_;

    const auto x = solver_.state();
    const double total = x[0] + x[1];
    const double c = std::log(total / prev_total_) / cfg_.delta;
    prev_total_ = total;

    // frame stack: drop oldest, append newest
    for (int k = 0; k + 1 < cfg_.frames; ++k) obs_[k] = obs_[k + 1];
    obs_[cfg_.frames - 1] = c;

    traj_.time.push_back(steps_ * cfg_.delta);
    traj_.susceptible.push_back(x[0]);
    traj_.resistant.push_back(x[1]);
    traj_.phi.push_back(total > 0.0 ? x[1] / total : 0.0);
    traj_.growth.push_back(c);
    traj_.control.push_back(static_cast<double>(action));

    if (cfg_.terminate_on_regrowth && total > n0_) {
        done_ = true;
        reason_ = DoneReason::PopulationExceeded;
    } else if (steps_ == cfg_.horizon) {
        done_ = true;
        reason_ = DoneReason::Horizon;
    }
    return StepResult{obs_, -c, done_, done_ ? reason_ : DoneReason::None};
}

double DosingEnv::population() const {
    const auto x = solver_.state();
    return x[0] + x[1];
}

double DosingEnv::resistant_fraction() const {
    const auto x = solver_.state();
    const double total = x[0] + x[1];
    if (!(total > 0.0)) throw std::domain_error("resistant fraction undefined");
    return x[1] / total;
}

}  // namespace fracdose::env
