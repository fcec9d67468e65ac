#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fracdose/control_env.hpp"
#include "fracdose/mlp.hpp"
#include "fracdose/replay_buffer.hpp"
#include "fracdose/rng.hpp"

namespace fracdose::dqn {

struct DQNConfig {
    int batch = 32;
    double lr = 3.6e-4;
    double gamma = 0.999;
    int target_update_interval = 1000;  // gradient steps between hard copies
    long learning_starts = 10000;       // env steps before updates begin
    long total_steps = 300000;          // env-step budget
    double eps0 = 1.0;
    double eps_floor = 0.05;
    double eps_tau = 30000.0;  // exponential decay constant, env steps
    int grad_steps_per_env_step = 1;
    // 1.0 = hard copies every target_update_interval; otherwise
    // target <- polyak * target + (1 - polyak) * online per gradient step.
    double polyak = 1.0;
    int buffer_capacity = 100000;
    std::vector<int> hidden = {64, 64};
    uint64_t seed = 0;

    double effective_horizon() const { return 1.0 / (1.0 - gamma); }
    void validate() const;
    nlohmann::json to_json() const;
    static DQNConfig from_json(const nlohmann::json& j);
};

// eps(step) = max(eps_floor, eps0 * exp(-step / eps_tau))
double epsilon_at(long step, const DQNConfig& cfg);

// Epsilon-greedy action: with probability eps a coin flip, otherwise the
// argmax of Q(obs, .); value ties break toward action 0.
int act(const QNetwork& net, const env::Observation& obs, double eps, Rng& rng);

int greedy_action(const QNetwork& net, const env::Observation& obs);

// y_i = r_i + gamma (1 - done_i) Q_target(s'_i, argmax_a Q_online(s'_i, a))
void double_q_targets(const ReplayBuffer& buffer, std::span<const int> indices,
                      const QNetwork& online, const QNetwork& target, double gamma,
                      BatchWorkspace& ws, std::vector<double>& targets_out);

struct EpisodeLog {
    int episode;
    long end_step;     // cumulative env steps when the episode finished
    int length;        // env steps in this episode
    double return_sum; // undiscounted sum of rewards
    double cost;       // log N_T/N_0 for the episode
    double epsilon;    // exploration rate at the final step
    double loss_mean;  // mean training loss over this episode's updates
    long grad_steps;   // cumulative gradient steps
    env::DoneReason reason;
};

// Complete mutable state of a training run. Runs are deterministic given
// the seed, and a state saved at an episode boundary resumes bit-exactly.
struct TrainingState {
    DQNConfig cfg;
    env::EnvConfig env_cfg;
    QNetwork online;
    QNetwork target;
    Adam adam;
    ReplayBuffer buffer;
    Rng rng;
    long env_steps = 0;
    long grad_steps = 0;
    int episodes = 0;
    std::vector<EpisodeLog> log;

    TrainingState(const env::EnvConfig& e, const DQNConfig& c);
};

// Runs whole episodes until the env-step budget is reached (an episode cut
// short by the budget still gets its gradient updates), starting fresh or
// continuing from `state`. Stops early at the first episode boundary with
// env_steps >= stop_after_env_steps when that is positive.
TrainingState train_agent(const env::EnvConfig& env_cfg, const DQNConfig& cfg,
                          long stop_after_env_steps = 0);
void train_continue(TrainingState& state, long stop_after_env_steps = 0);

// Checkpoint container (versioned JSON): config echo, flat weights in layer
// order, Adam moments, rng state, step counters; optionally the full
// training state (target weights + replay buffer) for exact resumption.
void save_checkpoint(const std::filesystem::path& path, const TrainingState& state,
                     bool include_training_state = false);
TrainingState load_checkpoint(const std::filesystem::path& path);

}  // namespace fracdose::dqn
