#include "fracdose/dqn.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fracdose::dqn {

void DQNConfig::validate() const {
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (target_update_interval < 1) throw std::invalid_argument("target interval must be >= 1");
    if (learning_starts < 0) throw std::invalid_argument("learning_starts must be >= 0");
    if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
    if (!(eps0 >= 0.0 && eps0 <= 1.0)) throw std::invalid_argument("eps0 must lie in [0,1]");
    if (!(eps_floor >= 0.0 && eps_floor <= 1.0)) {
        throw std::invalid_argument("eps_floor must lie in [0,1]");
    }
    if (!(eps_tau > 0.0)) throw std::invalid_argument("eps_tau must be > 0");
    if (grad_steps_per_env_step < 1) {
        throw std::invalid_argument("grad_steps_per_env_step must be >= 1");
    }
    if (!(polyak > 0.0 && polyak <= 1.0)) throw std::invalid_argument("polyak must lie in (0,1]");
    if (buffer_capacity < batch) throw std::invalid_argument("buffer smaller than a batch");
    if (hidden.empty()) throw std::invalid_argument("need at least one hidden layer");
}

nlohmann::json DQNConfig::to_json() const {
    return nlohmann::json{
        {"batch", batch},
        {"lr", lr},
        {"gamma", gamma},
        {"target_update_interval", target_update_interval},
        {"learning_starts", learning_starts},
        {"total_steps", total_steps},
        {"eps0", eps0},
        {"eps_floor", eps_floor},
        {"eps_tau", eps_tau},
        {"grad_steps_per_env_step", grad_steps_per_env_step},
        {"polyak", polyak},
        {"buffer_capacity", buffer_capacity},
        {"hidden", hidden},
        {"seed", seed},
    };
}

DQNConfig DQNConfig::from_json(const nlohmann::json& j) {
    DQNConfig cfg;
    cfg.batch = j.at("batch").get<int>();
    cfg.lr = j.at("lr").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.target_update_interval = j.at("target_update_interval").get<int>();
    cfg.learning_starts = j.at("learning_starts").get<long>();
    cfg.total_steps = j.at("total_steps").get<long>();
    cfg.eps0 = j.at("eps0").get<double>();
    cfg.eps_floor = j.at("eps_floor").get<double>();
    cfg.eps_tau = j.at("eps_tau").get<double>();
    cfg.grad_steps_per_env_step = j.at("grad_steps_per_env_step").get<int>();
    cfg.polyak = j.at("polyak").get<double>();
    cfg.buffer_capacity = j.at("buffer_capacity").get<int>();
    cfg.hidden = j.at("hidden").get<std::vector<int>>();
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.validate();
    return cfg;
}

double epsilon_at(long step, const DQNConfig& cfg) {
    if (step < 0) throw std::invalid_argument("step must be >= 0");
    return std::max(cfg.eps_floor, cfg.eps0 * std::exp(-static_cast<double>(step) / cfg.eps_tau));
}

int greedy_action(const QNetwork& net, const env::Observation& obs) {
    const auto q = net.forward(obs);
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.size()); ++a) {
        if (q[a] > q[best]) best = a;  // ties keep the lower action
    }
    return best;
}

int act(const QNetwork& net, const env::Observation& obs, double eps, Rng& rng) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0,1]");
    if (eps > 0.0 && rng.unif01() < eps) {
        return rng.unif01() < 0.5 ? 0 : 1;
    }
    return greedy_action(net, obs);
}

void double_q_targets(const ReplayBuffer& buffer, std::span<const int> indices,
                      const QNetwork& online, const QNetwork& target, double gamma,
                      BatchWorkspace& ws, std::vector<double>& targets_out) {
    const int batch = static_cast<int>(indices.size());
    if (batch < 1) throw std::invalid_argument("empty batch");
    const int dim = buffer.frame_dim();
    const int out_dim = online.output_dim();

    std::vector<double> next(static_cast<size_t>(batch) * dim);
    for (int n = 0; n < batch; ++n) {
        const double* o = buffer.next_obs_at(indices[n]);
        std::copy(o, o + dim, next.begin() + static_cast<size_t>(n) * dim);
    }
    std::vector<double> q_online(static_cast<size_t>(batch) * out_dim);
    std::vector<double> q_target(static_cast<size_t>(batch) * out_dim);
    batch_forward(online, next, batch, ws, q_online);
    batch_forward(target, next, batch, ws, q_target);

    targets_out.resize(batch);
    for (int n = 0; n < batch; ++n) {
        const int i = indices[n];
        double y = buffer.reward_at(i);
        if (!buffer.done_at(i)) {
            const double* qo = q_online.data() + static_cast<size_t>(n) * out_dim;
            int best = 0;
            for (int a = 1; a < out_dim; ++a) {
                if (qo[a] > qo[best]) best = a;
            }
            y += gamma * q_target[static_cast<size_t>(n) * out_dim + best];
        }
        targets_out[n] = y;
    }
}

namespace {

std::vector<int> network_dims(const env::EnvConfig& env_cfg, const DQNConfig& cfg) {
    std::vector<int> dims;
    dims.push_back(env_cfg.frames);
    for (int h : cfg.hidden) dims.push_back(h);
    dims.push_back(2);
    return dims;
}

}  // namespace

TrainingState::TrainingState(const env::EnvConfig& e, const DQNConfig& c)
    : cfg(c),
      env_cfg(e),
      online(network_dims(e, c)),
      target(network_dims(e, c)),
      adam(),
      buffer(c.buffer_capacity, e.frames),
      rng(c.seed) {
    cfg.validate();
    env_cfg.validate();
    adam.reset(online.parameter_count());
    online.init_weights(rng);
    target = online;
}

void train_continue(TrainingState& st, long stop_after_env_steps) {
    const DQNConfig& cfg = st.cfg;
    // stop_after only pauses at episode boundaries, so a paused run resumes
    // bit-exactly; the total_steps budget is the one thing that may cut an
    // episode short.
    const long stop = stop_after_env_steps > 0
                          ? std::min(stop_after_env_steps, cfg.total_steps)
                          : cfg.total_steps;

    env::EnvConfig env_cfg = st.env_cfg;
    env_cfg.terminate_on_regrowth = true;
    if (env_cfg.horizon < 1) throw std::invalid_argument("training needs horizon >= 1");
    env::DosingEnv environment(env_cfg);

    BatchWorkspace ws;
    std::vector<int> indices;
    std::vector<double> targets;
    std::vector<double> batch_obs(static_cast<size_t>(cfg.batch) * env_cfg.frames);
    std::vector<int> batch_actions(cfg.batch);
    std::vector<double> grad(st.online.parameter_count());

    while (st.env_steps < stop) {
        env::Observation obs = environment.reset();
        int ep_len = 0;
        double ep_return = 0.0;
        double eps = epsilon_at(st.env_steps, cfg);
        bool episode_done = false;
        env::DoneReason reason = env::DoneReason::None;

        while (!episode_done && st.env_steps < cfg.total_steps) {
            eps = epsilon_at(st.env_steps, cfg);
            const int action = act(st.online, obs, eps, st.rng);
            const auto res = environment.step(action);
            // The horizon cut is a truncation, not a state of the system:
            // the observation carries no clock, so only the population rule
            // marks a transition terminal for bootstrapping.
            const bool terminal = res.done && res.reason == env::DoneReason::PopulationExceeded;
            st.buffer.push(obs, action, res.reward, res.observation, terminal);
            obs = res.observation;
            ++st.env_steps;
            ++ep_len;
            ep_return += res.reward;
            episode_done = res.done;
            reason = res.reason;
        }

        // One rollout finished (or the budget cut it): as many gradient
        // steps as environment steps occurred.
        double loss_sum = 0.0;
        long updates = 0;
        if (st.env_steps > cfg.learning_starts) {
            const long todo = static_cast<long>(ep_len) * cfg.grad_steps_per_env_step;
            for (long k = 0; k < todo; ++k) {
                st.buffer.sample_indices(cfg.batch, st.rng, indices);
                double_q_targets(st.buffer, indices, st.online, st.target, cfg.gamma, ws,
                                 targets);
                for (int n = 0; n < cfg.batch; ++n) {
                    const double* o = st.buffer.obs_at(indices[n]);
                    std::copy(o, o + env_cfg.frames,
                              batch_obs.begin() + static_cast<size_t>(n) * env_cfg.frames);
                    batch_actions[n] = st.buffer.action_at(indices[n]);
                }
                const double loss = batch_loss_and_grad(st.online, batch_obs, batch_actions,
                                                        targets, cfg.batch, ws, grad);
                if (!std::isfinite(loss)) {
                    throw std::runtime_error("non-finite training loss at gradient step " +
                                             std::to_string(st.grad_steps));
                }
                st.adam.step(st.online.weights(), grad, cfg.lr);
                ++st.grad_steps;
                ++updates;
                loss_sum += loss;
                if (cfg.polyak < 1.0) {
                    auto& tw = st.target.weights();
                    const auto& ow = st.online.weights();
                    for (size_t i = 0; i < tw.size(); ++i) {
                        tw[i] = cfg.polyak * tw[i] + (1.0 - cfg.polyak) * ow[i];
                    }
                } else if (st.grad_steps % cfg.target_update_interval == 0) {
                    st.target = st.online;
                }
            }
        }

        ++st.episodes;
        st.log.push_back(EpisodeLog{st.episodes, st.env_steps, ep_len, ep_return,
                                    episode_cost(environment.trajectory()), eps,
                                    updates > 0 ? loss_sum / updates : 0.0, st.grad_steps,
                                    episode_done ? reason : env::DoneReason::None});
    }
}

TrainingState train_agent(const env::EnvConfig& env_cfg, const DQNConfig& cfg,
                          long stop_after_env_steps) {
    TrainingState st(env_cfg, cfg);
    train_continue(st, stop_after_env_steps);
    return st;
}

namespace {
constexpr const char* kSchema = "fracdose-dqn-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TrainingState& st,
                     bool include_training_state) {
    nlohmann::json j{
        {"schema", kSchema},
        {"version", kVersion},
        {"dqn", st.cfg.to_json()},
        {"env", st.env_cfg.to_json()},
        {"dims", st.online.dims()},
        {"weights", st.online.weights()},
        {"adam_m", st.adam.m},
        {"adam_v", st.adam.v},
        {"adam_t", st.adam.t},
        {"rng", st.rng.save_state()},
        {"env_steps", st.env_steps},
        {"grad_steps", st.grad_steps},
        {"episodes", st.episodes},
    };
    if (include_training_state) {
        j["target_weights"] = st.target.weights();
        j["replay"] = st.buffer.pack();
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    out << j.dump() << "\n";
}

TrainingState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint " + path.string() + " is not valid JSON: " +
                                 e.what());
    }
    if (!j.contains("schema") || j.at("schema").get<std::string>() != kSchema) {
        throw std::runtime_error("checkpoint schema mismatch in " + path.string());
    }
    if (j.at("version").get<int>() != kVersion) {
        throw std::runtime_error("unsupported checkpoint version in " + path.string());
    }
    const DQNConfig cfg = DQNConfig::from_json(j.at("dqn"));
    const env::EnvConfig env_cfg = env::EnvConfig::from_json(j.at("env"));
    TrainingState st(env_cfg, cfg);
    const auto dims = j.at("dims").get<std::vector<int>>();
    if (dims != st.online.dims()) {
        throw std::runtime_error("checkpoint network shape mismatch in " + path.string());
    }
    auto weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != st.online.parameter_count()) {
        throw std::runtime_error("checkpoint weight count mismatch in " + path.string());
    }
    st.online.weights() = std::move(weights);
    st.adam.m = j.at("adam_m").get<std::vector<double>>();
    st.adam.v = j.at("adam_v").get<std::vector<double>>();
    st.adam.t = j.at("adam_t").get<long>();
    if (st.adam.m.size() != st.online.parameter_count() ||
        st.adam.v.size() != st.online.parameter_count()) {
        throw std::runtime_error("checkpoint optimizer state mismatch in " + path.string());
    }
    st.rng.load_state(j.at("rng").get<std::string>());
    st.env_steps = j.at("env_steps").get<long>();
    st.grad_steps = j.at("grad_steps").get<long>();
    st.episodes = j.at("episodes").get<int>();
    if (j.contains("target_weights")) {
        auto tw = j.at("target_weights").get<std::vector<double>>();
        if (tw.size() != st.online.parameter_count()) {
            throw std::runtime_error("checkpoint target weight mismatch in " + path.string());
        }
        st.target.weights() = std::move(tw);
        const auto replay = j.at("replay").get<std::vector<double>>();
        st.buffer.unpack(replay);
    } else {
        st.target = st.online;
    }
    return st;
}

}  // namespace fracdose::dqn
