#include "fracdose/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fracdose/csv.hpp"

namespace fs = std::filesystem;

namespace fracdose::experiment {

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void prepare_dir(const fs::path& dir) {
    fs::create_directories(dir);
    if (fs::exists(dir / "manifest.json")) {
        throw std::runtime_error("output directory already holds a manifest: " + dir.string());
    }
}

std::string mu_tag(double mu) { return "mu" + csv::format_double(mu); }

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ':' || c == ',' || c == '/' || c == '\\' || c == '.') c = '-';
    }
    return s;
}

int reason_code(env::DoneReason r) {
    switch (r) {
        case env::DoneReason::None: return 0;
        case env::DoneReason::Horizon: return 1;
        case env::DoneReason::PopulationExceeded: return 2;
    }
    return 0;
}

struct PolicySpec {
    std::string kind;  // constant, pulsing, pulsing-swept, dqn, replay
    double value0 = 0.0;
    double value1 = 0.0;
    std::string path;
};

PolicySpec parse_policy_spec(const std::string& spec) {
    if (spec == "constant0") return {"constant", 0.0, 0.0, ""};
    if (spec == "constant1") return {"constant", 1.0, 0.0, ""};
    if (spec == "pulsing-swept") return {"pulsing-swept", 0.0, 0.0, ""};
    if (spec.rfind("pulsing:", 0) == 0) {
        const auto body = spec.substr(8);
        const auto parts = csv::split(body, ',');
        if (parts.size() != 2) {
            throw std::invalid_argument("pulsing spec needs two thresholds: " + spec);
        }
        return {"pulsing", csv::parse_double(parts[0]), csv::parse_double(parts[1]), ""};
    }
    if (spec.rfind("dqn:", 0) == 0) return {"dqn", 0.0, 0.0, spec.substr(4)};
    if (spec.rfind("replay:", 0) == 0) return {"replay", 0.0, 0.0, spec.substr(7)};
    throw std::invalid_argument("unknown policy spec '" + spec + "'");
}

baselines::EvalResult evaluate_spec(const PolicySpec& spec, const env::EnvConfig& cfg,
                                    const SweepSpec& sweep) {
    const baselines::EvalOptions opts{};  // fixed-horizon comparison rollouts
    if (spec.kind == "constant") {
        const int dose = spec.value0 != 0.0 ? 1 : 0;
        return baselines::evaluate_policy(
            baselines::FractionPolicy([dose](double) { return dose; }), cfg, opts);
    }
    if (spec.kind == "pulsing" || spec.kind == "pulsing-swept") {
        double lo = spec.value0, hi = spec.value1;
        if (spec.kind == "pulsing-swept") {
            // thresholds from the memoryless sweep, then applied at cfg's mu
            env::EnvConfig memoryless = cfg;
            memoryless.params.mu = 1.0;
            const auto swept = baselines::sweep_thresholds(memoryless, sweep.lo, sweep.hi,
                                                           sweep.step);
            lo = swept.best_lo;
            hi = swept.best_hi;
        }
        baselines::PulsingPolicy policy(lo, hi);
        return baselines::evaluate_policy(
            baselines::FractionPolicy([policy](double phi) mutable { return policy.act(phi); }),
            cfg, opts);
    }
    if (spec.kind == "dqn") {
        const auto state = dqn::load_checkpoint(spec.path);
        if (state.env_cfg.frames != cfg.frames) {
            throw std::runtime_error("checkpoint frame count does not match the environment");
        }
        const dqn::QNetwork net = state.online;
        return baselines::evaluate_policy(
            baselines::GrowthPolicy(
                [net](const env::Observation& obs) { return dqn::greedy_action(net, obs); }),
            cfg, opts);
    }
    if (spec.kind == "replay") {
        const Trajectory source = Trajectory::read_csv(spec.path);
        std::vector<int> actions(source.control.size());
        for (size_t i = 0; i < actions.size(); ++i) {
            actions[i] = source.control[i] >= 0.5 ? 1 : 0;
        }
        return baselines::evaluate_schedule(actions, cfg, opts);
    }
    throw std::invalid_argument("unhandled policy kind " + spec.kind);
}

void write_table(const fs::path& path, const std::string& header,
                 const std::vector<std::vector<double>>& rows,
                 const std::string& comment = "") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (!comment.empty()) out << "# " << comment << "\n";
    out << header << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv::format_double(row[i]);
        }
        out << '\n';
    }
}

}  // namespace

nlohmann::json FullConfig::to_json() const {
    return nlohmann::json{
        {"model", env.params.to_json()},
        {"env",
         {{"delta", env.delta},
          {"frames", env.frames},
          {"horizon", env.horizon},
          {"x0", {env.x0.susceptible, env.x0.resistant}}}},
        {"dqn", dqn.to_json()},
        {"sweep", {{"lo", sweep.lo}, {"hi", sweep.hi}, {"step", sweep.step}}},
    };
}

FullConfig FullConfig::from_json(const nlohmann::json& j) {
    FullConfig cfg;
    nlohmann::json env_json = j.at("env");
    env_json["model"] = j.at("model");
    cfg.env = env::EnvConfig::from_json(env_json);
    cfg.dqn = dqn::DQNConfig::from_json(j.at("dqn"));
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        cfg.sweep = SweepSpec{s.at("lo").get<double>(), s.at("hi").get<double>(),
                              s.at("step").get<double>()};
    }
    return cfg;
}

FullConfig FullConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    const auto j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    return from_json(j);
}

void Manifest::write(const fs::path& dir) const {
    nlohmann::json j{
        {"command", command},       {"config", config},
        {"args", args},             {"code_version", code_version},
        {"started_utc", started_utc}, {"finished_utc", finished_utc},
        {"outputs", outputs},
    };
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << j.dump(2) << "\n";
}

Manifest Manifest::read(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::runtime_error("no manifest in " + dir.string());
    const auto j = nlohmann::json::parse(in);
    Manifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.args = j.at("args");
    m.code_version = j.at("code_version").get<std::string>();
    m.started_utc = j.at("started_utc").get<std::string>();
    m.finished_utc = j.at("finished_utc").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
}

std::vector<fs::path> run_simulate(const FullConfig& cfg, const std::string& policy_spec,
                                   const std::vector<double>& mus, const fs::path& out_dir) {
    if (mus.empty()) throw std::invalid_argument("simulate needs at least one mu");
    prepare_dir(out_dir);
    Manifest manifest;
    manifest.command = "simulate";
    manifest.config = cfg.to_json();
    manifest.args = nlohmann::json{{"policy", policy_spec}, {"mus", mus}};
    manifest.code_version = kCodeVersion;
    manifest.started_utc = utc_now();

    const PolicySpec spec = parse_policy_spec(policy_spec);
    std::vector<fs::path> outputs;
    nlohmann::json meta = nlohmann::json::array();
    for (double mu : mus) {
        env::EnvConfig ecfg = cfg.env;
        ecfg.params.mu = mu;
        const auto result = evaluate_spec(spec, ecfg, cfg.sweep);
        const std::string name = "traj_" + sanitize(policy_spec) + "_" + mu_tag(mu) + ".csv";
        result.trajectory.write_csv(out_dir / name);
        outputs.push_back(out_dir / name);
        manifest.outputs.push_back(name);
        meta.push_back({{"file", name},
                        {"policy", policy_spec},
                        {"mu", mu},
                        {"cost", result.summary.cost},
                        {"mean_phi", result.summary.mean_phi},
                        {"toggles", result.summary.toggles},
                        {"steps", result.summary.steps},
                        {"done_reason", reason_code(result.summary.reason)}});
    }
    manifest.args["trajectories"] = meta;
    manifest.finished_utc = utc_now();
    manifest.write(out_dir);
    return outputs;
}

std::vector<fs::path> run_sweep(const FullConfig& cfg, const fs::path& out_dir) {
    prepare_dir(out_dir);
    Manifest manifest;
    manifest.command = "sweep-thresholds";
    manifest.config = cfg.to_json();
    manifest.args = nlohmann::json::object();
    manifest.code_version = kCodeVersion;
    manifest.started_utc = utc_now();

    const auto result = baselines::sweep_thresholds(cfg.env, cfg.sweep.lo, cfg.sweep.hi,
                                                    cfg.sweep.step);
    std::vector<std::vector<double>> rows;
    for (const auto& row : result.table) rows.push_back({row.phi_lo, row.phi_hi, row.cost});
    write_table(out_dir / "sweep.csv", "phi_l,phi_h,cost", rows);
    write_table(out_dir / "sweep_best.csv", "phi_l,phi_h,cost",
                {{result.best_lo, result.best_hi, result.best_cost}});

    manifest.args["best"] = {{"phi_l", result.best_lo},
                             {"phi_h", result.best_hi},
                             {"cost", result.best_cost}};
    manifest.outputs = {"sweep.csv", "sweep_best.csv"};
    manifest.finished_utc = utc_now();
    manifest.write(out_dir);
    return {out_dir / "sweep.csv", out_dir / "sweep_best.csv"};
}

std::vector<fs::path> run_train(const FullConfig& cfg, const fs::path& out_dir) {
    prepare_dir(out_dir);
    Manifest manifest;
    manifest.command = "train";
    manifest.config = cfg.to_json();
    manifest.args = nlohmann::json{{"seed", cfg.dqn.seed}};
    manifest.code_version = kCodeVersion;
    manifest.started_utc = utc_now();

    const auto state = dqn::train_agent(cfg.env, cfg.dqn);

    dqn::save_checkpoint(out_dir / "checkpoint.json", state);

    std::vector<std::vector<double>> rows;
    for (const auto& e : state.log) {
        rows.push_back({static_cast<double>(e.episode), static_cast<double>(e.end_step),
                        static_cast<double>(e.length), e.return_sum, e.cost, e.epsilon,
                        e.loss_mean, static_cast<double>(e.grad_steps),
                        static_cast<double>(reason_code(e.reason))});
    }
    write_table(out_dir / "training_log.csv",
                "episode,end_step,length,return,cost,epsilon,loss_mean,grad_steps,done_reason",
                rows);

    // Fixed-horizon greedy rollout for the figure-level reports.
    const dqn::QNetwork net = state.online;
    const auto greedy = baselines::evaluate_policy(
        baselines::GrowthPolicy(
            [net](const env::Observation& obs) { return dqn::greedy_action(net, obs); }),
        cfg.env);
    const std::string traj_name = "traj_greedy_" + mu_tag(cfg.env.params.mu) + ".csv";
    greedy.trajectory.write_csv(out_dir / traj_name);

    manifest.args["greedy_cost"] = greedy.summary.cost;
    manifest.args["episodes"] = state.episodes;
    manifest.args["trajectories"] = nlohmann::json::array({{{"file", traj_name},
                                                            {"policy", "dqn-greedy"},
                                                            {"mu", cfg.env.params.mu},
                                                            {"cost", greedy.summary.cost},
                                                            {"mean_phi", greedy.summary.mean_phi},
                                                            {"toggles", greedy.summary.toggles},
                                                            {"steps", greedy.summary.steps}}});
    manifest.outputs = {"checkpoint.json", "training_log.csv", traj_name};
    manifest.finished_utc = utc_now();
    manifest.write(out_dir);
    return {out_dir / "checkpoint.json", out_dir / "training_log.csv", out_dir / traj_name};
}

std::vector<fs::path> run_report(const std::vector<fs::path>& run_dirs,
                                 const fs::path& out_dir) {
    if (run_dirs.empty()) throw std::invalid_argument("report needs at least one run directory");
    prepare_dir(out_dir);
    Manifest manifest;
    manifest.command = "report";
    manifest.config = nlohmann::json::object();
    manifest.args = nlohmann::json::array();
    for (const auto& d : run_dirs) manifest.args.push_back(d.string());
    manifest.code_version = kCodeVersion;
    manifest.started_utc = utc_now();

    std::ofstream costs(out_dir / "policy_mu_cost.csv", std::ios::binary);
    costs << "policy,mu,cost\n";
    std::ofstream freq(out_dir / "pulse_frequency.csv", std::ios::binary);
    freq << "# toggle rate over a sliding 1 h window, one row per window midpoint\n";
    freq << "policy,mu,t_mid,toggles_per_hour\n";
    std::ofstream phi(out_dir / "mean_phi.csv", std::ios::binary);
    phi << "# mean_phi is the whole-episode time average of the resistant fraction\n";
    phi << "policy,mu,mean_phi\n";
    std::vector<std::vector<double>> delta_rows;

    for (const auto& dir : run_dirs) {
        const Manifest m = Manifest::read(dir);
        if (m.command == "delta-sweep") {
            const csv::Table best = csv::Table::read(dir / "delta_best.csv");
            const int dcol = best.column("delta");
            const int ccol = best.column("best_cost");
            for (const auto& row : best.rows) delta_rows.push_back({row[dcol], row[ccol]});
            continue;
        }
        if (!m.args.contains("trajectories")) continue;
        for (const auto& meta : m.args.at("trajectories")) {
            const std::string file = meta.at("file").get<std::string>();
            const std::string policy = meta.at("policy").get<std::string>();
            const double mu = meta.at("mu").get<double>();
            const Trajectory traj = Trajectory::read_csv(dir / file);
            costs << policy << ',' << csv::format_double(mu) << ','
                  << csv::format_double(episode_cost(traj)) << '\n';
            phi << policy << ',' << csv::format_double(mu) << ','
                << csv::format_double(mean_resistant_fraction(traj)) << '\n';
            const double h = traj.time.size() > 1 ? traj.time[1] - traj.time[0] : 0.01;
            const int window = std::max(1, static_cast<int>(std::lround(1.0 / h)));
            for (const auto& point : pulse_frequency(traj, window)) {
                freq << policy << ',' << csv::format_double(mu) << ','
                     << csv::format_double(point.t_mid) << ','
                     << csv::format_double(point.toggles_per_hour) << '\n';
            }
        }
    }
    costs.close();
    freq.close();
    phi.close();

    std::vector<fs::path> outputs = {out_dir / "policy_mu_cost.csv",
                                     out_dir / "pulse_frequency.csv", out_dir / "mean_phi.csv"};
    manifest.outputs = {"policy_mu_cost.csv", "pulse_frequency.csv", "mean_phi.csv"};
    if (!delta_rows.empty()) {
        write_table(out_dir / "delta_best_cost.csv", "delta,best_cost", delta_rows);
        outputs.push_back(out_dir / "delta_best_cost.csv");
        manifest.outputs.push_back("delta_best_cost.csv");
    }
    manifest.finished_utc = utc_now();
    manifest.write(out_dir);
    return outputs;
}

std::vector<fs::path> run_delta_sweep(const FullConfig& cfg, const std::vector<double>& deltas,
                                      int runs_per_delta, const fs::path& out_dir) {
    if (deltas.empty()) throw std::invalid_argument("delta sweep needs at least one delta");
    for (double d : deltas) {
        if (!(d > 0.0)) throw std::invalid_argument("deltas must be positive");
    }
    if (runs_per_delta < 1) throw std::invalid_argument("runs_per_delta must be >= 1");
    prepare_dir(out_dir);
    Manifest manifest;
    manifest.command = "delta-sweep";
    manifest.config = cfg.to_json();
    manifest.args = nlohmann::json{{"deltas", deltas}, {"runs_per_delta", runs_per_delta}};
    manifest.code_version = kCodeVersion;
    manifest.started_utc = utc_now();

    const double episode_hours = cfg.env.delta * cfg.env.horizon;
    struct Job {
        double delta;
        int run;
        dqn::DQNConfig dqn;
        double cost;
    };
    std::vector<Job> jobs;
    for (size_t di = 0; di < deltas.size(); ++di) {
        for (int r = 0; r < runs_per_delta; ++r) {
            dqn::DQNConfig dcfg = cfg.dqn;
            dcfg.seed = cfg.dqn.seed + 1000 * di + r;
            if (r > 0) {
                // random draw from the documented sweep ranges; run 0 keeps
                // the finetuned values
                Rng rng(dcfg.seed * 2654435761u + 17);
                const int batches[] = {16, 32, 64};
                dcfg.batch = batches[rng.uniform_int(3)];
                dcfg.eps_floor = rng.uniform(0.01, 0.2);
                dcfg.lr = std::pow(10.0, rng.uniform(-5.0, -3.0));
                const int intervals[] = {1000, 5000, 10000, 30000};
                dcfg.target_update_interval = intervals[rng.uniform_int(4)];
            }
            jobs.push_back(Job{deltas[di], r, dcfg, 0.0});
        }
    }

    const int count = static_cast<int>(jobs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int k = 0; k < count; ++k) {
        env::EnvConfig ecfg = cfg.env;
        ecfg.delta = jobs[k].delta;
        ecfg.horizon = std::max(1, static_cast<int>(std::lround(episode_hours / jobs[k].delta)));
        const auto state = dqn::train_agent(ecfg, jobs[k].dqn);
        const dqn::QNetwork net = state.online;
        jobs[k].cost = baselines::evaluate_policy(
                           baselines::GrowthPolicy([net](const env::Observation& obs) {
                               return dqn::greedy_action(net, obs);
                           }),
                           ecfg)
                           .summary.cost;
    }

    std::vector<std::vector<double>> rows;
    for (const auto& job : jobs) {
        rows.push_back({job.delta, static_cast<double>(job.run), job.cost,
                        static_cast<double>(job.dqn.batch), job.dqn.lr, job.dqn.eps_floor,
                        static_cast<double>(job.dqn.target_update_interval)});
    }
    write_table(out_dir / "delta_sweep.csv",
                "delta,run,cost,batch,lr,eps_floor,target_update_interval", rows);

    std::vector<std::vector<double>> best_rows;
    for (double d : deltas) {
        int best = -1;
        for (int k = 0; k < count; ++k) {
            if (jobs[k].delta != d) continue;
            if (best < 0 || jobs[k].cost < jobs[best].cost) best = k;
        }
        best_rows.push_back({d, jobs[best].cost, static_cast<double>(jobs[best].run)});
    }
    write_table(out_dir / "delta_best.csv", "delta,best_cost,best_run", best_rows);

    manifest.outputs = {"delta_sweep.csv", "delta_best.csv"};
    manifest.finished_utc = utc_now();
    manifest.write(out_dir);
    return {out_dir / "delta_sweep.csv", out_dir / "delta_best.csv"};
}

std::vector<fs::path> rerun_from_manifest(const fs::path& run_dir, const fs::path& out_dir) {
    const Manifest m = Manifest::read(run_dir);
    if (m.command == "simulate") {
        const FullConfig cfg = FullConfig::from_json(m.config);
        return run_simulate(cfg, m.args.at("policy").get<std::string>(),
                            m.args.at("mus").get<std::vector<double>>(), out_dir);
    }
    if (m.command == "sweep-thresholds") {
        return run_sweep(FullConfig::from_json(m.config), out_dir);
    }
    if (m.command == "train") {
        return run_train(FullConfig::from_json(m.config), out_dir);
    }
    if (m.command == "delta-sweep") {
        return run_delta_sweep(FullConfig::from_json(m.config),
                               m.args.at("deltas").get<std::vector<double>>(),
                               m.args.at("runs_per_delta").get<int>(), out_dir);
    }
    if (m.command == "report") {
        std::vector<fs::path> dirs;
        for (const auto& d : m.args) dirs.emplace_back(d.get<std::string>());
        return run_report(dirs, out_dir);
    }
    throw std::runtime_error("manifest command '" + m.command + "' cannot be re-run");
}

}  // namespace fracdose::experiment
