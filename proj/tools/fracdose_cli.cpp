#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracdose/experiment.hpp"

using fracdose::experiment::FullConfig;

int main(int argc, char** argv) {
    CLI::App app{"fracdose: dosing-control experiments on the fractional switching model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    uint64_t seed = 0;
    bool seed_set = false;
    double delta = 0.0;
    bool delta_set = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        auto* copt = cmd->add_option("--config", config_path, "JSON config file");
        if (needs_config) copt->required();
        cmd->add_option("--out", out_dir, "output directory")->required();
        cmd->add_option("--seed", seed, "override dqn.seed")->each([&](std::string) {
            seed_set = true;
        });
        cmd->add_option("--delta", delta, "override env.delta (hours per action)")
            ->each([&](std::string) { delta_set = true; });
    };

    // simulate
    auto* simulate = app.add_subcommand("simulate", "roll out a policy and write trajectories");
    std::string policy_spec = "constant1";
    std::vector<double> mus;
    add_common(simulate);
    simulate->add_option("--policy", policy_spec,
                         "constant0 | constant1 | pulsing:LO,HI | pulsing-swept | "
                         "dqn:CHECKPOINT | replay:CSV");
    simulate->add_option("--mu", mus, "memory order(s) to simulate (repeatable)");

    // sweep-thresholds
    auto* sweep = app.add_subcommand("sweep-thresholds", "grid search pulsing thresholds");
    double sweep_mu = 0.0;
    bool sweep_mu_set = false;
    add_common(sweep);
    sweep->add_option("--mu", sweep_mu, "override model mu")->each([&](std::string) {
        sweep_mu_set = true;
    });

    // train
    auto* train = app.add_subcommand("train", "train the Double DQN agent");
    double train_mu = 0.0;
    bool train_mu_set = false;
    add_common(train);
    train->add_option("--mu", train_mu, "override model mu")->each([&](std::string) {
        train_mu_set = true;
    });

    // report
    auto* report = app.add_subcommand("report", "aggregate run directories into analysis CSVs");
    std::vector<std::string> run_dirs;
    report->add_option("--out", out_dir, "output directory")->required();
    report->add_option("runs", run_dirs, "run directories with manifests")->required();

    // delta-sweep
    auto* dsweep = app.add_subcommand("delta-sweep", "best trained cost per action interval");
    std::vector<double> deltas;
    int runs_per_delta = 5;
    add_common(dsweep);
    dsweep->add_option("--deltas", deltas, "action intervals to sweep")->required();
    dsweep->add_option("--runs-per-delta", runs_per_delta, "training runs per interval");

    CLI11_PARSE(app, argc, argv);

    try {
        FullConfig cfg;
        if (!config_path.empty()) {
            cfg = FullConfig::load(config_path);
            if (seed_set) cfg.dqn.seed = seed;
            if (delta_set) cfg.env.delta = delta;
        }
        if (simulate->parsed()) {
            if (mus.empty()) mus.push_back(cfg.env.params.mu);
            fracdose::experiment::run_simulate(cfg, policy_spec, mus, out_dir);
        } else if (sweep->parsed()) {
            if (sweep_mu_set) cfg.env.params.mu = sweep_mu;
            fracdose::experiment::run_sweep(cfg, out_dir);
        } else if (train->parsed()) {
            if (train_mu_set) cfg.env.params.mu = train_mu;
            fracdose::experiment::run_train(cfg, out_dir);
        } else if (report->parsed()) {
            std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
            fracdose::experiment::run_report(dirs, out_dir);
        } else if (dsweep->parsed()) {
            fracdose::experiment::run_delta_sweep(cfg, deltas, runs_per_delta, out_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
