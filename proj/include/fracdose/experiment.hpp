#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdose/baselines.hpp"
#include "fracdose/control_env.hpp"
#include "fracdose/dqn.hpp"

namespace fracdose::experiment {

inline constexpr const char* kCodeVersion = "fracdose 0.1.0";

struct SweepSpec {
    double lo = 0.1;
    double hi = 0.9;
    double step = 0.04;
};

// One resolved experiment configuration (model + environment + training +
// sweep grid). The on-disk format is JSON with optional // comments.
struct FullConfig {
    env::EnvConfig env;  // carries the model
    dqn::DQNConfig dqn;
    SweepSpec sweep;

    nlohmann::json to_json() const;
    static FullConfig from_json(const nlohmann::json& j);
    static FullConfig load(const std::filesystem::path& path);
};

// Every artifact directory holds exactly one manifest; re-running the
// stored command with the stored config reproduces the artifacts byte for
// byte (the manifest's own timestamps are the only thing that varies).
struct Manifest {
    std::string command;
    nlohmann::json config;
    nlohmann::json args;
    std::string code_version;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::string> outputs;  // file names relative to the directory

    void write(const std::filesystem::path& dir) const;
    static Manifest read(const std::filesystem::path& dir);
};

// Policy specs: constant0 | constant1 | pulsing:LO,HI | pulsing-swept |
// dqn:CHECKPOINT | replay:TRAJECTORY_CSV
std::vector<std::filesystem::path> run_simulate(const FullConfig& cfg,
                                                const std::string& policy_spec,
                                                const std::vector<double>& mus,
                                                const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> run_sweep(const FullConfig& cfg,
                                             const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> run_train(const FullConfig& cfg,
                                             const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> run_report(const std::vector<std::filesystem::path>& run_dirs,
                                              const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> run_delta_sweep(const FullConfig& cfg,
                                                   const std::vector<double>& deltas,
                                                   int runs_per_delta,
                                                   const std::filesystem::path& out_dir);

// Replays a run directory's manifest into a fresh directory.
std::vector<std::filesystem::path> rerun_from_manifest(const std::filesystem::path& run_dir,
                                                       const std::filesystem::path& out_dir);

}  // namespace fracdose::experiment
