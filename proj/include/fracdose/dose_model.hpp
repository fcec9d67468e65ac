#pragma once

#include <array>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace fracdose::model {

// Monotone dose-response map g : [0,1] -> [0,1] with g(0)=0, g(1)=1.
enum class DoseResponse { Identity, Square, Smoothstep };

const char* to_string(DoseResponse g);
DoseResponse dose_response_from_string(const std::string& name);
double dose_response(DoseResponse g, double u);

// Rate constants of the two-phenotype switching model. All rates are per hour.
struct ModelParams {
    double kappa_s_max = 0.08;   // susceptible growth without drug, > 0
    double kappa_s_min = -0.12;  // susceptible net rate at full dose, < 0
    double kappa_r_max = 0.08;   // resistant growth at full dose (drug addiction), > 0
    double kappa_r_min = -0.12;  // resistant net rate without drug, < 0
    double alpha_max = 0.3;      // S -> R switching rate at full dose, > 0
    double delta_max = 0.3;      // R -> S switching rate without drug, > 0
    double mu = 1.0;             // derivative order / memory strength, in (0,1]
    DoseResponse g = DoseResponse::Identity;

    void validate() const;  // throws std::invalid_argument

    nlohmann::json to_json() const;
    static ModelParams from_json(const nlohmann::json& j);
    static ModelParams load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

struct Rates {
    double kappa_s;
    double kappa_r;
    double alpha;
    double delta;
};

// kappa_s = kappa_s_max - (kappa_s_max - kappa_s_min) g(u)
// kappa_r = kappa_r_min + (kappa_r_max - kappa_r_min) g(u)
// alpha   = alpha_max g(u)
// delta   = delta_max (1 - g(u))
Rates effective_rates(const ModelParams& p, double u);

// Row-major 2x2 rate matrix [[ks - a, d], [a, kr - d]] acting on [S, R].
std::array<double, 4> transition_matrix(const ModelParams& p, double u);

// d(phi)/dt for the resistant fraction phi = R/(S+R) in the memoryless case:
// (ks - kr) phi^2 + (kr - ks - d - a) phi + a
double riccati_rhs(const ModelParams& p, double phi, double u);

// Population-weighted net growth rate ks (1 - phi) + kr phi.
double instantaneous_growth(const ModelParams& p, double phi, double u);

struct PopulationState {
    double susceptible = 1000.0;
    double resistant = 0.0;

    double total() const { return susceptible + resistant; }
    double resistant_fraction() const;  // requires total() > 0
    void validate() const;
};

}  // namespace fracdose::model
