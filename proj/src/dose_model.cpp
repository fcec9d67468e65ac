#include "fracdose/dose_model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fracdose::model {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void check_unit_interval(double u, const char* name) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0,1], got " +
                                    std::to_string(u));
    }
}

}  // namespace

const char* to_string(DoseResponse g) {
    switch (g) {
        case DoseResponse::Identity: return "identity";
        case DoseResponse::Square: return "square";
        case DoseResponse::Smoothstep: return "smoothstep";
    }
    return "identity";
}

DoseResponse dose_response_from_string(const std::string& name) {
    if (name == "identity") return DoseResponse::Identity;
    if (name == "square") return DoseResponse::Square;
    if (name == "smoothstep") return DoseResponse::Smoothstep;
    throw std::invalid_argument("unknown dose_response '" + name + "'");
}

double dose_response(DoseResponse g, double u) {
    check_unit_interval(u, "dose u");
    switch (g) {
        case DoseResponse::Identity: return u;
        case DoseResponse::Square: return u * u;
        case DoseResponse::Smoothstep: return u * u * (3.0 - 2.0 * u);
    }
    return u;
}

void ModelParams::validate() const {
    require(kappa_s_max > 0.0, "kappa_s_max must be > 0");
    require(kappa_s_min < 0.0, "kappa_s_min must be < 0");
    require(kappa_r_max > 0.0, "kappa_r_max must be > 0");
    require(kappa_r_min < 0.0, "kappa_r_min must be < 0");
    require(alpha_max > 0.0, "alpha_max must be > 0");
    require(delta_max > 0.0, "delta_max must be > 0");
    require(mu > 0.0 && mu <= 1.0, "mu must lie in (0,1]");
}

nlohmann::json ModelParams::to_json() const {
    return nlohmann::json{
        {"kappa_s_max", kappa_s_max}, {"kappa_s_min", kappa_s_min},
        {"kappa_r_max", kappa_r_max}, {"kappa_r_min", kappa_r_min},
        {"alpha_max", alpha_max},     {"delta_max", delta_max},
        {"mu", mu},                   {"dose_response", to_string(g)},
    };
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
    ModelParams p;
    // All fields are required; missing keys throw.
    p.kappa_s_max = j.at("kappa_s_max").get<double>();
    p.kappa_s_min = j.at("kappa_s_min").get<double>();
    p.kappa_r_max = j.at("kappa_r_max").get<double>();
    p.kappa_r_min = j.at("kappa_r_min").get<double>();
    p.alpha_max = j.at("alpha_max").get<double>();
    p.delta_max = j.at("delta_max").get<double>();
    p.mu = j.at("mu").get<double>();
    p.g = dose_response_from_string(j.at("dose_response").get<std::string>());
    p.validate();
    return p;
}

ModelParams ModelParams::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model config " + path.string());
    auto j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    return from_json(j);
}

void ModelParams::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model config " + path.string());
    out << to_json().dump(2) << "\n";
}

Rates effective_rates(const ModelParams& p, double u) {
    const double gu = dose_response(p.g, u);
    return Rates{
        p.kappa_s_max - (p.kappa_s_max - p.kappa_s_min) * gu,
        p.kappa_r_min + (p.kappa_r_max - p.kappa_r_min) * gu,
        p.alpha_max * gu,
        p.delta_max * (1.0 - gu),
    };
}

std::array<double, 4> transition_matrix(const ModelParams& p, double u) {
    const Rates r = effective_rates(p, u);
    return {r.kappa_s - r.alpha, r.delta, r.alpha, r.kappa_r - r.delta};
}

double riccati_rhs(const ModelParams& p, double phi, double u) {
    check_unit_interval(phi, "phi");
    const Rates r = effective_rates(p, u);
    return (r.kappa_s - r.kappa_r) * phi * phi +
           (r.kappa_r - r.kappa_s - r.delta - r.alpha) * phi + r.alpha;
}

double instantaneous_growth(const ModelParams& p, double phi, double u) {
    check_unit_interval(phi, "phi");
    const Rates r = effective_rates(p, u);
    return r.kappa_s * (1.0 - phi) + r.kappa_r * phi;
}

double PopulationState::resistant_fraction() const {
    const double n = total();
    if (!(n > 0.0)) {
        throw std::domain_error("resistant fraction undefined for empty population");
    }
    return resistant / n;
}

void PopulationState::validate() const {
    require(susceptible >= 0.0 && resistant >= 0.0, "subpopulations must be nonnegative");
}

}  // namespace fracdose::model
