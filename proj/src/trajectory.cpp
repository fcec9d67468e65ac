#include "fracdose/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fracdose/csv.hpp"

namespace fracdose {

void Trajectory::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trajectory " + path.string());
    out << "t,S,R,N,phi,u,c,r\n";
    const size_t n = steps();
    for (size_t i = 0; i < time.size(); ++i) {
        const double u = control.empty() ? 0.0 : control[std::min(i, n - 1)];
        out << csv::format_double(time[i]) << ',' << csv::format_double(susceptible[i]) << ','
            << csv::format_double(resistant[i]) << ',' << csv::format_double(total(i)) << ','
            << csv::format_double(phi[i]) << ',' << csv::format_double(u) << ','
            << csv::format_double(growth[i]) << ',' << csv::format_double(-growth[i]) << '\n';
    }
}

Trajectory Trajectory::read_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::Table::read(path);
    const char* names[] = {"t", "S", "R", "N", "phi", "u", "c", "r"};
    int idx[8];
    for (int k = 0; k < 8; ++k) {
        idx[k] = table.column(names[k]);
        if (idx[k] < 0) {
            throw std::runtime_error("trajectory csv missing column '" + std::string(names[k]) +
                                     "' in " + path.string());
        }
    }
    Trajectory traj;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        traj.time.push_back(row[idx[0]]);
        traj.susceptible.push_back(row[idx[1]]);
        traj.resistant.push_back(row[idx[2]]);
        traj.phi.push_back(row[idx[4]]);
        traj.growth.push_back(row[idx[6]]);
        if (i + 1 < table.rows.size()) traj.control.push_back(row[idx[5]]);
    }
    return traj;
}

double episode_cost(const Trajectory& traj) {
    if (traj.time.empty()) throw std::invalid_argument("episode_cost: empty trajectory");
    const double n0 = traj.total(0);
    const double nT = traj.total(traj.time.size() - 1);
    if (!(n0 > 0.0) || !(nT > 0.0)) {
        throw std::runtime_error("episode_cost: nonpositive population");
    }
    return std::log(nT / n0);
}

double mean_resistant_fraction(const Trajectory& traj) {
    if (traj.phi.empty()) throw std::invalid_argument("mean_resistant_fraction: empty trajectory");
    double sum = 0.0;
    for (double v : traj.phi) sum += v;
    return sum / static_cast<double>(traj.phi.size());
}

int toggle_count(const Trajectory& traj) {
    int toggles = 0;
    for (size_t i = 1; i < traj.control.size(); ++i) {
        if (traj.control[i] != traj.control[i - 1]) ++toggles;
    }
    return toggles;
}

std::vector<PulseFrequencyPoint> pulse_frequency(const Trajectory& traj, int window_steps) {
    if (window_steps < 1) throw std::invalid_argument("pulse_frequency: window_steps < 1");
    std::vector<PulseFrequencyPoint> points;
    const size_t n = traj.control.size();
    if (n < static_cast<size_t>(window_steps) + 1 || traj.time.size() < 2) return points;
    const double h = traj.time[1] - traj.time[0];
    const double window_hours = h * window_steps;
    // toggle[i] = 1 if the dose changes entering step i (i >= 1)
    std::vector<int> toggle(n, 0);
    for (size_t i = 1; i < n; ++i) toggle[i] = traj.control[i] != traj.control[i - 1] ? 1 : 0;
    // prefix sums over transitions s+1 .. s+window_steps
    std::vector<int> prefix(n + 1, 0);
    for (size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + toggle[i];
    for (size_t s = 0; s + window_steps < n; ++s) {
        const int count = prefix[s + window_steps + 1] - prefix[s + 1];
        points.push_back({traj.time[s] + 0.5 * window_hours, count / window_hours});
    }
    return points;
}

}  // namespace fracdose
