#pragma once

#include <filesystem>
#include <vector>

namespace fracdose {

// One simulated rollout of the two-phenotype system on a fixed time grid.
// All per-node sequences have steps()+1 entries; control has one entry per
// step (the dose held over [t_i, t_{i+1})). growth[i] is the realized
// per-step growth rate log(N_i / N_{i-1}) / h, with growth[0] = 0.
struct Trajectory {
    std::vector<double> time;
    std::vector<double> susceptible;
    std::vector<double> resistant;
    std::vector<double> control;
    std::vector<double> phi;
    std::vector<double> growth;

    size_t steps() const { return control.size(); }
    double total(size_t i) const { return susceptible[i] + resistant[i]; }

    // Columns: t,S,R,N,phi,u,c,r. The control column repeats the final
    // step's dose on the last row; c and r are 0 on the first row.
    void write_csv(const std::filesystem::path& path) const;
    static Trajectory read_csv(const std::filesystem::path& path);
};

// log N(T)/N(0); negative values mean net kill.
double episode_cost(const Trajectory& traj);

// Whole-episode time average of the resistant fraction.
double mean_resistant_fraction(const Trajectory& traj);

// Number of steps whose dose differs from the previous step's.
int toggle_count(const Trajectory& traj);

struct PulseFrequencyPoint {
    double t_mid;        // hours
    double toggles_per_hour;
};

// Sliding-window toggle rate: window w starting at step s counts dose
// changes over the window_steps transitions beginning inside the window,
// so an every-step alternation saturates at 1/h toggles per hour.
std::vector<PulseFrequencyPoint> pulse_frequency(const Trajectory& traj, int window_steps);

}  // namespace fracdose
