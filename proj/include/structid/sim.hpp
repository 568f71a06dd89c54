#pragma once

#include "structid/model.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace structid::sim {

using models::ModelDef;

struct FeedEvent {
    double start = 0.0;
    double duration = 0.0;
    double u = 0.0; // feed volume flow, L/day
};

struct Scenario {
    std::vector<double> initial;          // per state, positive
    std::vector<FeedEvent> schedule;      // non-overlapping
    std::map<std::string, double> values; // every non-state symbol by name
    double horizon = 1.0;
    double grid_dt = 1e-3;      // days
    double offline_interval = 7.0; // lab-sampling cadence for offline outputs
    double water_scale = 1.0;   // integrate the water state divided by this
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
};

struct Trajectory {
    std::vector<double> time;
    std::vector<std::vector<double>> states;   // [time][state]
    std::vector<std::vector<double>> outputs;  // [time][output], continuous
    std::vector<std::vector<double>> held;     // [time][output], offline sample-and-hold
    bool flagged = false;       // left the positive/finite region (run kept, marked)
    std::string flag_reason;
};

struct StiffnessFailure : std::runtime_error {
    double t;
    StiffnessFailure(double at, const std::string& msg) : std::runtime_error(msg), t(at) {}
};

struct GridTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive embedded Runge-Kutta 4(5) with exact restarts at feed switches;
/// states are recorded on the uniform grid.
Trajectory integrate(const ModelDef& m, const Scenario& sc);

/// Central finite differences of order k (k <= 3) with one Richardson
/// refinement step; requires grid_dt <= 1e-3 d. Valid sample indices are
/// [margin, size - margin) with margin = 2k.
std::vector<double> finite_difference_outputs(const Trajectory& tr, size_t output_index,
                                              int order);
size_t finite_difference_margin(int order);

/// The repository's synthetic positive value set (data/synthetic_values.json):
/// plausible magnitudes chosen for numerical robustness, not taken from any
/// published source. Returns name -> value for every non-state symbol plus
/// per-state initial values and inlet concentrations.
struct ValueSet {
    std::map<std::string, double> values;
    std::vector<double> initial; // per state
};
ValueSet synthetic_values(const ModelDef& m, const std::string& data_dir = {});

Scenario default_scenario(const ModelDef& m, const std::string& data_dir = {});
Scenario load_scenario(const std::string& path, const ModelDef& m);

void write_trajectory_csv(std::ostream& out, const ModelDef& m, const Trajectory& tr);

} // namespace structid::sim
