#pragma once

// Shared helpers for the oracle tests: symbolic output derivatives versus
// finite differences of simulated trajectories.

#include "structid/catalog.hpp"
#include "structid/lie.hpp"
#include "structid/sim.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace structid;

/// Perturbs the synthetic default scenario multiplicatively; the feed level is
/// redrawn and held constant over a short smooth window.
inline sim::Scenario random_scenario(const models::ModelDef& m, std::mt19937_64& rng) {
    sim::Scenario sc = sim::default_scenario(m);
    auto jitter = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() % 10000) / 10000.0);
    };
    for (double& v : sc.initial) v *= std::exp(jitter(-0.2, 0.2));
    for (auto& [name, v] : sc.values) {
        if (name == "c2" && m.name.find("R3") != std::string::npos) continue; // Hill exponent
        v *= std::exp(jitter(-0.15, 0.15));
    }
    sc.horizon = 0.12;
    // third differences divide the per-point error by h^3: the oracle runs
    // use a finer grid and much tighter integration than the defaults
    sc.grid_dt = 5e-4;
    sc.rel_tol = 1e-11;
    sc.abs_tol = 1e-13;
    sc.schedule = {{0.0, 1.0, jitter(4.0, 15.0)}};
    return sc;
}

struct OracleStats {
    int compared = 0;
    double worst_rel = 0.0;
    std::string worst_where;
};

/// Compares the evaluated symbolic y^(k) against the Richardson-refined
/// central difference at several interior grid points. Points where the
/// derivative signal passes through zero (below 1e-5 of its own scale) are
/// not rated relatively.
inline OracleStats compare_symbolic_vs_fd(const models::ModelDef& m, const sim::Scenario& sc,
                                          const sim::Trajectory& tr, int max_order,
                                          double tol_k12, double tol_k3) {
    OracleStats st;
    const lie::LieStack& stack = lie::build_lie_stack(m, max_order);
    const double h = tr.time[1] - tr.time[0];
    for (size_t oi = 0; oi < m.outputs.size(); ++oi) {
        for (int k = 1; k <= max_order; ++k) {
            std::vector<double> fd = sim::finite_difference_outputs(tr, oi, k);
            size_t margin = sim::finite_difference_margin(k);
            double scale = 0, ymax = 0;
            for (size_t i = margin; i + margin < fd.size(); ++i)
                scale = std::max(scale, std::fabs(fd[i]));
            for (size_t i = 0; i < tr.time.size(); ++i)
                ymax = std::max(ymax, std::fabs(tr.outputs[i][oi]));
            if (scale == 0) scale = 1e-30;
            // a k-th difference cannot resolve signals near the round-off
            // floor eps*|y|/h^k; such channels are not ratable at the target
            // tolerance and are skipped
            double floor = 8e-16 * std::max(ymax, 1e-6) / std::pow(h, k);
            if (scale < 1e3 * floor) continue;
            const double tol = k <= 2 ? tol_k12 : tol_k3;
            for (size_t i : {fd.size() / 4, fd.size() / 2, 3 * fd.size() / 4}) {
                if (i < margin || i + margin >= fd.size()) continue;
                sym::DoubleBindings env;
                for (const auto& [name, v] : sc.values)
                    env[m.symbols.find(name)] = v;
                for (size_t s = 0; s < m.states.size(); ++s)
                    env[m.states[s].get()] = tr.states[i][s];
                env[m.inputs[0].get()] = sc.schedule.empty() ? 0.0 : sc.schedule[0].u;
                double symv = sym::evaluate_double(stack.at(static_cast<int>(oi), k).expr, env);
                double denom = std::max(std::fabs(symv), std::fabs(fd[i]));
                // relative error is rated where the signal is materially
                // represented, not near its zero crossings
                if (denom < 0.25 * scale) continue;
                double rel = std::fabs(symv - fd[i]) / denom;
                ++st.compared;
                if (rel > st.worst_rel) {
                    st.worst_rel = rel;
                    st.worst_where = m.name + " output " + m.outputs[oi].name + " order " +
                                     std::to_string(k) + " idx " + std::to_string(i) + " sym " +
                                     std::to_string(symv) + " fd " + std::to_string(fd[i]);
                }
                if (rel > tol) return st; // worst_where already records the failure
            }
        }
    }
    return st;
}

} // namespace testsupport
