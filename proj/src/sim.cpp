#include "structid/sim.hpp"

#include "structid/expr.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>

namespace structid::sim {

using namespace structid::sym;

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

std::vector<SymbolPtr> slot_layout(const ModelDef& m) {
    std::vector<SymbolPtr> slots;
    for (const auto& s : m.states) slots.push_back(s);
    for (const auto& s : m.inputs) slots.push_back(s);
    for (const auto& s : m.parameters) slots.push_back(s);
    for (const auto& s : m.inlets) slots.push_back(s);
    for (const auto& s : m.constants) slots.push_back(s);
    return slots;
}

std::vector<ExprPtr> output_exprs(const ModelDef& m) {
    std::vector<ExprPtr> v;
    for (const auto& o : m.outputs) v.push_back(o.expr);
    return v;
}

struct Rhs {
    const ModelDef& m;
    std::vector<SymbolPtr> slots;
    CompiledEval dyn;
    CompiledEval out;
    std::vector<double> fixed; // values for non-state slots (u updated per segment)
    size_t nx;
    int u_slot = -1;
    std::vector<double> scale; // state scaling (water state / water_scale)
    std::vector<double> buf;

    Rhs(const ModelDef& model, const Scenario& sc)
        : m(model),
          slots(slot_layout(model)),
          dyn(model.dynamics, slots),
          out(output_exprs(model), slots),
          nx(model.states.size()) {
        fixed.assign(slots.size(), 0.0);
        scale.assign(nx, 1.0);
        if (m.water_state >= 0) scale[static_cast<size_t>(m.water_state)] = sc.water_scale;
        for (size_t i = nx; i < slots.size(); ++i) {
            const auto& s = slots[i];
            if (s->kind == SymbolKind::Input) {
                u_slot = static_cast<int>(i);
                continue;
            }
            auto it = sc.values.find(s->name);
            if (it == sc.values.end())
                throw std::invalid_argument(m.name + ": scenario does not bind symbol '" +
                                            s->name + "'");
            fixed[i] = it->second;
        }
    }

    void load(const std::vector<double>& z, double u) {
        buf.assign(fixed.begin(), fixed.end());
        for (size_t i = 0; i < nx; ++i) buf[i] = z[i] * scale[i];
        if (u_slot >= 0) buf[static_cast<size_t>(u_slot)] = u;
    }

    void deriv(const std::vector<double>& z, double u, std::vector<double>& dz) {
        load(z, u);
        dyn.eval(buf, dz);
        for (size_t i = 0; i < nx; ++i) dz[i] /= scale[i];
    }

    void measure(const std::vector<double>& z, double u, std::vector<double>& y) {
        load(z, u);
        out.eval(buf, y);
    }
};

double feed_at(const std::vector<FeedEvent>& schedule, double t) {
    for (const auto& ev : schedule)
        if (t >= ev.start && t < ev.start + ev.duration) return ev.u;
    return 0.0;
}

} // namespace

Trajectory integrate(const ModelDef& m, const Scenario& sc) {
    if (sc.initial.size() != m.states.size())
        throw std::invalid_argument(m.name + ": initial state dimension mismatch");
    for (double v : sc.initial)
        if (!(v > 0))
            throw std::invalid_argument(m.name + ": initial concentrations must be positive");
    for (const auto& ev : sc.schedule)
        if (ev.u < 0) throw std::invalid_argument("feed volume flow must be nonnegative");
    {
        auto sorted = sc.schedule;
        std::sort(sorted.begin(), sorted.end(),
                  [](const FeedEvent& a, const FeedEvent& b) { return a.start < b.start; });
        for (size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i].start < sorted[i - 1].start + sorted[i - 1].duration - 1e-12)
                throw std::invalid_argument("feed events overlap");
    }
    if (sc.horizon < 0) throw std::invalid_argument("horizon must be nonnegative");

    Rhs rhs(m, sc);
    const size_t nx = m.states.size();
    const size_t ny = m.outputs.size();

    // breakpoints: grid times plus exact feed switch times
    std::vector<double> grid;
    size_t nsteps = static_cast<size_t>(std::floor(sc.horizon / sc.grid_dt + 0.5));
    for (size_t j = 0; j <= nsteps; ++j) grid.push_back(static_cast<double>(j) * sc.grid_dt);
    if (grid.back() < sc.horizon - 1e-12) grid.push_back(sc.horizon);

    std::vector<double> switches;
    for (const auto& ev : sc.schedule) {
        switches.push_back(ev.start);
        switches.push_back(ev.start + ev.duration);
    }

    Trajectory tr;
    std::vector<double> z(nx);
    for (size_t i = 0; i < nx; ++i) z[i] = sc.initial[i] / rhs.scale[i];

    std::vector<double> k1(nx), k2(nx), k3(nx), k4(nx), k5(nx), k6(nx), k7(nx), ytmp(nx),
        ynew(nx), yout(ny);

    auto record = [&](double t) {
        tr.time.push_back(t);
        std::vector<double> xs(nx);
        for (size_t i = 0; i < nx; ++i) xs[i] = z[i] * rhs.scale[i];
        for (double v : xs) {
            if (!std::isfinite(v)) {
                tr.flagged = true;
                tr.flag_reason = "non-finite state at t=" + std::to_string(t);
            } else if (v <= 0 && !tr.flagged) {
                tr.flagged = true;
                tr.flag_reason = "non-positive state at t=" + std::to_string(t);
            }
        }
        rhs.measure(z, feed_at(sc.schedule, t), yout);
        tr.states.push_back(std::move(xs));
        tr.outputs.push_back(yout);
    };

    record(0.0);
    double dt = sc.grid_dt; // initial step
    const double min_step = 1e-14;

    size_t gi = 1;
    while (gi < grid.size()) {
        double t = tr.time.back();
        double t_target = grid[gi];
        // stop exactly at feed switches inside (t, t_target)
        for (double s : switches)
            if (s > t + 1e-15 && s < t_target - 1e-15) t_target = std::min(t_target, s);
        double u = feed_at(sc.schedule, t + 0.5 * (t_target - t));

        double tcur = t;
        while (tcur < t_target - 1e-14) {
            double h = std::min(dt, t_target - tcur);
            rhs.deriv(z, u, k1);
            for (size_t i = 0; i < nx; ++i) ytmp[i] = z[i] + h * A21 * k1[i];
            rhs.deriv(ytmp, u, k2);
            for (size_t i = 0; i < nx; ++i) ytmp[i] = z[i] + h * (A31 * k1[i] + A32 * k2[i]);
            rhs.deriv(ytmp, u, k3);
            for (size_t i = 0; i < nx; ++i)
                ytmp[i] = z[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            rhs.deriv(ytmp, u, k4);
            for (size_t i = 0; i < nx; ++i)
                ytmp[i] = z[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            rhs.deriv(ytmp, u, k5);
            for (size_t i = 0; i < nx; ++i)
                ytmp[i] = z[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] +
                                      A65 * k5[i]);
            rhs.deriv(ytmp, u, k6);
            for (size_t i = 0; i < nx; ++i)
                ynew[i] = z[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                                      B6 * k6[i]);
            rhs.deriv(ynew, u, k7);

            double err = 0;
            for (size_t i = 0; i < nx; ++i) {
                double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                                E7 * k7[i]);
                double scale = sc.abs_tol +
                               sc.rel_tol * std::max(std::fabs(z[i]), std::fabs(ynew[i]));
                err += (e / scale) * (e / scale);
            }
            err = std::sqrt(err / static_cast<double>(nx));
            if (!std::isfinite(err)) err = 1e10;

            if (err <= 1.0) {
                tcur += h;
                z = ynew;
                double grow = err == 0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                dt = h * std::clamp(grow, 0.2, 5.0);
            } else {
                dt = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (dt < min_step)
                    throw StiffnessFailure(tcur, m.name + ": step size underflow at t=" +
                                                     std::to_string(tcur));
            }
        }
        if (std::fabs(t_target - grid[gi]) < 1e-15) {
            record(grid[gi]);
            ++gi;
        } else {
            // landed on a feed switch: restart cleanly from the event time
            tr.time.push_back(t_target);
            std::vector<double> xs(nx);
            for (size_t i = 0; i < nx; ++i) xs[i] = z[i] * rhs.scale[i];
            tr.states.push_back(std::move(xs));
            rhs.measure(z, feed_at(sc.schedule, t_target), yout);
            tr.outputs.push_back(yout);
        }
    }

    // offline outputs: sample-and-hold at the lab interval
    tr.held = tr.outputs;
    for (size_t oi = 0; oi < m.outputs.size(); ++oi) {
        if (m.outputs[oi].channel != models::Channel::Offline) continue;
        double next_sample = 0.0;
        double held = tr.outputs[0][oi];
        for (size_t j = 0; j < tr.time.size(); ++j) {
            if (tr.time[j] >= next_sample - 1e-12) {
                held = tr.outputs[j][oi];
                next_sample += sc.offline_interval;
            }
            tr.held[j][oi] = held;
        }
    }
    return tr;
}

size_t finite_difference_margin(int order) { return static_cast<size_t>(2 * order); }

std::vector<double> finite_difference_outputs(const Trajectory& tr, size_t output_index,
                                              int order) {
    if (order < 0 || order > 3)
        throw std::invalid_argument("finite differences support orders 0..3");
    if (tr.time.size() < 2) throw GridTooCoarse("trajectory has fewer than two samples");
    const double h = tr.time[1] - tr.time[0];
    if (h > 1e-3 + 1e-12)
        throw GridTooCoarse("grid spacing " + std::to_string(h) + " d exceeds 1e-3 d");
    for (size_t j = 2; j < tr.time.size(); ++j) {
        double hj = tr.time[j] - tr.time[j - 1];
        if (std::fabs(hj - h) > 1e-9 * std::max(1.0, h))
            throw GridTooCoarse("trajectory grid is not uniform");
    }

    const size_t npts = tr.time.size();
    std::vector<double> y(npts);
    for (size_t j = 0; j < npts; ++j) y[j] = tr.outputs[j][output_index];
    std::vector<double> out(npts, std::numeric_limits<double>::quiet_NaN());
    if (order == 0) return y;

    auto stencil = [&](size_t i, int mult) -> double {
        double step = h * mult;
        auto at = [&](int off) {
            return y[static_cast<size_t>(static_cast<long>(i) + off * mult)];
        };
        switch (order) {
            case 1: return (at(1) - at(-1)) / (2 * step);
            case 2: return (at(1) - 2 * at(0) + at(-1)) / (step * step);
            default:
                return (-at(-2) + 2 * at(-1) - 2 * at(1) + at(2)) / (2 * step * step * step);
        }
    };
    const size_t margin = finite_difference_margin(order);
    for (size_t i = margin; i + margin < npts; ++i) {
        double d1 = stencil(i, 1);
        double d2 = stencil(i, 2);
        out[i] = (4 * d1 - d2) / 3; // Richardson: cancels the step^2 error term
    }
    return out;
}

namespace {

std::string family_of(const ModelDef& m) {
    return m.name.find("R4") != std::string::npos ? "r4" : "r3";
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

std::string default_data_dir(const std::string& given) {
    if (!given.empty()) return given;
#ifdef STRUCTID_SOURCE_DATA_DIR
    return STRUCTID_SOURCE_DATA_DIR;
#else
    return "data";
#endif
}

} // namespace

ValueSet synthetic_values(const ModelDef& m, const std::string& data_dir) {
    nlohmann::json j = load_json(default_data_dir(data_dir) + "/synthetic_values.json");
    const auto& fam = j.at(family_of(m));
    ValueSet vs;
    const auto& values = fam.at("values");
    for (const auto& s : m.parameters) vs.values[s->name] = values.at(s->name).get<double>();
    for (const auto& s : m.constants) vs.values[s->name] = values.at(s->name).get<double>();
    const auto& inlet = fam.at("inlet_by_species");
    for (size_t i = 0; i < m.inlets.size(); ++i)
        vs.values[m.inlets[i]->name] = inlet.at(m.state_labels.at(i)).get<double>();
    const auto& init = fam.at("initial_by_species");
    for (size_t i = 0; i < m.states.size(); ++i)
        vs.initial.push_back(init.at(m.state_labels.at(i)).get<double>());
    return vs;
}

Scenario default_scenario(const ModelDef& m, const std::string& data_dir) {
    ValueSet vs = synthetic_values(m, data_dir);
    Scenario sc;
    sc.initial = vs.initial;
    sc.values = vs.values;
    sc.schedule = {{0.0, 0.5, 8.0}, {1.0, 0.5, 12.0}};
    sc.horizon = 2.0;
    sc.grid_dt = 1e-3;
    return sc;
}

Scenario load_scenario(const std::string& path, const ModelDef& m) {
    nlohmann::json j = load_json(path);
    Scenario sc = default_scenario(m);
    sc.schedule.clear();
    if (j.contains("horizon")) sc.horizon = j["horizon"].get<double>();
    if (j.contains("grid_dt")) sc.grid_dt = j["grid_dt"].get<double>();
    if (j.contains("offline_interval")) sc.offline_interval = j["offline_interval"].get<double>();
    if (j.contains("water_scale")) sc.water_scale = j["water_scale"].get<double>();
    if (j.contains("rel_tol")) sc.rel_tol = j["rel_tol"].get<double>();
    if (j.contains("abs_tol")) sc.abs_tol = j["abs_tol"].get<double>();
    if (j.contains("schedule"))
        for (const auto& ev : j["schedule"])
            sc.schedule.push_back({ev.at("start").get<double>(), ev.at("duration").get<double>(),
                                   ev.at("u").get<double>()});
    if (j.contains("values"))
        for (const auto& [k, v] : j["values"].items()) sc.values[k] = v.get<double>();
    if (j.contains("initial_by_species")) {
        for (size_t i = 0; i < m.states.size(); ++i) {
            const std::string& label = m.state_labels.at(i);
            if (j["initial_by_species"].contains(label))
                sc.initial[i] = j["initial_by_species"][label].get<double>();
        }
    }
    return sc;
}

void write_trajectory_csv(std::ostream& out, const ModelDef& m, const Trajectory& tr) {
    out << "time";
    for (const auto& label : m.state_labels) out << ',' << label;
    for (const auto& o : m.outputs) out << ',' << o.name;
    for (const auto& o : m.outputs)
        if (o.channel == models::Channel::Offline) out << ',' << o.name << "_held";
    out << '\n';
    out.precision(12);
    for (size_t j = 0; j < tr.time.size(); ++j) {
        out << tr.time[j];
        for (double v : tr.states[j]) out << ',' << v;
        for (double v : tr.outputs[j]) out << ',' << v;
        for (size_t oi = 0; oi < m.outputs.size(); ++oi)
            if (m.outputs[oi].channel == models::Channel::Offline) out << ',' << tr.held[j][oi];
        out << '\n';
    }
}

} // namespace structid::sim
