#include "structid/model_io.hpp"
#include "structid/sim.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace structid;
using namespace structid::sim;

TEST_CASE("ash stays exactly constant without feeding") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    sc.schedule.clear(); // u = 0 throughout
    sc.horizon = 0.05;
    Trajectory tr = integrate(*m, sc);
    double x9_0 = tr.states.front()[8];
    for (const auto& row : tr.states) CHECK(row[8] == x9_0);
}

TEST_CASE("zero horizon returns the initial point") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    sc.horizon = 0.0;
    Trajectory tr = integrate(*m, sc);
    REQUIRE(tr.time.size() == 1);
    for (size_t i = 0; i < m->states.size(); ++i)
        CHECK(tr.states[0][i] == doctest::Approx(sc.initial[i]));
}

TEST_CASE("step-feed run keeps gas pressures positive and solids in range") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    Trajectory tr = integrate(*m, sc);
    CHECK_FALSE(tr.flagged);
    int i_ch4 = m->output_index("CH4");
    int i_co2 = m->output_index("CO2");
    int i_ts = m->output_index("TS");
    int i_vg = m->output_index("Vg");
    for (size_t j = 0; j < tr.time.size(); ++j) {
        CHECK(tr.outputs[j][static_cast<size_t>(i_ch4)] > 0);
        CHECK(tr.outputs[j][static_cast<size_t>(i_co2)] > 0);
        CHECK(tr.outputs[j][static_cast<size_t>(i_vg)] >= 0);
        CHECK(tr.outputs[j][static_cast<size_t>(i_ts)] > 0);
        CHECK(tr.outputs[j][static_cast<size_t>(i_ts)] < 1);
    }
}

TEST_CASE("offline outputs are rendered as staircases") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    sc.horizon = 0.3;
    sc.offline_interval = 0.1;
    Trajectory tr = integrate(*m, sc);
    size_t i_in = static_cast<size_t>(m->output_index("IN"));
    // held value only changes at sampling instants
    int changes = 0;
    for (size_t j = 1; j < tr.time.size(); ++j)
        if (tr.held[j][i_in] != tr.held[j - 1][i_in]) ++changes;
    CHECK(changes <= 3);
    size_t i_ch4 = static_cast<size_t>(m->output_index("CH4"));
    for (size_t j = 0; j < tr.time.size(); ++j)
        CHECK(tr.held[j][i_ch4] == tr.outputs[j][i_ch4]); // online channels pass through
}

TEST_CASE("invalid scenarios are rejected") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    sc.initial[0] = -1;
    CHECK_THROWS_AS(integrate(*m, sc), std::invalid_argument);
    sc = default_scenario(*m);
    sc.schedule = {{0.0, 1.0, 5.0}, {0.5, 1.0, 7.0}};
    CHECK_THROWS_AS(integrate(*m, sc), std::invalid_argument);
    sc = default_scenario(*m);
    sc.schedule = {{0.0, 1.0, -5.0}};
    CHECK_THROWS_AS(integrate(*m, sc), std::invalid_argument);
}

TEST_CASE("finite differences: constant output and linear ramp") {
    std::stringstream s;
    s << "name = ramp\n[states]\nx\n[constants]\nc\n[dynamics]\nx = 1\n"
      << "[outputs]\nyc = c, channel=online\nyr = x - 1, channel=online\n";
    models::ModelDef m = models::load_model(s, "ramp");
    Scenario sc;
    sc.initial = {1.0};
    sc.values = {{"c", 5.0}};
    sc.horizon = 0.05;
    sc.grid_dt = 1e-3;
    Trajectory tr = integrate(m, sc);
    for (int k = 1; k <= 3; ++k) {
        auto fd = finite_difference_outputs(tr, 0, k);
        size_t margin = finite_difference_margin(k);
        for (size_t i = margin; i + margin < fd.size(); ++i)
            CHECK(std::fabs(fd[i]) < 1e-9);
    }
    auto d1 = finite_difference_outputs(tr, 1, 1); // y = t
    for (size_t i = 2; i + 2 < d1.size(); ++i) CHECK(d1[i] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coarse grids are rejected") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    sc.horizon = 0.5;
    sc.grid_dt = 0.01;
    Trajectory tr = integrate(*m, sc);
    CHECK_THROWS_AS(finite_difference_outputs(tr, 0, 1), GridTooCoarse);
}

TEST_CASE("first derivative of the methane pressure matches the lie derivative") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    std::mt19937_64 rng(404);
    sim::Scenario sc = testsupport::random_scenario(*m, rng);
    Trajectory tr = integrate(*m, sc);
    REQUIRE_FALSE(tr.flagged);
    auto st = testsupport::compare_symbolic_vs_fd(*m, sc, tr, 2, 1e-4, 1e-3);
    CHECK(st.compared > 0);
    CHECK_MESSAGE(st.worst_rel <= 1e-4, st.worst_where);
}

TEST_CASE("halving the tolerances barely moves the terminal state") {
    auto m = models::build_model(models::Variant::BMR3_ABC);
    Scenario sc = default_scenario(*m);
    sc.horizon = 0.5;
    Trajectory a = integrate(*m, sc);
    sc.rel_tol /= 2;
    sc.abs_tol /= 2;
    Trajectory b = integrate(*m, sc);
    for (size_t i = 0; i < m->states.size(); ++i) {
        double ref = std::max(std::fabs(a.states.back()[i]), 1e-12);
        CHECK(std::fabs(a.states.back()[i] - b.states.back()[i]) / ref < 1e-6);
    }
}

TEST_CASE("water scaling changes the numerics, not the trajectory") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    sc.horizon = 0.2;
    Trajectory a = integrate(*m, sc);
    sc.water_scale = 1000.0; // solve for the water state in kg/L
    Trajectory b = integrate(*m, sc);
    for (size_t j = 0; j < a.time.size(); j += 37)
        for (size_t i = 0; i < m->states.size(); ++i)
            CHECK(a.states[j][i] == doctest::Approx(b.states[j][i]).epsilon(1e-6));
}

TEST_CASE("trajectory csv has the state-order header") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = default_scenario(*m);
    sc.horizon = 0.002;
    Trajectory tr = integrate(*m, sc);
    std::ostringstream out;
    write_trajectory_csv(out, *m, tr);
    std::string head = out.str().substr(0, out.str().find('\n'));
    CHECK(head ==
          "time,S_ch4,S_IC,S_IN,S_h2o,X_ch,X_pr,X_li,X_bac,X_ash,S_ch4_gas,S_co2_gas,"
          "Vg,CH4,CO2,IN,TS,VS,IN_held,TS_held,VS_held");
}

TEST_CASE("scenario files load with overrides") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    Scenario sc = load_scenario(std::string(STRUCTID_SOURCE_DATA_DIR) +
                                    "/scenarios/adm1_r4_step.json",
                                *m);
    CHECK(sc.horizon == 2.0);
    REQUIRE(sc.schedule.size() == 2);
    CHECK(sc.schedule[1].u == 12.0);
}
