#include "structid/catalog.hpp"
#include "structid/lie.hpp"
#include "structid/model_io.hpp"
#include "structid/rank.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace structid;
using namespace structid::lie;

namespace {

models::ModelDef toy_decay() {
    std::stringstream s;
    s << "name = toy\n[states]\nx\n[parameters]\ntheta\n[dynamics]\nx = -theta*x\n"
      << "[outputs]\ny = x, channel=online\n";
    return models::load_model(s, "toy");
}

models::ModelDef toy_quadratic_input() {
    std::stringstream s;
    s << "name = toyq\n[states]\nx\n[inputs]\nu\n[dynamics]\nx = x*u^2\n"
      << "[outputs]\ny = x, channel=online\n";
    return models::load_model(s, "toyq");
}

models::ModelDef toy_autonomous() {
    std::stringstream s;
    s << "name = toya\n[states]\nx\n[dynamics]\nx = -x\n[outputs]\ny = x, channel=online\n";
    return models::load_model(s, "toya");
}

} // namespace

TEST_CASE("lie derivative of a bare state output is its own equation") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    // y4 = IN = x3
    sym::ExprPtr l = lie_derivative(m->output("IN").expr, *m);
    CHECK(l.get() == m->dynamics[2].get());
}

TEST_CASE("lie derivative of a constant is zero") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    CHECK(lie_derivative(sym::constant(7), *m)->is_constant(0));
}

TEST_CASE("lie derivative of TS is the scaled water equation") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    sym::ExprPtr l = lie_derivative(m->output("TS").expr, *m);
    sym::ExprPtr expect =
        sym::neg(sym::div(m->dynamics[3], sym::symref(m->symbols.find_ptr("c14"))));
    CHECK(l.get() == expect.get());
}

TEST_CASE("toy stack x, -theta*x, theta^2*x") {
    models::ModelDef m = toy_decay();
    const LieStack& st = build_lie_stack(m, 2);
    sym::ExprPtr x = sym::symref(m.states[0]);
    sym::ExprPtr th = sym::symref(m.parameters[0]);
    CHECK(st.at(0, 0).expr.get() == x.get());
    CHECK(st.at(0, 1).expr.get() == sym::neg(sym::mul({th, x})).get());
    CHECK(st.at(0, 2).expr.get() == sym::mul({sym::pow(th, 2), x}).get());
}

TEST_CASE("stack order 0 equals the output list; prefix property") {
    auto m = models::build_model(models::Variant::BMR3_ABC);
    const LieStack& st2 = build_lie_stack(*m, 2);
    for (size_t i = 0; i < m->outputs.size(); ++i)
        CHECK(st2.at(static_cast<int>(i), 0).expr.get() == m->outputs[i].expr.get());
    std::vector<const sym::Expr*> prefix;
    for (int k = 0; k <= 2; ++k)
        for (size_t i = 0; i < m->outputs.size(); ++i)
            prefix.push_back(st2.at(static_cast<int>(i), k).expr.get());
    const LieStack& st3 = build_lie_stack(*m, 3);
    size_t idx = 0;
    for (int k = 0; k <= 2; ++k)
        for (size_t i = 0; i < m->outputs.size(); ++i)
            CHECK(st3.at(static_cast<int>(i), k).expr.get() == prefix[idx++]);
}

TEST_CASE("ADM1-R4 first derivative of the methane pressure") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    const LieStack& st = build_lie_stack(*m, 1);
    // y2 = c12*x10, so y2' = c12 * (x10 equation)
    sym::ExprPtr expect =
        sym::mul({sym::symref(m->symbols.find_ptr("c12")), m->dynamics[9]});
    CHECK(st.at(1, 1).expr.get() == expect.get());
}

TEST_CASE("node budget overrun raises ExpressionBlowup") {
    std::stringstream s;
    // iterated squaring: y^(k) grows quickly
    s << "name = blow\n[states]\nx\n[dynamics]\nx = x^2 + x + 1\n"
      << "[outputs]\ny = x^3 + x, channel=online\n";
    models::ModelDef m = models::load_model(s, "blow");
    CHECK_THROWS_AS(build_lie_stack(m, 12, /*node_budget=*/10), ExpressionBlowup);
}

TEST_CASE("input-affine decomposition of ADM1-R4") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    AffineDecomposition d = decompose_input_affine(*m);
    REQUIRE(d.g.size() == 1);
    // g column of state 1 is c1*(xi1 - x1)
    sym::ExprPtr expect = sym::mul({sym::symref(m->symbols.find_ptr("c1")),
                                    sym::sub(sym::symref(m->inlets[0]),
                                             sym::symref(m->states[0]))});
    CHECK(d.g[0][0].get() == expect.get());
    // gas states carry no feed term
    CHECK(d.g[0][9]->is_constant(0));
    CHECK(d.g[0][10]->is_constant(0));
    // outputs have no direct feedthrough
    for (const auto& h : d.h[0]) CHECK(h->is_constant(0));
}

TEST_CASE("decomposition rejects non-affine inputs") {
    models::ModelDef m = toy_quadratic_input();
    CHECK_THROWS_AS(decompose_input_affine(m), NotInputAffine);
}

TEST_CASE("autonomous models have empty input columns") {
    models::ModelDef m = toy_autonomous();
    AffineDecomposition d = decompose_input_affine(m);
    CHECK(d.g.empty());
    CHECK(d.f0[0].get() == m.dynamics[0].get());
}

TEST_CASE("affine reconstruction matches exactly at random rational points") {
    std::mt19937_64 rng(99);
    for (models::Variant v : {models::Variant::ADM1_R4, models::Variant::BMR3_ABC}) {
        auto m = models::build_model(v);
        AffineDecomposition d = decompose_input_affine(*m);
        oia::ExprMatrix src(1);
        for (const auto& e : m->dynamics) src[0].push_back(e);
        for (const auto& s : m->inputs) src[0].push_back(sym::symref(s));
        oia::PointSampler sampler(src, {});
        for (int rep = 0; rep < 100; ++rep) {
            sym::RationalBindings point = sampler.sample(rng);
            sym::RationalEvaluator ev(point);
            for (size_t i = 0; i < m->dynamics.size(); ++i) {
                Rational lhs = ev.eval(m->dynamics[i]);
                Rational rhs = ev.eval(d.f0[i]);
                for (size_t j = 0; j < m->inputs.size(); ++j)
                    rhs += ev.eval(d.g[j][i]) * point.at(m->inputs[j].get());
                CHECK(lhs == rhs);
            }
        }
    }
}
