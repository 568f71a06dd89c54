#include "structid/analyze.hpp"
#include "structid/catalog.hpp"
#include "structid/model_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace structid;
using namespace structid::oia;

namespace {

models::ModelDef toy_decay() {
    std::stringstream s;
    s << "name = toy\n[states]\nx\n[parameters]\ntheta\n[dynamics]\nx = -theta*x\n"
      << "[outputs]\ny = x, channel=online\n";
    return models::load_model(s, "toy");
}

models::ModelDef toy_disconnected() {
    std::stringstream s;
    s << "name = toy2\n[states]\nx1\nx2\n[dynamics]\nx1 = 0\nx2 = -x2\n"
      << "[outputs]\ny = x2, channel=online\n";
    return models::load_model(s, "toy2");
}

/// A copy of a catalog model with one output removed.
models::ModelDef without_output(models::Variant v, const std::string& name) {
    auto m = models::build_model(v);
    std::stringstream buf;
    models::save_model(*m, buf);
    models::ModelDef copy = models::load_model(buf, m->name + " minus " + name);
    std::erase_if(copy.outputs, [&](const models::Output& o) { return o.name == name; });
    return copy;
}

} // namespace

TEST_CASE("toy model: promoted parameter gives full rank 2 at order 1") {
    models::ModelDef m = toy_decay();
    AnalysisReport r = fispo_analyze(m, m.parameters);
    CHECK(r.verdict == ModelVerdict::FullRank);
    CHECK(r.rank == 2);
    CHECK(r.orders_used == 1);
    CHECK(r.verdicts.at("x") == "locally_observable");
    CHECK(r.verdicts.at("theta") == "locally_identifiable");
}

TEST_CASE("disconnected constant state is flagged") {
    models::ModelDef m = toy_disconnected();
    AnalysisReport r = fispo_analyze(m, {});
    CHECK(r.verdict == ModelVerdict::RankDeficient);
    CHECK(r.rank == 1);
    CHECK(r.verdicts.at("x1") == "not_locally_observable_probabilistic");
    CHECK(r.verdicts.at("x2") == "locally_observable");
    REQUIRE(r.deficient.size() == 1);
    CHECK(r.deficient[0] == "x1");
}

TEST_CASE("ADM1-R4: full rank 15 with the four rate constants promoted") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    AnalysisReport r = fispo_analyze(*m, m->parameters);
    CHECK(r.verdict == ModelVerdict::FullRank);
    CHECK(r.rank == 15);
    CHECK(r.target == 15);
    CHECK(r.orders_used == 3);
    std::vector<int> expect = {5, 9, 12, 15};
    CHECK(r.rank_by_order == expect);
}

TEST_CASE("ADM1-R4 without the nitrogen output: x3 unobservable") {
    models::ModelDef m = without_output(models::Variant::ADM1_R4, "IN");
    AnalysisReport r = fispo_analyze(m, {});
    CHECK(r.verdict == ModelVerdict::RankDeficient);
    CHECK(r.rank == 10);
    bool x3_flagged = false;
    for (const auto& d : r.deficient) x3_flagged |= d == "x3";
    CHECK(x3_flagged);
}

TEST_CASE("ADM1-R4 without the volatile-solids output: ash unobservable") {
    models::ModelDef m = without_output(models::Variant::ADM1_R4, "VS");
    AnalysisReport r = fispo_analyze(m, {});
    CHECK(r.verdict == ModelVerdict::RankDeficient);
    CHECK(r.rank == 10);
    bool flagged = false;
    for (const auto& d : r.deficient) flagged |= d == "x9";
    CHECK(flagged);
}

TEST_CASE("classify_variables mirrors the deficiency evidence") {
    RankResult rr;
    rr.verdict = RankVerdict::RankDeficient;
    rr.deficient_columns = {"x2"};
    auto v = classify_variables(rr, {{"x1", false}, {"x2", false}, {"theta", true}});
    CHECK(v.at("x1") == "locally_observable");
    CHECK(v.at("x2") == "not_locally_observable_probabilistic");
    CHECK(v.at("theta") == "locally_identifiable");

    RankResult full;
    full.verdict = RankVerdict::FullRank;
    auto w = classify_variables(full, {{"x1", false}, {"theta", true}});
    CHECK(w.at("x1") == "locally_observable");
    CHECK(w.at("theta") == "locally_identifiable");
}

TEST_CASE("ORC-DF agrees with FISPO on ADM1-R4") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    AnalysisReport f = fispo_analyze(*m, m->parameters);
    AnalysisReport o = orcdf_analyze(*m, m->parameters);
    CHECK(o.verdict == ModelVerdict::FullRank);
    CHECK(o.rank == 15);
    CHECK(f.verdicts == o.verdicts);
}

TEST_CASE("ORC-DF rejects non-affine inputs") {
    std::stringstream s;
    s << "name = toyq\n[states]\nx\n[inputs]\nu\n[dynamics]\nx = x*u^2\n"
      << "[outputs]\ny = x, channel=online\n";
    models::ModelDef m = models::load_model(s, "toyq");
    CHECK_THROWS_AS(orcdf_analyze(m, {}), lie::NotInputAffine);
}

TEST_CASE("rank monotone in order; determinism across repeated runs") {
    auto m = models::build_model(models::Variant::BMR4);
    AnalyzeOptions opt;
    opt.seed = 17;
    AnalysisReport a = fispo_analyze(*m, m->parameters, opt);
    for (size_t i = 1; i < a.rank_by_order.size(); ++i)
        CHECK(a.rank_by_order[i] >= a.rank_by_order[i - 1]);
    AnalysisReport b = fispo_analyze(*m, m->parameters, opt);
    CHECK(report_to_json(a, false) == report_to_json(b, false));
}

TEST_CASE("budget overruns surface as inconclusive, not as crashes") {
    auto m = models::build_model(models::Variant::ADM1_R3);
    AnalyzeOptions opt;
    opt.node_budget = 200; // far below any useful stack
    AnalysisReport r = fispo_analyze(*m, m->parameters, opt);
    CHECK(r.verdict == ModelVerdict::Inconclusive);
    CHECK(r.verdicts.at("x1") == "inconclusive_budget");
    CHECK_FALSE(r.note.empty());
}

TEST_CASE("identifiability of a parameter subset only") {
    auto m = models::build_model(models::Variant::ADM1_R3);
    // the acetoclastic kinetics subset: growth rate, half-saturation,
    // ammonia inhibition constant
    std::vector<sym::SymbolPtr> subset = {m->parameters[4], m->parameters[5],
                                          m->parameters[6]};
    AnalysisReport r = fispo_analyze(*m, subset);
    CHECK(r.target == 20);
    CHECK(r.verdict == ModelVerdict::FullRank);
}
