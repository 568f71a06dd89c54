#include "structid/algsys.hpp"
#include "structid/analyze.hpp"
#include "structid/catalog.hpp"
#include "structid/model_io.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace structid;
using namespace structid::algsys;

namespace {

const std::vector<std::string> kTab2Outputs = {"CH4", "CO2", "IN", "TS", "VS"};
const std::vector<std::string> kTab2OutputsAc = {"CH4", "CO2", "IN", "TS", "VS", "Ac"};

std::vector<std::pair<std::string, int>> nominal(const std::vector<std::string>& outs) {
    std::vector<std::pair<std::string, int>> picks;
    for (const auto& o : outs) picks.emplace_back(o, 0);
    return picks;
}

} // namespace

TEST_CASE("pruning resolves the directly measured states of ADM1-R4") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    PruneResult p = prune_directly_solved(*m);
    // CH4 -> x10, CO2 -> x11, IN -> x3, TS -> x4, then VS -> x9 once the
    // water state is known
    CHECK(p.solved.size() == 5);
    CHECK(p.remaining_unknowns.size() == 6);
    std::set<std::string> solved;
    for (const auto& [state, via] : p.solved) solved.insert(state + "<-" + via);
    CHECK(solved.count("x10<-CH4"));
    CHECK(solved.count("x11<-CO2"));
    CHECK(solved.count("x3<-IN"));
    CHECK(solved.count("x4<-TS"));
    CHECK(solved.count("x9<-VS"));
}

TEST_CASE("pruning is the identity on a model without invertible outputs") {
    std::stringstream s;
    s << "name = opaque\n[states]\nx1\nx2\n[dynamics]\nx1 = -x1\nx2 = -x2\n"
      << "[outputs]\ny = x1*x2, channel=online\n";
    models::ModelDef m = models::load_model(s, "opaque");
    PruneResult p = prune_directly_solved(m);
    CHECK(p.solved.empty());
    CHECK(p.remaining_unknowns.size() == 2);
}

TEST_CASE("published measurement pattern of the full ADM1-R4 is locally solvable") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    auto picks = nominal(kTab2Outputs);
    for (int k : {1, 2, 3}) {
        picks.emplace_back("CH4", k);
        picks.emplace_back("CO2", k);
    }
    EquationSelection sel = selection_from_names(*m, picks);
    CHECK(sel.entries.size() == 11);
    CHECK(test_selection(*m, sel) == SelectionVerdict::LocallySolvable);
}

TEST_CASE("published measurement pattern of BMR4 solves at order 2") {
    auto m = models::build_model(models::Variant::BMR4);
    auto picks = nominal(kTab2Outputs);
    for (int k : {1, 2}) {
        picks.emplace_back("CH4", k);
        picks.emplace_back("CO2", k);
    }
    EquationSelection sel = selection_from_names(*m, picks);
    CHECK(sel.entries.size() == 9);
    CHECK(test_selection(*m, sel) == SelectionVerdict::LocallySolvable);
}

TEST_CASE("dropping the nitrogen measurement leaves every square stack singular") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    // x3 never enters any other output at any order, so any 11-equation stack
    // without IN stays singular
    std::vector<std::pair<std::string, int>> picks = {
        {"CH4", 0}, {"CO2", 0}, {"TS", 0}, {"VS", 0}, {"Vg", 0}};
    for (int k : {1, 2, 3}) {
        picks.emplace_back("CH4", k);
        picks.emplace_back("CO2", k);
    }
    EquationSelection sel = selection_from_names(*m, picks);
    CHECK(sel.entries.size() == 11);
    CHECK(test_selection(*m, sel) == SelectionVerdict::Singular);
}

TEST_CASE("selections must be square") {
    auto m = models::build_model(models::Variant::BMR4);
    EquationSelection sel = selection_from_names(*m, nominal(kTab2Outputs));
    CHECK_THROWS_AS(test_selection(*m, sel), std::invalid_argument);
}

TEST_CASE("search on BMR4 finds a selection within order 2") {
    auto m = models::build_model(models::Variant::BMR4);
    SearchResult r = search_minimal_selection(*m, kTab2Outputs, 3);
    REQUIRE(r.found);
    int maxk = 0;
    for (const auto& e : r.selection.entries) maxk = std::max(maxk, e.order);
    CHECK(maxk <= 2);
    CHECK(r.selection.entries.size() == 9);
    CHECK(r.log.size() >= r.selection.entries.size());
}

TEST_CASE("rejected candidates are recorded in the search log") {
    auto m = models::build_model(models::Variant::BMR4);
    // the total gas flow is redundant given both partial pressures, so its
    // nominal entry must appear in the log as rejected
    std::vector<std::string> avail = {"Vg", "CH4", "CO2", "IN", "TS", "VS"};
    SearchResult r = search_minimal_selection(*m, avail, 3);
    REQUIRE(r.found);
    bool vg_rejected = false;
    for (const auto& l : r.log)
        if (l.output == "Vg" && l.order == 0 && !l.accepted) vg_rejected = true;
    CHECK(vg_rejected);
    CHECK(r.max_order_per_output.count("Vg") == 0);
}

TEST_CASE("search without the required measurement reports no selection") {
    auto m = models::build_model(models::Variant::ADM1_R4);
    SearchResult r = search_minimal_selection(*m, {"CH4", "CO2", "TS", "VS"}, 3);
    CHECK_FALSE(r.found);
    CHECK(r.rank_reached < static_cast<int>(m->states.size()));
}

TEST_CASE("one-state toy searches to the trivial selection") {
    std::stringstream s;
    s << "name = toy\n[states]\nx\n[parameters]\ntheta\n[dynamics]\nx = -theta*x\n"
      << "[outputs]\ny = x, channel=online\n";
    models::ModelDef m = models::load_model(s, "toy");
    SearchResult r = search_minimal_selection(m, {"y"}, 3);
    REQUIRE(r.found);
    REQUIRE(r.selection.entries.size() == 1);
    CHECK(r.selection.entries[0].order == 0);
}

TEST_CASE("TS derivatives are preferred over VS") {
    auto m = models::build_model(models::Variant::BMR3_A);
    SearchResult r = search_minimal_selection(*m, kTab2OutputsAc, 3);
    REQUIRE(r.found);
    for (const auto& e : r.selection.entries) {
        const std::string& name = m->outputs[static_cast<size_t>(e.output_index)].name;
        if (name == "VS") CHECK(e.order == 0);
    }
}

TEST_CASE("pruning soundness: verdicts unchanged by the pruned route on BMR4") {
    auto m = models::build_model(models::Variant::BMR4);
    // full-route verdict
    auto picks = nominal(kTab2Outputs);
    for (int k : {1, 2}) {
        picks.emplace_back("CH4", k);
        picks.emplace_back("CO2", k);
    }
    EquationSelection full = selection_from_names(*m, picks);
    REQUIRE(test_selection(*m, full) == SelectionVerdict::LocallySolvable);

    // pruned route: remove the directly solved states and their order-0
    // equations, keep the rest of the pattern
    PruneResult p = prune_directly_solved(*m);
    std::set<std::string> solved_via;
    for (const auto& [state, via] : p.solved) solved_via.insert(via);
    EquationSelection reduced;
    reduced.unknowns = p.remaining_unknowns;
    for (const auto& e : full.entries) {
        const std::string& name = m->outputs[static_cast<size_t>(e.output_index)].name;
        if (e.order == 0 && solved_via.count(name)) continue;
        reduced.entries.push_back(e);
    }
    REQUIRE(reduced.entries.size() == reduced.unknowns.size());
    CHECK(test_selection(*m, reduced) == SelectionVerdict::LocallySolvable);
}

TEST_CASE("equivalence: a found selection implies the observability rank condition") {
    for (models::Variant v : models::all_variants()) {
        auto m = models::build_model(v);
        std::vector<std::string> avail = kTab2OutputsAc;
        if (m->output_index("Ac") < 0) avail = kTab2Outputs;
        SearchResult r = search_minimal_selection(*m, avail, 3);
        if (!r.found) continue;
        oia::AnalysisReport rep = oia::fispo_analyze(*m, {});
        CHECK_MESSAGE(rep.verdict == oia::ModelVerdict::FullRank, m->name);
    }
}

TEST_CASE("csv row shape") {
    auto m = models::build_model(models::Variant::BMR4);
    SearchResult r = search_minimal_selection(*m, kTab2Outputs, 3);
    std::ostringstream out;
    write_search_csv_header(out);
    write_search_csv_row(out, *m, r);
    std::string text = out.str();
    CHECK(text.find("model,n,Vg,CH4,CO2,pH,IN,TS,VS,Ac,verdict") == 0);
    CHECK(text.find("BMR4,9") != std::string::npos);
    CHECK(text.find("locally_solvable") != std::string::npos);
}
