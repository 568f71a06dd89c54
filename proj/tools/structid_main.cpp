#include "structid/algsys.hpp"
#include "structid/analyze.hpp"
#include "structid/catalog.hpp"
#include "structid/model_io.hpp"
#include "structid/sim.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace structid;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitNegative = 4;

models::ModelPtr resolve_model(const std::string& name) {
    if (auto v = models::parse_variant(name)) return models::build_model(*v);
    return nullptr;
}

std::vector<sym::SymbolPtr> select_params(const models::ModelDef& m,
                                          const std::vector<std::string>& names) {
    std::vector<sym::SymbolPtr> out;
    if (names.empty()) {
        out = m.parameters;
        return out;
    }
    for (const auto& n : names) {
        bool found = false;
        for (const auto& p : m.parameters)
            if (p->name == n) {
                out.push_back(p);
                found = true;
            }
        if (!found) throw CLI::ValidationError("--params", "unknown parameter '" + n + "'");
    }
    return out;
}

/// Measurement set of the algebraic analyses: the online gas-composition and
/// pH signals plus the offline solids/nitrogen ones. The total gas flow is
/// redundant given the partial pressures, and the acetic-acid signal is an
/// opt-in lab measurement.
std::vector<std::string> algebraic_outputs(const models::ModelDef& m, bool with_ac) {
    std::vector<std::string> out;
    for (const auto& o : m.outputs) {
        if (o.name == "Vg") continue;
        if (o.name == "Ac" && !with_ac) continue;
        out.push_back(o.name);
    }
    return out;
}

int run_check() {
    int failures = 0;
    for (models::Variant v : models::all_variants()) {
        auto m = models::build_model(v);
        try {
            m->validate(true);
            auto sums = models::validate_mass_balance(*m);
            for (const auto& [label, sum] : sums) {
                if (abs(sum) > Rational(2, 10000)) {
                    std::cerr << "mass balance violated: " << label << " sums to "
                              << rational_to_string(sum) << "\n";
                    ++failures;
                }
            }
            lie::decompose_input_affine(*m);
            std::cout << "ok: " << m->name << " (" << m->states.size() << " states, "
                      << m->parameters.size() << " parameters, " << sums.size()
                      << " balanced process rows)\n";
        } catch (const std::exception& e) {
            std::cerr << "check failed for " << m->name << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? kExitOk : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural observability and identifiability analysis of anaerobic "
                 "digestion process models"};
    app.require_subcommand(1);

    // list
    auto* cmd_list = app.add_subcommand("list", "List the built-in model catalog");

    // analyze
    std::string an_model, an_json;
    std::string an_algo = "fispo";
    std::vector<std::string> an_params;
    bool an_no_params = false, an_no_timestamp = false;
    int an_trials = 3, an_max_order = -1;
    uint64_t an_seed = 1;
    size_t an_budget = lie::kDefaultNodeBudget;
    auto* cmd_an = app.add_subcommand("analyze", "Observability/identifiability analysis");
    cmd_an->add_option("model", an_model, "catalog model name")->required();
    cmd_an->add_option("--algo", an_algo, "fispo or orcdf")
        ->check(CLI::IsMember({"fispo", "orcdf"}));
    cmd_an->add_option("--params", an_params, "parameter subset (default: all declared)");
    cmd_an->add_flag("--no-params", an_no_params, "observability only (empty parameter set)");
    cmd_an->add_option("--trials", an_trials, "rank trials per order");
    cmd_an->add_option("--seed", an_seed, "sampling seed");
    cmd_an->add_option("--max-order", an_max_order, "Lie order / round cap");
    cmd_an->add_option("--node-budget", an_budget, "per-expression node budget");
    cmd_an->add_option("--json", an_json, "write the JSON report to this path");
    cmd_an->add_flag("--no-timestamp", an_no_timestamp,
                     "omit timing fields for byte-reproducible output");

    // algsearch
    std::string as_model, as_csv;
    bool as_with_ac = false;
    int as_cap = 3;
    uint64_t as_seed = 1;
    auto* cmd_as = app.add_subcommand(
        "algsearch", "Search a solvable output-derivative equation stack");
    cmd_as->add_option("model", as_model, "catalog model name")->required();
    cmd_as->add_flag("--with-ac", as_with_ac, "include the acetic-acid online measurement");
    cmd_as->add_option("--order-cap", as_cap, "highest derivative order to consider");
    cmd_as->add_option("--seed", as_seed, "sampling seed");
    cmd_as->add_option("--csv", as_csv, "append a table-style CSV row to this path");

    // simulate
    std::string si_model, si_scenario, si_csv;
    auto* cmd_si = app.add_subcommand("simulate", "Integrate a model forward in time");
    cmd_si->add_option("model", si_model, "catalog model name")->required();
    cmd_si->add_option("--scenario", si_scenario, "scenario JSON (default: built-in step feed)");
    cmd_si->add_option("--csv", si_csv, "write the trajectory CSV to this path");

    // export-model
    std::string ex_model, ex_out;
    auto* cmd_ex = app.add_subcommand("export-model", "Write a catalog model definition file");
    cmd_ex->add_option("model", ex_model, "catalog model name")->required();
    cmd_ex->add_option("--out", ex_out, "output path")->required();

    // check
    auto* cmd_ck = app.add_subcommand("check", "Run the catalog invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (cmd_list->parsed()) {
            std::cout << "model      states params outputs\n";
            for (models::Variant v : models::all_variants()) {
                auto m = models::build_model(v);
                std::cout << m->name;
                for (size_t i = m->name.size(); i < 11; ++i) std::cout << ' ';
                std::cout << m->states.size() << "     " << m->parameters.size() << "      "
                          << m->outputs.size() << "\n";
            }
            return kExitOk;
        }

        if (cmd_an->parsed()) {
            auto m = resolve_model(an_model);
            if (!m) {
                std::cerr << "unknown model: " << an_model << "\n";
                return kExitUsage;
            }
            oia::AnalyzeOptions opt;
            opt.trials = an_trials;
            opt.seed = an_seed;
            opt.max_order = an_max_order;
            opt.node_budget = an_budget;
            std::vector<sym::SymbolPtr> params =
                an_no_params ? std::vector<sym::SymbolPtr>{} : select_params(*m, an_params);
            oia::AnalysisReport rep = an_algo == "fispo" ? oia::fispo_analyze(*m, params, opt)
                                                         : oia::orcdf_analyze(*m, params, opt);
            std::string json = oia::report_to_json(rep, !an_no_timestamp);
            if (!an_json.empty()) {
                std::ofstream out(an_json, std::ios::binary);
                out << json;
            } else {
                std::cout << json;
            }
            switch (rep.verdict) {
                case oia::ModelVerdict::FullRank: return kExitOk;
                case oia::ModelVerdict::Inconclusive: return kExitInconclusive;
                case oia::ModelVerdict::RankDeficient: return kExitNegative;
            }
        }

        if (cmd_as->parsed()) {
            auto m = resolve_model(as_model);
            if (!m) {
                std::cerr << "unknown model: " << as_model << "\n";
                return kExitUsage;
            }
            algsys::TestOptions opt;
            opt.seed = as_seed;
            algsys::SearchResult res =
                algsys::search_minimal_selection(*m, algebraic_outputs(*m, as_with_ac), as_cap, opt);
            if (!as_csv.empty()) {
                bool fresh = !std::ifstream(as_csv).good();
                std::ofstream out(as_csv, std::ios::app);
                if (fresh) algsys::write_search_csv_header(out);
                algsys::write_search_csv_row(out, *m, res);
            }
            if (res.found) {
                std::cout << m->name << ": locally solvable selection found\n";
                for (const auto& e : res.selection.entries)
                    std::cout << "  " << m->outputs[static_cast<size_t>(e.output_index)].name
                              << " order " << e.order << "\n";
                return kExitOk;
            }
            std::cout << m->name << ": no solvable selection within order cap " << as_cap
                      << " (rank " << res.rank_reached << " of " << m->states.size() << ")\n";
            return kExitNegative;
        }

        if (cmd_si->parsed()) {
            auto m = resolve_model(si_model);
            if (!m) {
                std::cerr << "unknown model: " << si_model << "\n";
                return kExitUsage;
            }
            sim::Scenario sc = si_scenario.empty() ? sim::default_scenario(*m)
                                                   : sim::load_scenario(si_scenario, *m);
            sim::Trajectory tr = sim::integrate(*m, sc);
            if (tr.flagged) std::cerr << "warning: " << tr.flag_reason << "\n";
            if (!si_csv.empty()) {
                std::ofstream out(si_csv);
                sim::write_trajectory_csv(out, *m, tr);
            } else {
                sim::write_trajectory_csv(std::cout, *m, tr);
            }
            return kExitOk;
        }

        if (cmd_ex->parsed()) {
            auto m = resolve_model(ex_model);
            if (!m) {
                std::cerr << "unknown model: " << ex_model << "\n";
                return kExitUsage;
            }
            models::save_model(*m, ex_out);
            std::cout << "wrote " << ex_out << "\n";
            return kExitOk;
        }

        if (cmd_ck->parsed()) return run_check();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
