#pragma once

#include "structid/analyze.hpp"
#include "structid/model.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace structid::algsys {

using models::ModelDef;
using oia::SamplerConfig;

struct SelectionEntry {
    int output_index;
    int order;
};

/// A square stack of output-derivative equations in the unknown states.
struct EquationSelection {
    std::vector<SelectionEntry> entries;
    std::vector<const sym::Symbol*> unknowns;
};

EquationSelection selection_from_names(const ModelDef& m,
                                       const std::vector<std::pair<std::string, int>>& picks);

enum class SelectionVerdict { LocallySolvable, Singular, Inconclusive };
const char* selection_verdict_name(SelectionVerdict v);

struct TestOptions {
    int trials = 3;
    uint64_t seed = 1;
    size_t node_budget = lie::kDefaultNodeBudget;
    SamplerConfig sampler;
};

/// Local solvability of the selected equations for the unknowns: full rank of
/// the square Jacobian at generic points. Solvability here is local (implicit
/// function criterion); no claim about a unique global solution is made.
SelectionVerdict test_selection(const ModelDef& m, const EquationSelection& sel,
                                const TestOptions& opt = {});

struct PruneResult {
    std::vector<const sym::Symbol*> remaining_unknowns;
    /// (state name, output it was inverted from), in resolution order
    std::vector<std::pair<std::string, std::string>> solved;
};

/// Resolves states measured through outputs invertible in a single state
/// (y = x_i, y = a*x_i, y = 1 - x_i/c, and chains thereof) and removes them
/// from the unknown set.
PruneResult prune_directly_solved(const ModelDef& m);

struct SearchLogEntry {
    std::string output;
    int order;
    bool accepted;
    std::string reason;
};

struct SearchResult {
    bool found = false;
    EquationSelection selection;
    std::vector<SearchLogEntry> log;
    std::map<std::string, int> max_order_per_output; // outputs used, with max order
    int order_cap = 0;
    int rank_reached = 0;
};

/// Greedy search over (output, derivative-order) candidates ordered by
/// (order, TS before VS, expression size): a candidate is kept iff it raises
/// the Jacobian rank at an exact witness point. Candidates processed in order
/// of derivative order makes the accepted set minimize the highest order.
/// found == false means no solvable selection exists within the cap.
SearchResult search_minimal_selection(const ModelDef& m,
                                      const std::vector<std::string>& available_outputs,
                                      int order_cap, const TestOptions& opt = {});

/// One CSV row per search result: model, n, max derivative order used per
/// measurement, verdict.
void write_search_csv_header(std::ostream& out);
void write_search_csv_row(std::ostream& out, const ModelDef& m, const SearchResult& r);

} // namespace structid::algsys
