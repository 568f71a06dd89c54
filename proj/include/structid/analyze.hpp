#pragma once

#include "structid/lie.hpp"
#include "structid/model.hpp"
#include "structid/rank.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace structid::oia {

using models::ModelDef;
using sym::SymbolPtr;

enum class Algorithm { FISPO, ORCDF };

struct AnalyzeOptions {
    int trials = 3;
    uint64_t seed = 1;
    int max_order = -1; // lie order (FISPO) / round (ORC-DF) cap; -1 = n+m-1
    size_t node_budget = lie::kDefaultNodeBudget;
    SamplerConfig sampler;
};

enum class ModelVerdict { FullRank, RankDeficient, Inconclusive };

struct AnalysisReport {
    std::string model;
    Algorithm algorithm = Algorithm::FISPO;
    ModelVerdict verdict = ModelVerdict::Inconclusive;
    int rank = 0;
    int target = 0;
    int orders_used = 0; // highest Lie order (FISPO) or extension round (ORC-DF)
    std::vector<int> rank_by_order;
    std::map<std::string, std::string> verdicts; // variable -> verdict string
    std::vector<std::string> deficient;
    std::vector<std::string> params;
    int trials = 0;
    uint64_t seed = 0;
    std::vector<std::pair<std::string, Rational>> witness;
    double elapsed_ms = 0.0;
    std::string note; // budget diagnostics for inconclusive results

    bool full_rank() const { return verdict == ModelVerdict::FullRank; }
};

const char* verdict_name(ModelVerdict v);
const char* algorithm_name(Algorithm a);

/// Observability/identifiability via the extended observability matrix: rows
/// d(y^(k))/d(x,theta) are appended order by order, with a probabilistic exact
/// rank test after each order; stops at full rank n+m, on rank stagnation, or
/// at the order cap. Budget overruns surface as Inconclusive.
AnalysisReport fispo_analyze(const ModelDef& m, const std::vector<SymbolPtr>& params,
                             const AnalyzeOptions& opt = {});

/// Observability rank condition with direct feedthrough, for input-affine
/// systems: Omega starts from the output-defining functions and is extended
/// each round by Lie derivatives along the drift and each input column.
AnalysisReport orcdf_analyze(const ModelDef& m, const std::vector<SymbolPtr>& params,
                             const AnalyzeOptions& opt = {});

/// Column-deletion diagnosis: a variable is flagged not-observable /
/// not-identifiable (probabilistic) iff removing its column leaves the
/// deficient rank unchanged.
std::map<std::string, std::string> classify_variables(
    const RankResult& evidence, const std::vector<std::pair<std::string, bool>>& columns);

/// Stable machine-readable form; timing fields are omitted when
/// include_timing is false so that identical seeds give identical bytes.
std::string report_to_json(const AnalysisReport& r, bool include_timing);

} // namespace structid::oia
