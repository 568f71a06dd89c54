#pragma once

#include "structid/expr.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace structid::oia {

using sym::ExprPtr;

struct SamplerConfig {
    // values are num/den with both drawn uniformly from [min_part, max_part]
    long min_part = 1;
    long max_part = 10000;
    // symbols appearing in exponent position get small integer values so that
    // exact evaluation stays rational
    long exponent_min = 2;
    long exponent_max = 5;
    int max_attempts = 100;
};

struct SamplerExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RankVerdict { FullRank, RankDeficient };

struct RankResult {
    int rank = 0;
    int target = 0;
    int trials = 0;
    uint64_t seed = 0;
    RankVerdict verdict = RankVerdict::RankDeficient;
    /// column labels whose deletion leaves the deficient rank unchanged
    std::vector<std::string> deficient_columns;
    /// sample point of the trial that achieved the reported rank, by name
    std::vector<std::pair<std::string, Rational>> witness;
};

using ExprMatrix = std::vector<std::vector<ExprPtr>>;

/// Draws positive rational points for a set of expressions, respecting domain
/// constraints: exponent symbols get small integers, and for each sqrt
/// argument one linearly-occurring symbol is solved so the argument is a
/// perfect square (exact evaluation stays in the rationals).
class PointSampler {
public:
    PointSampler(const ExprMatrix& exprs, SamplerConfig cfg);
    /// One valid sample; resamples internally on domain errors up to
    /// max_attempts, then throws SamplerExhausted.
    sym::RationalBindings sample(std::mt19937_64& rng) const;

    const std::vector<const sym::Symbol*>& symbols() const { return symbols_; }

private:
    SamplerConfig cfg_;
    std::vector<const sym::Symbol*> symbols_;       // sorted by name
    std::vector<const sym::Symbol*> exponent_syms_; // subset sampled as integers
    struct SqrtPlan {
        ExprPtr arg;        // the sqrt argument
        const sym::Symbol* solved; // symbol solved to make arg a perfect square
        ExprPtr slope;      // d(arg)/d(solved), free of solved
        ExprPtr rest;       // arg with solved := 0
    };
    std::vector<SqrtPlan> sqrt_plans_;
    bool attempt(std::mt19937_64& rng, sym::RationalBindings& out) const;
};

/// Exact-rational rank at random generic points (Schwartz-Zippel style).
/// Reported rank is the max over trials; FullRank verdicts carry a witness
/// point and are certain, RankDeficient requires every trial to agree.
RankResult numeric_rank(const ExprMatrix& m, const std::vector<std::string>& column_labels,
                        const SamplerConfig& cfg, int trials, uint64_t seed);
RankResult numeric_rank(const ExprMatrix& m, const SamplerConfig& cfg = {}, int trials = 3,
                        uint64_t seed = 1);

/// Incremental exact Gaussian elimination: rows are reduced against the
/// running echelon basis as they arrive.
class IncrementalRank {
public:
    explicit IncrementalRank(size_t ncols) : ncols_(ncols) {}
    /// Returns true if the row increased the rank.
    bool add_row(std::vector<Rational> row);
    int rank() const { return static_cast<int>(basis_.size()); }
    size_t ncols() const { return ncols_; }
    const std::vector<std::vector<Rational>>& stored_rows() const { return rows_; }

private:
    size_t ncols_;
    std::vector<std::pair<size_t, std::vector<Rational>>> basis_; // (pivot col, row)
    std::vector<std::vector<Rational>> rows_;                     // all rows as evaluated
};

/// Rank of an explicit rational matrix (used for column-deletion probes).
int rational_rank(const std::vector<std::vector<Rational>>& rows, size_t ncols,
                  int skip_col = -1);

/// Deterministic per-trial seed derivation.
uint64_t trial_seed(uint64_t seed, int trial);

} // namespace structid::oia
