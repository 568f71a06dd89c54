#include "structid/rank.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace structid::oia {

using namespace structid::sym;

uint64_t trial_seed(uint64_t seed, int trial) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

long uniform_long(std::mt19937_64& rng, long lo, long hi) {
    // plain modulo mapping: deterministic across platforms, bias negligible
    // for the small spans used here
    return lo + static_cast<long>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

} // namespace

PointSampler::PointSampler(const ExprMatrix& exprs, SamplerConfig cfg) : cfg_(cfg) {
    std::set<const Symbol*> all;
    std::set<const Symbol*> in_exponent;
    std::unordered_set<const Expr*> seen;
    std::vector<const Expr*> sqrt_args_order;
    std::set<const Expr*> sqrt_args;
    std::vector<ExprPtr> sqrt_arg_ptrs;

    std::vector<const Expr*> stack;
    std::vector<ExprPtr> keepalive;
    for (const auto& row : exprs)
        for (const auto& e : row) {
            keepalive.push_back(e);
            if (seen.insert(e.get()).second) stack.push_back(e.get());
        }
    std::unordered_map<const Expr*, ExprPtr> ptr_of;
    auto remember = [&](const ExprPtr& p) { ptr_of[p.get()] = p; };
    for (const auto& row : exprs)
        for (const auto& e : row) remember(e);
    while (!stack.empty()) {
        const Expr* e = stack.back();
        stack.pop_back();
        for (const Symbol* s : e->free_symbols()) all.insert(s);
        if (e->kind == NodeKind::Power)
            for (const Symbol* s : e->args[1]->free_symbols()) in_exponent.insert(s);
        if (e->kind == NodeKind::Sqrt && !e->args[0]->free_symbols().empty()) {
            if (sqrt_args.insert(e->args[0].get()).second) {
                sqrt_args_order.push_back(e->args[0].get());
                sqrt_arg_ptrs.push_back(e->args[0]);
            }
        }
        for (const auto& a : e->args) {
            remember(a);
            if (seen.insert(a.get()).second) stack.push_back(a.get());
        }
    }

    symbols_.assign(all.begin(), all.end());
    std::sort(symbols_.begin(), symbols_.end(),
              [](const Symbol* a, const Symbol* b) { return a->name < b->name; });
    for (const Symbol* s : symbols_)
        if (in_exponent.count(s)) exponent_syms_.push_back(s);

    // plan one solved symbol per distinct sqrt argument
    std::set<const Symbol*> taken;
    for (const ExprPtr& arg : sqrt_arg_ptrs) {
        SqrtPlan plan;
        plan.arg = arg;
        plan.solved = nullptr;
        std::vector<const Symbol*> cands(arg->free_symbols().begin(), arg->free_symbols().end());
        std::sort(cands.begin(), cands.end(),
                  [](const Symbol* a, const Symbol* b) { return a->name < b->name; });
        // prefer aggregated constants: solving one re-parameterizes the point
        // without touching states or analyzed parameters
        std::stable_sort(cands.begin(), cands.end(), [](const Symbol* a, const Symbol* b) {
            auto score = [](const Symbol* s) {
                return s->kind == SymbolKind::AggregatedConstant ? 0
                       : s->kind == SymbolKind::InletConcentration ? 1 : 2;
            };
            return score(a) < score(b);
        });
        for (const Symbol* s : cands) {
            if (taken.count(s) || in_exponent.count(s)) continue;
            ExprPtr slope = differentiate(arg, s);
            if (slope->is_constant(0) || slope->depends_on(s)) continue;
            bool in_other = false;
            for (const ExprPtr& other : sqrt_arg_ptrs)
                if (other.get() != arg.get() && other->depends_on(s)) in_other = true;
            if (in_other) continue;
            plan.solved = s;
            plan.slope = slope;
            plan.rest = substitute(arg, {{s, constant(0)}});
            break;
        }
        if (plan.solved) {
            taken.insert(plan.solved);
            sqrt_plans_.push_back(std::move(plan));
        }
        // without a solvable symbol the argument is sampled as-is and exact
        // evaluation will reject non-perfect squares (SamplerExhausted)
    }
}

bool PointSampler::attempt(std::mt19937_64& rng, RationalBindings& out) const {
    out.clear();
    std::set<const Symbol*> solved;
    for (const auto& plan : sqrt_plans_) solved.insert(plan.solved);
    for (const Symbol* s : symbols_) {
        if (solved.count(s)) continue;
        bool expo = std::find(exponent_syms_.begin(), exponent_syms_.end(), s) !=
                    exponent_syms_.end();
        if (expo) {
            out[s] = Rational(uniform_long(rng, cfg_.exponent_min, cfg_.exponent_max));
        } else {
            long num = uniform_long(rng, cfg_.min_part, cfg_.max_part);
            long den = uniform_long(rng, cfg_.min_part, cfg_.max_part);
            Rational q(num, den);
            q.canonicalize();
            out[s] = q;
        }
    }
    for (const auto& plan : sqrt_plans_) {
        Rational slope, rest;
        try {
            slope = evaluate_rational(plan.slope, out);
            rest = evaluate_rational(plan.rest, out);
        } catch (const EvalError&) {
            return false;
        }
        if (slope == 0) return false;
        // choose t with t^2 > rest, so solved = (t^2 - rest)/slope is positive
        // for positive slope; the sqrt argument then evaluates to exactly t^2
        Rational t;
        if (rest <= 0) {
            t = Rational(uniform_long(rng, 1, cfg_.max_part), uniform_long(rng, 1, cfg_.max_part));
        } else {
            mpz_class prod = rest.get_num() * rest.get_den();
            mpz_class root;
            mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
            root += 1 + uniform_long(rng, 0, 16);
            t = Rational(root, rest.get_den());
        }
        Rational val = (t * t - rest) / slope;
        if (val == 0) return false;
        out[plan.solved] = val;
    }
    return true;
}

RationalBindings PointSampler::sample(std::mt19937_64& rng) const {
    RationalBindings out;
    for (int k = 0; k < cfg_.max_attempts; ++k)
        if (attempt(rng, out)) return out;
    throw SamplerExhausted("could not draw a domain-valid sample point after " +
                           std::to_string(cfg_.max_attempts) + " attempts");
}

bool IncrementalRank::add_row(std::vector<Rational> row) {
    rows_.push_back(row);
    for (const auto& [pivot, basis_row] : basis_) {
        if (row[pivot] == 0) continue;
        Rational factor = row[pivot] / basis_row[pivot];
        for (size_t j = 0; j < ncols_; ++j)
            if (basis_row[j] != 0) row[j] -= factor * basis_row[j];
    }
    for (size_t j = 0; j < ncols_; ++j) {
        if (row[j] != 0) {
            basis_.emplace_back(j, std::move(row));
            return true;
        }
    }
    return false;
}

int rational_rank(const std::vector<std::vector<Rational>>& rows, size_t ncols, int skip_col) {
    std::vector<std::pair<size_t, std::vector<Rational>>> basis;
    int rank = 0;
    for (const auto& original : rows) {
        std::vector<Rational> row = original;
        if (skip_col >= 0) row[static_cast<size_t>(skip_col)] = 0;
        for (const auto& [pivot, basis_row] : basis) {
            if (row[pivot] == 0) continue;
            Rational factor = row[pivot] / basis_row[pivot];
            for (size_t j = 0; j < ncols; ++j)
                if (basis_row[j] != 0) row[j] -= factor * basis_row[j];
        }
        for (size_t j = 0; j < ncols; ++j) {
            if (row[j] != 0) {
                basis.emplace_back(j, std::move(row));
                ++rank;
                break;
            }
        }
    }
    return rank;
}

namespace {

std::vector<std::vector<Rational>> evaluate_matrix(const ExprMatrix& m,
                                                   const RationalBindings& point) {
    RationalEvaluator ev(point);
    std::vector<std::vector<Rational>> rows;
    rows.reserve(m.size());
    for (const auto& row : m) {
        std::vector<Rational> r;
        r.reserve(row.size());
        for (const auto& e : row) r.push_back(ev.eval(e));
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace

RankResult numeric_rank(const ExprMatrix& m, const std::vector<std::string>& column_labels,
                        const SamplerConfig& cfg, int trials, uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (m.empty()) {
        RankResult r;
        r.trials = trials;
        r.seed = seed;
        r.verdict = RankVerdict::RankDeficient;
        return r;
    }
    const size_t ncols = m[0].size();
    for (const auto& row : m)
        if (row.size() != ncols) throw std::invalid_argument("ragged matrix");

    PointSampler sampler(m, cfg);
    RankResult result;
    result.target = static_cast<int>(ncols);
    result.trials = trials;
    result.seed = seed;

    int best_rank = -1;
    std::vector<std::vector<Rational>> best_rows;
    RationalBindings best_point;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(trial_seed(seed, t));
        RationalBindings point;
        std::vector<std::vector<Rational>> rows;
        int attempts = 0;
        for (;;) {
            point = sampler.sample(rng);
            try {
                rows = evaluate_matrix(m, point);
                break;
            } catch (const EvalError& err) {
                if (err.error_kind == EvalErrorKind::UnboundSymbol) throw;
                if (++attempts >= cfg.max_attempts)
                    throw SamplerExhausted(
                        "matrix evaluation kept hitting domain errors; the sampling range "
                        "violates the model's domain constraints");
            }
        }
        int r = rational_rank(rows, ncols);
        if (r > best_rank) {
            best_rank = r;
            best_rows = std::move(rows);
            best_point = std::move(point);
        }
    }

    result.rank = best_rank;
    result.verdict =
        best_rank == result.target ? RankVerdict::FullRank : RankVerdict::RankDeficient;
    for (const Symbol* s : sampler.symbols())
        result.witness.emplace_back(s->name, best_point.at(s));

    if (result.verdict == RankVerdict::RankDeficient) {
        for (size_t j = 0; j < ncols; ++j) {
            if (rational_rank(best_rows, ncols, static_cast<int>(j)) == best_rank) {
                result.deficient_columns.push_back(
                    j < column_labels.size() ? column_labels[j] : "col" + std::to_string(j));
            }
        }
    }
    return result;
}

RankResult numeric_rank(const ExprMatrix& m, const SamplerConfig& cfg, int trials, uint64_t seed) {
    return numeric_rank(m, {}, cfg, trials, seed);
}

} // namespace structid::oia
