#include "structid/analyze.hpp"

#include "structid/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <functional>

namespace structid::oia {

using namespace structid::sym;

const char* verdict_name(ModelVerdict v) {
    switch (v) {
        case ModelVerdict::FullRank: return "full_rank";
        case ModelVerdict::RankDeficient: return "rank_deficient";
        case ModelVerdict::Inconclusive: return "inconclusive_budget";
    }
    return "?";
}

const char* algorithm_name(Algorithm a) { return a == Algorithm::FISPO ? "fispo" : "orcdf"; }

namespace {

struct Column {
    const Symbol* sym;
    std::string name;
    bool is_param;
};

std::vector<Column> make_columns(const ModelDef& m, const std::vector<SymbolPtr>& params) {
    std::vector<Column> cols;
    for (const auto& s : m.states) cols.push_back({s.get(), s->name, false});
    for (const auto& p : params) {
        bool declared = false;
        for (const auto& q : m.parameters)
            if (q.get() == p.get()) declared = true;
        if (!declared)
            throw std::invalid_argument(m.name + ": '" + p->name +
                                        "' is not a declared parameter of the model");
        cols.push_back({p.get(), p->name, true});
    }
    return cols;
}

/// Expressions whose joint symbol set covers every future Jacobian row, so the
/// sampler can be planned once: dynamics, outputs, and ln10 when a log10
/// derivative will introduce it.
ExprMatrix sampler_source(const ModelDef& m) {
    ExprMatrix src(1);
    for (const auto& e : m.dynamics) src[0].push_back(e);
    bool has_log = false;
    std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& e) {
        if (e->kind == NodeKind::Log10) has_log = true;
        for (const auto& a : e->args) scan(a);
    };
    for (const auto& o : m.outputs) {
        src[0].push_back(o.expr);
        scan(o.expr);
    }
    for (const auto& s : m.states) src[0].push_back(symref(s));
    for (const auto& p : m.parameters) src[0].push_back(symref(p));
    for (const auto& s : m.inputs) src[0].push_back(symref(s));
    if (has_log) src[0].push_back(symref(ln10_symbol()));
    return src;
}

/// One sample point with an incremental elimination state; on a domain error
/// the point is redrawn and all rows re-evaluated.
struct Trial {
    std::mt19937_64 rng;
    RationalBindings point;
    std::unique_ptr<RationalEvaluator> eval;
    IncrementalRank elim;

    Trial(uint64_t s, size_t ncols) : rng(s), elim(ncols) {}

    void draw(const PointSampler& sampler) {
        point = sampler.sample(rng);
        eval = std::make_unique<RationalEvaluator>(point);
    }
};

struct RowFeed {
    const PointSampler& sampler;
    std::vector<std::vector<ExprPtr>> rows; // all symbolic rows so far
    std::vector<std::unique_ptr<Trial>> trials;
    int max_attempts;

    RowFeed(const PointSampler& s, size_t ncols, int ntrials, uint64_t seed, int attempts)
        : sampler(s), max_attempts(attempts) {
        for (int t = 0; t < ntrials; ++t) {
            trials.push_back(std::make_unique<Trial>(trial_seed(seed, t), ncols));
            trials.back()->draw(sampler);
        }
    }

    void add_row(std::vector<ExprPtr> row) {
        rows.push_back(std::move(row));
        for (auto& tr : trials) feed(*tr, rows.back());
    }

    /// One order's worth of rows; trials evaluate independently in parallel.
    void add_rows(std::vector<std::vector<ExprPtr>> batch) {
        size_t first = rows.size();
        for (auto& r : batch) rows.push_back(std::move(r));
        parallel_for_each(trials.size(), [&](size_t t) {
            for (size_t r = first; r < rows.size(); ++r) feed(*trials[t], rows[r]);
        });
    }

    void feed(Trial& tr, const std::vector<ExprPtr>& row) {
        for (int attempt = 0;; ++attempt) {
            try {
                std::vector<Rational> vals;
                vals.reserve(row.size());
                for (const auto& e : row) vals.push_back(tr.eval->eval(e));
                tr.elim.add_row(std::move(vals));
                return;
            } catch (const EvalError& err) {
                if (err.error_kind == EvalErrorKind::UnboundSymbol) throw;
                if (attempt >= max_attempts)
                    throw SamplerExhausted("matrix evaluation kept hitting domain errors");
                // redraw the point and replay every earlier row
                tr.draw(sampler);
                size_t ncols = tr.elim.ncols();
                tr.elim = IncrementalRank(ncols);
                for (size_t r = 0; r + 1 < rows.size(); ++r) {
                    std::vector<Rational> vals;
                    for (const auto& e : rows[r]) vals.push_back(tr.eval->eval(e));
                    tr.elim.add_row(std::move(vals));
                }
            }
        }
    }

    int max_rank() const {
        int r = 0;
        for (const auto& tr : trials) r = std::max(r, tr->elim.rank());
        return r;
    }

    const Trial& confirming(int rank) const {
        for (const auto& tr : trials)
            if (tr->elim.rank() == rank) return *tr;
        return *trials.front();
    }
};

void finalize(AnalysisReport& rep, const RowFeed& feed, const std::vector<Column>& cols,
              bool reached_target) {
    rep.rank = feed.max_rank();
    const Trial& best = feed.confirming(rep.rank);
    for (const auto& [s, v] : best.point) rep.witness.emplace_back(s->name, v);
    std::sort(rep.witness.begin(), rep.witness.end());

    if (reached_target) {
        rep.verdict = ModelVerdict::FullRank;
        for (const auto& c : cols)
            rep.verdicts[c.name] = c.is_param ? "locally_identifiable" : "locally_observable";
        return;
    }
    rep.verdict = ModelVerdict::RankDeficient;
    const auto& rows = best.elim.stored_rows();
    std::vector<char> drop(cols.size(), 0);
    parallel_for_each(cols.size(), [&](size_t j) {
        drop[j] = rational_rank(rows, cols.size(), static_cast<int>(j)) == rep.rank;
    });
    std::vector<std::string> flagged;
    for (size_t j = 0; j < cols.size(); ++j)
        if (drop[j]) flagged.push_back(cols[j].name);
    rep.deficient = flagged;
    for (const auto& c : cols) {
        bool bad = std::find(flagged.begin(), flagged.end(), c.name) != flagged.end();
        if (c.is_param)
            rep.verdicts[c.name] =
                bad ? "not_locally_identifiable_probabilistic" : "locally_identifiable";
        else
            rep.verdicts[c.name] =
                bad ? "not_locally_observable_probabilistic" : "locally_observable";
    }
}

} // namespace

std::map<std::string, std::string> classify_variables(
    const RankResult& evidence, const std::vector<std::pair<std::string, bool>>& columns) {
    std::map<std::string, std::string> out;
    for (const auto& [name, is_param] : columns) {
        bool bad = evidence.verdict == RankVerdict::RankDeficient &&
                   std::find(evidence.deficient_columns.begin(), evidence.deficient_columns.end(),
                             name) != evidence.deficient_columns.end();
        if (is_param)
            out[name] = bad ? "not_locally_identifiable_probabilistic" : "locally_identifiable";
        else
            out[name] = bad ? "not_locally_observable_probabilistic" : "locally_observable";
    }
    return out;
}

AnalysisReport fispo_analyze(const ModelDef& m, const std::vector<SymbolPtr>& params,
                             const AnalyzeOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    AnalysisReport rep;
    rep.model = m.name;
    rep.algorithm = Algorithm::FISPO;
    rep.trials = opt.trials;
    rep.seed = opt.seed;
    for (const auto& p : params) rep.params.push_back(p->name);

    std::vector<Column> cols = make_columns(m, params);
    rep.target = static_cast<int>(cols.size());
    const int cap = opt.max_order >= 0 ? opt.max_order : static_cast<int>(cols.size()) - 1;

    try {
        PointSampler sampler(sampler_source(m), opt.sampler);
        RowFeed feed(sampler, cols.size(), opt.trials, opt.seed, opt.sampler.max_attempts);

        int prev_rank = -1;
        for (int k = 0; k <= cap; ++k) {
            std::vector<std::vector<ExprPtr>> batch;
            for (size_t i = 0; i < m.outputs.size(); ++i) {
                std::vector<ExprPtr> state_grad =
                    lie::stack_state_gradient(m, static_cast<int>(i), k, opt.node_budget);
                const auto& entry = lie::build_lie_stack(m, k, opt.node_budget)
                                        .at(static_cast<int>(i), k);
                std::vector<ExprPtr> row;
                row.reserve(cols.size());
                for (const auto& c : cols) {
                    if (!c.is_param) {
                        row.push_back(state_grad[static_cast<size_t>(m.state_index(c.sym))]);
                    } else {
                        row.push_back(differentiate(entry.expr, c.sym));
                    }
                }
                batch.push_back(std::move(row));
            }
            feed.add_rows(std::move(batch));
            int r = feed.max_rank();
            rep.rank_by_order.push_back(r);
            rep.orders_used = k;
            if (r == rep.target) break;
            if (r == prev_rank) break; // observable codistribution stabilized
            prev_rank = r;
        }
        finalize(rep, feed, cols, feed.max_rank() == rep.target);
    } catch (const lie::ExpressionBlowup& e) {
        rep.verdict = ModelVerdict::Inconclusive;
        rep.note = e.what();
        for (const auto& c : cols) rep.verdicts[c.name] = "inconclusive_budget";
    }

    rep.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

AnalysisReport orcdf_analyze(const ModelDef& m, const std::vector<SymbolPtr>& params,
                             const AnalyzeOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    AnalysisReport rep;
    rep.model = m.name;
    rep.algorithm = Algorithm::ORCDF;
    rep.trials = opt.trials;
    rep.seed = opt.seed;
    for (const auto& p : params) rep.params.push_back(p->name);

    std::vector<Column> cols = make_columns(m, params);
    rep.target = static_cast<int>(cols.size());
    const int cap = opt.max_order >= 0 ? opt.max_order : static_cast<int>(cols.size()) - 1;

    lie::AffineDecomposition dec = lie::decompose_input_affine(m); // may throw NotInputAffine

    auto check_budget = [&](const ExprPtr& e, const char* what) {
        size_t n = dag_size(e);
        if (n > opt.node_budget)
            throw lie::ExpressionBlowup(n, m.name + std::string(": ") + what +
                                               " exceeds node budget");
    };

    try {
        PointSampler sampler(sampler_source(m), opt.sampler);
        RowFeed feed(sampler, cols.size(), opt.trials, opt.seed, opt.sampler.max_attempts);

        // Omega starts from the output-defining functions
        std::vector<ExprPtr> frontier = dec.h0;
        for (const auto& hj : dec.h)
            for (const auto& e : hj)
                if (!e->is_constant(0)) frontier.push_back(e);

        auto push_rows = [&](const std::vector<ExprPtr>& entries) {
            std::vector<std::vector<ExprPtr>> batch;
            for (const auto& w : entries) {
                std::vector<ExprPtr> row;
                row.reserve(cols.size());
                for (const auto& c : cols) row.push_back(differentiate(w, c.sym));
                batch.push_back(std::move(row));
            }
            feed.add_rows(std::move(batch));
        };

        push_rows(frontier);
        int prev_rank = -1;
        rep.rank_by_order.push_back(feed.max_rank());
        rep.orders_used = 0;
        for (int round = 1; round <= cap; ++round) {
            if (feed.max_rank() == rep.target) break;
            if (feed.max_rank() == prev_rank) break;
            prev_rank = feed.max_rank();
            std::vector<ExprPtr> next;
            next.reserve(frontier.size() * (1 + dec.g.size()));
            for (const auto& w : frontier) {
                std::vector<ExprPtr> grad;
                grad.reserve(m.states.size());
                for (const auto& s : m.states) grad.push_back(differentiate(w, s));
                auto lie_along = [&](const std::vector<ExprPtr>& field) {
                    std::vector<ExprPtr> terms;
                    for (size_t i = 0; i < grad.size(); ++i) {
                        if (grad[i]->is_constant(0) || field[i]->is_constant(0)) continue;
                        terms.push_back(mul({grad[i], field[i]}));
                    }
                    return add(std::move(terms));
                };
                ExprPtr lf = lie_along(dec.f0);
                check_budget(lf, "Omega extension");
                next.push_back(lf);
                for (const auto& gj : dec.g) {
                    ExprPtr lg = lie_along(gj);
                    check_budget(lg, "Omega extension");
                    next.push_back(lg);
                }
            }
            push_rows(next);
            frontier = std::move(next);
            rep.rank_by_order.push_back(feed.max_rank());
            rep.orders_used = round;
        }
        finalize(rep, feed, cols, feed.max_rank() == rep.target);
    } catch (const lie::ExpressionBlowup& e) {
        rep.verdict = ModelVerdict::Inconclusive;
        rep.note = e.what();
        for (const auto& c : cols) rep.verdicts[c.name] = "inconclusive_budget";
    }

    rep.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string report_to_json(const AnalysisReport& r, bool include_timing) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["algorithm"] = algorithm_name(r.algorithm);
    j["verdict"] = verdict_name(r.verdict);
    j["rank"] = r.rank;
    j["target"] = r.target;
    j["orders_used"] = r.orders_used;
    j["rank_by_order"] = r.rank_by_order;
    j["params"] = r.params;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["verdicts"] = r.verdicts;
    j["deficient"] = r.deficient;
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (const auto& [name, q] : r.witness) w[name] = rational_to_string(q);
    j["witness"] = w;
    if (!r.note.empty()) j["note"] = r.note;
    if (include_timing) j["elapsed_ms"] = r.elapsed_ms;
    return j.dump(2) + "\n";
}

} // namespace structid::oia
