#include "structid/algsys.hpp"

#include "structid/lie.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace structid::algsys {

using namespace structid::sym;
using oia::PointSampler;

const char* selection_verdict_name(SelectionVerdict v) {
    switch (v) {
        case SelectionVerdict::LocallySolvable: return "locally_solvable";
        case SelectionVerdict::Singular: return "singular";
        case SelectionVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

EquationSelection selection_from_names(const ModelDef& m,
                                       const std::vector<std::pair<std::string, int>>& picks) {
    EquationSelection sel;
    for (const auto& [name, order] : picks) {
        int idx = m.output_index(name);
        if (idx < 0) throw models::ValidationError(m.name + ": no output named '" + name + "'");
        sel.entries.push_back({idx, order});
    }
    for (const auto& s : m.states) sel.unknowns.push_back(s.get());
    return sel;
}

namespace {

oia::ExprMatrix sampler_source_for(const ModelDef& m) {
    oia::ExprMatrix src(1);
    for (const auto& e : m.dynamics) src[0].push_back(e);
    for (const auto& o : m.outputs) src[0].push_back(o.expr);
    for (const auto& s : m.states) src[0].push_back(symref(s));
    for (const auto& s : m.inputs) src[0].push_back(symref(s));
    src[0].push_back(symref(ln10_symbol()));
    return src;
}

std::vector<ExprPtr> jacobian_row(const ModelDef& m, const SelectionEntry& e,
                                  const std::vector<const Symbol*>& unknowns,
                                  size_t node_budget) {
    std::vector<ExprPtr> grad =
        lie::stack_state_gradient(m, e.output_index, e.order, node_budget);
    std::vector<ExprPtr> row;
    row.reserve(unknowns.size());
    for (const Symbol* s : unknowns) {
        int idx = m.state_index(s);
        row.push_back(idx >= 0 ? grad[static_cast<size_t>(idx)] : differentiate(m.outputs[0].expr, s));
    }
    return row;
}

} // namespace

SelectionVerdict test_selection(const ModelDef& m, const EquationSelection& sel,
                                const TestOptions& opt) {
    if (sel.entries.size() != sel.unknowns.size())
        throw std::invalid_argument(m.name + ": selection is not square (" +
                                    std::to_string(sel.entries.size()) + " equations for " +
                                    std::to_string(sel.unknowns.size()) + " unknowns)");
    oia::ExprMatrix rows;
    try {
        for (const auto& e : sel.entries)
            rows.push_back(jacobian_row(m, e, sel.unknowns, opt.node_budget));
    } catch (const lie::ExpressionBlowup&) {
        return SelectionVerdict::Inconclusive;
    }
    std::vector<std::string> labels;
    for (const Symbol* s : sel.unknowns) labels.push_back(s->name);
    oia::RankResult rr = oia::numeric_rank(rows, labels, opt.sampler, opt.trials, opt.seed);
    return rr.verdict == oia::RankVerdict::FullRank ? SelectionVerdict::LocallySolvable
                                                    : SelectionVerdict::Singular;
}

PruneResult prune_directly_solved(const ModelDef& m) {
    PruneResult out;
    std::set<const Symbol*> solved;
    std::set<int> consumed;
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < m.outputs.size(); ++i) {
            if (consumed.count(static_cast<int>(i))) continue;
            const ExprPtr& e = m.outputs[i].expr;
            const Symbol* lone = nullptr;
            bool ok = true;
            for (const Symbol* s : e->free_symbols()) {
                if (m.state_index(s) < 0 || solved.count(s)) continue;
                if (lone) { ok = false; break; }
                lone = s;
            }
            if (!ok || !lone) continue;
            ExprPtr slope = differentiate(e, lone);
            if (slope->is_constant(0)) continue;
            bool invertible = true;
            for (const Symbol* s : slope->free_symbols())
                if (m.state_index(s) >= 0 && !solved.count(s)) invertible = false;
            if (!invertible) continue;
            solved.insert(lone);
            consumed.insert(static_cast<int>(i));
            out.solved.emplace_back(lone->name, m.outputs[i].name);
            progress = true;
        }
    }
    for (const auto& s : m.states)
        if (!solved.count(s.get())) out.remaining_unknowns.push_back(s.get());
    return out;
}

SearchResult search_minimal_selection(const ModelDef& m,
                                      const std::vector<std::string>& available_outputs,
                                      int order_cap, const TestOptions& opt) {
    if (order_cap < 0) throw std::invalid_argument("order cap must be >= 0");
    SearchResult res;
    res.order_cap = order_cap;
    for (const auto& s : m.states) res.selection.unknowns.push_back(s.get());
    const size_t n = res.selection.unknowns.size();

    std::vector<int> outs;
    for (const auto& name : available_outputs) {
        int idx = m.output_index(name);
        if (idx < 0) throw models::ValidationError(m.name + ": no output named '" + name + "'");
        outs.push_back(idx);
    }

    struct Cand {
        SelectionEntry entry;
        size_t size;
        int vs_penalty;
    };
    std::vector<Cand> cands;
    for (int k = 0; k <= order_cap; ++k) {
        for (int idx : outs) {
            const lie::StackEntry& se = lie::build_lie_stack(m, k, opt.node_budget)
                                            .at(idx, k);
            // derivatives of TS are preferred over VS: same information,
            // smaller terms
            int vs_pen = (m.outputs[static_cast<size_t>(idx)].name == "VS" && k > 0) ? 1 : 0;
            cands.push_back({{idx, k}, dag_size(se.expr), vs_pen});
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.entry.order != b.entry.order) return a.entry.order < b.entry.order;
        if (a.vs_penalty != b.vs_penalty) return a.vs_penalty < b.vs_penalty;
        if (a.size != b.size) return a.size < b.size;
        return a.entry.output_index < b.entry.output_index;
    });

    PointSampler sampler(sampler_source_for(m), opt.sampler);
    for (int attempt = 0; attempt < opt.sampler.max_attempts; ++attempt) {
        std::mt19937_64 rng(oia::trial_seed(opt.seed, attempt));
        RationalBindings point;
        try {
            point = sampler.sample(rng);
        } catch (const oia::SamplerExhausted&) {
            throw;
        }
        RationalEvaluator ev(point);
        oia::IncrementalRank elim(n);
        res.selection.entries.clear();
        res.log.clear();
        bool domain_error = false;
        try {
            for (const auto& c : cands) {
                if (elim.rank() == static_cast<int>(n)) break;
                std::vector<ExprPtr> row =
                    jacobian_row(m, c.entry, res.selection.unknowns, opt.node_budget);
                std::vector<Rational> vals;
                vals.reserve(row.size());
                for (const auto& e : row) vals.push_back(ev.eval(e));
                const std::string& oname =
                    m.outputs[static_cast<size_t>(c.entry.output_index)].name;
                if (elim.add_row(std::move(vals))) {
                    res.selection.entries.push_back(c.entry);
                    res.log.push_back({oname, c.entry.order, true, "raises rank"});
                } else {
                    res.log.push_back({oname, c.entry.order, false,
                                       "no rank increase at witness point"});
                }
            }
            res.rank_reached = elim.rank();
        } catch (const EvalError& err) {
            if (err.error_kind == EvalErrorKind::UnboundSymbol) throw;
            domain_error = true;
        } catch (const lie::ExpressionBlowup&) {
            res.found = false;
            return res;
        }
        if (domain_error) continue;

        if (res.rank_reached == static_cast<int>(n)) {
            // confirm at independent points
            if (test_selection(m, res.selection, opt) == SelectionVerdict::LocallySolvable) {
                res.found = true;
                for (const auto& e : res.selection.entries) {
                    const std::string& oname =
                        m.outputs[static_cast<size_t>(e.output_index)].name;
                    auto it = res.max_order_per_output.find(oname);
                    if (it == res.max_order_per_output.end())
                        res.max_order_per_output[oname] = e.order;
                    else
                        it->second = std::max(it->second, e.order);
                }
                return res;
            }
            continue; // witness point was special; retry with a fresh point
        }
        res.found = false;
        return res; // candidate pool exhausted below full rank: no selection in cap
    }
    res.found = false;
    return res;
}

void write_search_csv_header(std::ostream& out) {
    out << "model,n,Vg,CH4,CO2,pH,IN,TS,VS,Ac,verdict\n";
}

void write_search_csv_row(std::ostream& out, const ModelDef& m, const SearchResult& r) {
    out << m.name << ',' << m.states.size();
    for (const char* name : {"Vg", "CH4", "CO2", "pH", "IN", "TS", "VS", "Ac"}) {
        out << ',';
        auto it = r.max_order_per_output.find(name);
        if (it != r.max_order_per_output.end()) out << it->second;
    }
    out << ',' << (r.found ? "locally_solvable" : "no_solvable_selection") << "\n";
}

} // namespace structid::algsys
