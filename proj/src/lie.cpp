#include "structid/lie.hpp"

#include <map>
#include <mutex>

namespace structid::lie {

using namespace structid::sym;

namespace {

std::vector<ExprPtr> state_gradient(const ExprPtr& e, const ModelDef& m) {
    std::vector<ExprPtr> grad;
    grad.reserve(m.states.size());
    for (const auto& s : m.states) grad.push_back(differentiate(e, s));
    return grad;
}

ExprPtr dot_with_dynamics(const std::vector<ExprPtr>& grad, const ModelDef& m) {
    std::vector<ExprPtr> terms;
    terms.reserve(grad.size());
    for (size_t i = 0; i < grad.size(); ++i) {
        if (grad[i]->is_constant(0)) continue;
        terms.push_back(mul({grad[i], m.dynamics[i]}));
    }
    return add(std::move(terms));
}

std::mutex& cache_mutex() {
    static std::mutex* mu = new std::mutex;
    return *mu;
}

LieStack& cache_slot(const ModelDef& m) {
    // caller holds cache_mutex(); the stack lives and dies with its model
    if (!m.lie_cache.ptr) m.lie_cache.ptr = std::make_shared<LieStack>();
    return *std::static_pointer_cast<LieStack>(m.lie_cache.ptr);
}

void check_budget(const ExprPtr& e, size_t budget, const std::string& what) {
    size_t n = dag_size(e);
    if (n > budget)
        throw ExpressionBlowup(n, what + " exceeds node budget (" + std::to_string(n) + " > " +
                                      std::to_string(budget) + ")");
}

} // namespace

ExprPtr lie_derivative(const ExprPtr& h, const ModelDef& m) {
    return dot_with_dynamics(state_gradient(h, m), m);
}

namespace {

LieStack& ensure_stack(const ModelDef& m, int max_order, size_t node_budget) {
    // caller holds the cache lock
    LieStack& st = cache_slot(m);
    if (st.model == nullptr) {
        st.model = &m;
        st.entries.emplace_back();
        for (size_t i = 0; i < m.outputs.size(); ++i)
            st.entries[0].push_back({static_cast<int>(i), 0, m.outputs[i].expr, {}});
        st.max_order = 0;
    }
    while (st.max_order < max_order) {
        auto& prev = st.entries.back();
        std::vector<StackEntry> next;
        next.reserve(prev.size());
        for (auto& entry : prev) {
            if (entry.state_gradient.empty()) entry.state_gradient = state_gradient(entry.expr, m);
            ExprPtr e = dot_with_dynamics(entry.state_gradient, m);
            check_budget(e, node_budget,
                         m.name + " output " + m.outputs[static_cast<size_t>(entry.output_index)].name +
                             " order " + std::to_string(entry.order + 1));
            next.push_back({entry.output_index, entry.order + 1, e, {}});
        }
        st.entries.push_back(std::move(next));
        ++st.max_order;
    }
    return st;
}

} // namespace

const LieStack& build_lie_stack(const ModelDef& m, int max_order, size_t node_budget) {
    if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
    std::lock_guard<std::mutex> lock(cache_mutex());
    return ensure_stack(m, max_order, node_budget);
}

std::vector<ExprPtr> stack_state_gradient(const ModelDef& m, int output_index, int order,
                                          size_t node_budget) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    LieStack& st = ensure_stack(m, order, node_budget);
    StackEntry& entry =
        st.entries[static_cast<size_t>(order)][static_cast<size_t>(output_index)];
    if (entry.state_gradient.empty()) entry.state_gradient = state_gradient(entry.expr, m);
    return entry.state_gradient;
}

AffineDecomposition decompose_input_affine(const ModelDef& m) {
    AffineDecomposition d;
    const size_t p = m.inputs.size();

    auto split = [&](const ExprPtr& e, const std::string& where) {
        // returns {drift, per-input coefficient}
        std::pair<ExprPtr, std::vector<ExprPtr>> out{constant(0),
                                                     std::vector<ExprPtr>(p, constant(0))};
        std::vector<ExprPtr> drift_terms;
        std::vector<std::vector<ExprPtr>> input_terms(p);
        std::vector<ExprPtr> terms;
        // canonical forms: a sum, a content-scaled sum, or a single term
        ExprPtr body = e;
        ExprPtr scale = constant(1);
        if (e->kind == NodeKind::Product && e->args.size() == 2 &&
            e->args[0]->kind == NodeKind::Constant && e->args[1]->kind == NodeKind::Sum) {
            scale = e->args[0];
            body = e->args[1];
        }
        if (body->kind == NodeKind::Sum)
            for (const auto& t : body->args) terms.push_back(mul({scale, t}));
        else
            terms = {e};
        for (const auto& t : terms) {
            int hit = -1;
            for (size_t j = 0; j < p; ++j) {
                const Symbol* uj = m.inputs[j].get();
                if (!t->depends_on(uj)) continue;
                if (hit >= 0) throw NotInputAffine(m.name + ": term couples two inputs in " + where);
                // the input must appear as a plain degree-1 factor of a product
                std::vector<ExprPtr> factors =
                    t->kind == NodeKind::Product ? t->args : std::vector<ExprPtr>{t};
                std::vector<ExprPtr> rest;
                int count = 0;
                for (const auto& f : factors) {
                    if (f->kind == NodeKind::SymbolRef && f->symbol.get() == uj) {
                        ++count;
                        continue;
                    }
                    if (f->depends_on(uj))
                        throw NotInputAffine(m.name + ": input " + uj->name +
                                             " appears nonlinearly in " + where);
                    rest.push_back(f);
                }
                if (count != 1)
                    throw NotInputAffine(m.name + ": input " + uj->name +
                                         " appears nonlinearly in " + where);
                input_terms[j].push_back(rest.empty() ? constant(1) : mul(std::move(rest)));
                hit = static_cast<int>(j);
            }
            if (hit < 0) drift_terms.push_back(t);
        }
        out.first = add(std::move(drift_terms));
        for (size_t j = 0; j < p; ++j) out.second[j] = add(std::move(input_terms[j]));
        return out;
    };

    d.g.assign(p, {});
    d.h.assign(p, {});
    for (size_t i = 0; i < m.dynamics.size(); ++i) {
        auto [drift, cols] = split(m.dynamics[i], "d/dt " + m.states[i]->name);
        d.f0.push_back(drift);
        for (size_t j = 0; j < p; ++j) d.g[j].push_back(cols[j]);
    }
    for (const auto& o : m.outputs) {
        auto [bias, cols] = split(o.expr, "output " + o.name);
        d.h0.push_back(bias);
        for (size_t j = 0; j < p; ++j) d.h[j].push_back(cols[j]);
    }

    // reconstruction identity (structural, after simplification)
    for (size_t i = 0; i < m.dynamics.size(); ++i) {
        std::vector<ExprPtr> parts{d.f0[i]};
        for (size_t j = 0; j < p; ++j)
            parts.push_back(mul({d.g[j][i], symref(m.inputs[j])}));
        ExprPtr rebuilt = add(std::move(parts));
        if (rebuilt.get() != m.dynamics[i].get())
            throw NotInputAffine(m.name + ": affine reconstruction mismatch for state " +
                                 m.states[i]->name);
    }
    return d;
}

} // namespace structid::lie
