#include "structid/expr.hpp"

#include <unordered_map>

namespace structid::sym {

namespace {

struct Differentiator {
    const Symbol* s;
    std::unordered_map<const Expr*, ExprPtr> memo;

    ExprPtr d(const ExprPtr& e) {
        if (!e->depends_on(s)) return constant(0);
        auto it = memo.find(e.get());
        if (it != memo.end()) return it->second;
        ExprPtr r = compute(e);
        memo.emplace(e.get(), r);
        return r;
    }

    ExprPtr compute(const ExprPtr& e) {
        switch (e->kind) {
            case NodeKind::Constant:
                return constant(0);
            case NodeKind::SymbolRef:
                return constant(e->symbol.get() == s ? 1 : 0);
            case NodeKind::Sum: {
                std::vector<ExprPtr> ts;
                ts.reserve(e->args.size());
                for (const auto& a : e->args)
                    if (a->depends_on(s)) ts.push_back(d(a));
                return add(std::move(ts));
            }
            case NodeKind::Product: {
                std::vector<ExprPtr> ts;
                for (size_t i = 0; i < e->args.size(); ++i) {
                    if (!e->args[i]->depends_on(s)) continue;
                    std::vector<ExprPtr> fs;
                    fs.reserve(e->args.size());
                    for (size_t j = 0; j < e->args.size(); ++j)
                        fs.push_back(j == i ? d(e->args[j]) : e->args[j]);
                    ts.push_back(mul(std::move(fs)));
                }
                return add(std::move(ts));
            }
            case NodeKind::Power: {
                const ExprPtr& base = e->args[0];
                const ExprPtr& expo = e->args[1];
                if (expo->depends_on(s))
                    throw ConstructionError(
                        "cannot differentiate: exponent depends on " + s->name);
                // d(b^e) = e * b^(e-1) * b'
                return mul({expo, pow(base, sub(expo, constant(1))), d(base)});
            }
            case NodeKind::Div: {
                // d(n / prod b_i^k_i) =
                //   (n' * prod b_i - n * sum_i k_i b_i' prod_{j!=i} b_j) / prod b_i^(k_i+1)
                const ExprPtr& num = e->args[0];
                const ExprPtr& den = e->args[1];
                std::vector<std::pair<ExprPtr, ExprPtr>> factors; // (base, exponent)
                if (den->kind == NodeKind::Product) {
                    for (const auto& f : den->args) {
                        if (f->kind == NodeKind::Power)
                            factors.emplace_back(f->args[0], f->args[1]);
                        else
                            factors.emplace_back(f, constant(1));
                    }
                } else if (den->kind == NodeKind::Power) {
                    factors.emplace_back(den->args[0], den->args[1]);
                } else {
                    factors.emplace_back(den, constant(1));
                }

                std::vector<ExprPtr> lead;
                lead.reserve(factors.size() + 1);
                lead.push_back(d(num));
                for (const auto& [b, k] : factors) lead.push_back(b);
                std::vector<ExprPtr> terms;
                terms.push_back(mul(std::move(lead)));
                for (size_t i = 0; i < factors.size(); ++i) {
                    if (!factors[i].first->depends_on(s)) continue;
                    std::vector<ExprPtr> fs;
                    fs.push_back(constant(-1));
                    fs.push_back(num);
                    fs.push_back(factors[i].second);
                    fs.push_back(d(factors[i].first));
                    for (size_t j = 0; j < factors.size(); ++j)
                        if (j != i) fs.push_back(factors[j].first);
                    terms.push_back(mul(std::move(fs)));
                }
                std::vector<ExprPtr> dfs;
                dfs.reserve(factors.size());
                for (const auto& [b, k] : factors) dfs.push_back(pow(b, add({k, constant(1)})));
                return div(add(std::move(terms)), mul(std::move(dfs)));
            }
            case NodeKind::Sqrt:
                return div(d(e->args[0]), mul({constant(2), sqrt(e->args[0])}));
            case NodeKind::Log10:
                return div(d(e->args[0]), mul({e->args[0], symref(ln10_symbol())}));
        }
        return constant(0);
    }
};

struct Substituter {
    const std::map<const Symbol*, ExprPtr>& map;
    std::unordered_map<const Expr*, ExprPtr> memo;

    bool relevant(const ExprPtr& e) const {
        for (const auto& [s, r] : map)
            if (e->depends_on(s)) return true;
        return false;
    }

    ExprPtr sub(const ExprPtr& e) {
        if (!relevant(e)) return e;
        auto it = memo.find(e.get());
        if (it != memo.end()) return it->second;
        ExprPtr r;
        switch (e->kind) {
            case NodeKind::SymbolRef: {
                auto m = map.find(e->symbol.get());
                r = m == map.end() ? e : m->second;
                break;
            }
            case NodeKind::Sum: {
                std::vector<ExprPtr> a;
                a.reserve(e->args.size());
                for (const auto& x : e->args) a.push_back(sub(x));
                r = add(std::move(a));
                break;
            }
            case NodeKind::Product: {
                std::vector<ExprPtr> a;
                a.reserve(e->args.size());
                for (const auto& x : e->args) a.push_back(sub(x));
                r = mul(std::move(a));
                break;
            }
            case NodeKind::Power:
                r = pow(sub(e->args[0]), sub(e->args[1]));
                break;
            case NodeKind::Div:
                r = div(sub(e->args[0]), sub(e->args[1]));
                break;
            case NodeKind::Sqrt:
                r = sqrt(sub(e->args[0]));
                break;
            case NodeKind::Log10:
                r = log10(sub(e->args[0]));
                break;
            default:
                r = e;
        }
        memo.emplace(e.get(), r);
        return r;
    }
};

} // namespace

ExprPtr differentiate(const ExprPtr& e, const Symbol* s) {
    Differentiator d{s, {}};
    return d.d(e);
}

ExprPtr substitute(const ExprPtr& e, const std::map<const Symbol*, ExprPtr>& map) {
    if (map.empty()) return e;
    Substituter s{map, {}};
    return s.sub(e);
}

namespace {

ExprPtr replace_rec(const ExprPtr& e, const ExprPtr& target, const ExprPtr& repl,
                    std::unordered_map<const Expr*, ExprPtr>& memo) {
    if (e.get() == target.get()) return repl;
    if (e->args.empty()) return e;
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    std::vector<ExprPtr> args;
    args.reserve(e->args.size());
    bool changed = false;
    for (const auto& a : e->args) {
        args.push_back(replace_rec(a, target, repl, memo));
        changed |= args.back().get() != a.get();
    }
    ExprPtr r = e;
    if (changed) {
        switch (e->kind) {
            case NodeKind::Sum: r = add(std::move(args)); break;
            case NodeKind::Product: r = mul(std::move(args)); break;
            case NodeKind::Power: r = pow(args[0], args[1]); break;
            case NodeKind::Div: r = div(args[0], args[1]); break;
            case NodeKind::Sqrt: r = sqrt(args[0]); break;
            case NodeKind::Log10: r = log10(args[0]); break;
            default: break;
        }
    }
    memo.emplace(e.get(), r);
    return r;
}

} // namespace

ExprPtr replace_subtree(const ExprPtr& e, const ExprPtr& target, const ExprPtr& replacement) {
    std::unordered_map<const Expr*, ExprPtr> memo;
    return replace_rec(e, target, replacement, memo);
}

} // namespace structid::sym
