#include "structid/expr.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <sstream>
#include <unordered_set>

namespace structid::sym {

const char* kind_name(SymbolKind k) {
    switch (k) {
        case SymbolKind::State: return "state";
        case SymbolKind::Parameter: return "parameter";
        case SymbolKind::InletConcentration: return "inlet";
        case SymbolKind::AggregatedConstant: return "constant";
        case SymbolKind::Input: return "input";
        case SymbolKind::Stoichiometric: return "stoichiometric";
    }
    return "?";
}

const SymbolPtr& ln10_symbol() {
    static SymbolPtr s = std::make_shared<const Symbol>("ln10", SymbolKind::AggregatedConstant, -1);
    return s;
}

SymbolPtr SymbolTable::add(const std::string& name, SymbolKind kind, int index) {
    if (by_name_.count(name)) throw std::invalid_argument("duplicate symbol name: " + name);
    if (name == "ln10") throw std::invalid_argument("'ln10' is reserved");
    auto s = std::make_shared<const Symbol>(name, kind, index);
    order_.push_back(s);
    by_name_.emplace(name, s);
    return s;
}

SymbolPtr SymbolTable::add(const std::string& name, SymbolKind kind) {
    int idx = 0;
    for (const auto& s : order_)
        if (s->kind == kind) ++idx;
    return add(name, kind, idx);
}

const Symbol* SymbolTable::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second.get();
}

SymbolPtr SymbolTable::find_ptr(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
}

namespace detail {
uint64_t mix(uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}
} // namespace detail
using detail::mix;

using FreeSet = std::vector<const Symbol*>;

/// Process-wide intern table. Nodes are shared while referenced; buckets hold
/// weak references so memory is reclaimed when expressions go out of scope.
class ExprArena {
public:
    static ExprArena& instance() {
        static ExprArena* a = new ExprArena; // leaked deliberately: outlive statics
        return *a;
    }

    ExprPtr intern(NodeKind kind, Rational value, SymbolPtr symbol, std::vector<ExprPtr> args) {
        uint64_t h = mix(0x9ddfea08eb382d69ULL, static_cast<uint64_t>(kind));
        if (kind == NodeKind::Constant) h = mix(h, rational_hash(value));
        if (kind == NodeKind::SymbolRef) {
            // hash by (name, kind, index) so canonical operand order is
            // stable across runs and across structurally equal models
            h = mix(h, std::hash<std::string>{}(symbol->name));
            h = mix(h, static_cast<uint64_t>(symbol->kind));
            h = mix(h, static_cast<uint64_t>(symbol->index + 1));
        }
        for (const auto& a : args) h = mix(h, a->hash);

        std::lock_guard<std::mutex> lock(mu_);
        auto& bucket = table_[h];
        for (auto it = bucket.begin(); it != bucket.end();) {
            if (ExprPtr e = it->lock()) {
                if (equal(*e, kind, value, symbol, args)) return e;
                ++it;
            } else {
                it = bucket.erase(it);
            }
        }
        auto node = std::shared_ptr<Expr>(new Expr());
        node->kind = kind;
        node->value = std::move(value);
        node->symbol = std::move(symbol);
        node->args = std::move(args);
        node->hash = h;
        node->free_ = intern_free(compute_free(*node));
        bucket.emplace_back(node);
        return node;
    }

private:
    static bool equal(const Expr& e, NodeKind kind, const Rational& value, const SymbolPtr& symbol,
                      const std::vector<ExprPtr>& args) {
        if (e.kind != kind || e.args.size() != args.size()) return false;
        if (kind == NodeKind::Constant && cmp(e.value, value) != 0) return false;
        if (kind == NodeKind::SymbolRef && e.symbol.get() != symbol.get()) return false;
        for (size_t i = 0; i < args.size(); ++i)
            if (e.args[i].get() != args[i].get()) return false;
        return true;
    }

    static FreeSet compute_free(const Expr& e) {
        FreeSet out;
        if (e.kind == NodeKind::SymbolRef) {
            out.push_back(e.symbol.get());
            return out;
        }
        for (const auto& a : e.args) {
            const FreeSet& f = a->free_symbols();
            FreeSet merged;
            merged.reserve(out.size() + f.size());
            std::set_union(out.begin(), out.end(), f.begin(), f.end(), std::back_inserter(merged));
            out = std::move(merged);
        }
        return out;
    }

    const FreeSet* intern_free(FreeSet s) {
        uint64_t h = 0x2545f4914f6cdd1dULL;
        for (auto* p : s) h = mix(h, std::hash<const void*>{}(p));
        auto& bucket = free_table_[h];
        for (const auto& f : bucket)
            if (*f == s) return f.get();
        bucket.push_back(std::make_unique<FreeSet>(std::move(s)));
        return bucket.back().get();
    }

    std::mutex mu_;
    std::unordered_map<uint64_t, std::vector<std::weak_ptr<const Expr>>> table_;
    std::unordered_map<uint64_t, std::vector<std::unique_ptr<FreeSet>>> free_table_;
};

ExprPtr intern(NodeKind kind, Rational value, SymbolPtr symbol, std::vector<ExprPtr> args) {
    return ExprArena::instance().intern(kind, std::move(value), std::move(symbol), std::move(args));
}

int kind_rank(NodeKind k) { return static_cast<int>(k); }

ExprPtr make_div_node(ExprPtr num, ExprPtr den) {
    return intern(NodeKind::Div, Rational(), nullptr, {std::move(num), std::move(den)});
}

/// Splits a canonical term into (rational coefficient, non-constant core).
/// Pure constants yield a null core. Canonical sums are content-free, so the
/// coefficient of a term sits either on a product head or inside a quotient's
/// numerator.
std::pair<Rational, ExprPtr> coeff_core(const ExprPtr& e) {
    if (e->kind == NodeKind::Constant) return {e->value, nullptr};
    if (e->kind == NodeKind::Product && e->args[0]->kind == NodeKind::Constant) {
        Rational c = e->args[0]->value;
        if (e->args.size() == 2) return {c, e->args[1]};
        std::vector<ExprPtr> rest(e->args.begin() + 1, e->args.end());
        return {c, intern(NodeKind::Product, Rational(), nullptr, std::move(rest))};
    }
    if (e->kind == NodeKind::Div) {
        auto [c, core] = coeff_core(e->args[0]);
        if (c == 1) return {Rational(1), e};
        return {c, make_div_node(core ? core : constant(1), e->args[1])};
    }
    return {Rational(1), e};
}

/// Splits a canonical factor into (base, exponent).
std::pair<ExprPtr, ExprPtr> base_expo(const ExprPtr& e) {
    if (e->kind == NodeKind::Power) return {e->args[0], e->args[1]};
    return {e, constant(1)};
}

bool Expr::depends_on(const Symbol* s) const {
    const auto& f = free_symbols();
    return std::binary_search(f.begin(), f.end(), s);
}

int compare(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
    switch (a->kind) {
        case NodeKind::Constant:
            return cmp(a->value, b->value);
        case NodeKind::SymbolRef: {
            int c = a->symbol->name.compare(b->symbol->name);
            if (c) return c < 0 ? -1 : 1;
            if (a->symbol->kind != b->symbol->kind)
                return a->symbol->kind < b->symbol->kind ? -1 : 1;
            if (a->symbol->index != b->symbol->index)
                return a->symbol->index < b->symbol->index ? -1 : 1;
            return 0;
        }
        default: {
            if (a->args.size() != b->args.size())
                return a->args.size() < b->args.size() ? -1 : 1;
            if (a->hash != b->hash) return a->hash < b->hash ? -1 : 1;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (int c = compare(a->args[i], b->args[i])) return c;
            return 0;
        }
    }
}

ExprPtr constant(Rational q) {
    q.canonicalize();
    return intern(NodeKind::Constant, std::move(q), nullptr, {});
}

ExprPtr constant(long v) { return constant(Rational(v)); }

ExprPtr symref(const SymbolPtr& s) {
    if (!s) throw std::invalid_argument("null symbol");
    return intern(NodeKind::SymbolRef, Rational(), s, {});
}

namespace {

/// coefficient * core without re-running full product canonicalization; core
/// is an already-canonical expression.
ExprPtr scaled(const Rational& c, const ExprPtr& core) {
    if (c == 0) return constant(0);
    if (c == 1) return core;
    if (core->kind == NodeKind::Constant) return constant(Rational(c * core->value));
    if (core->kind == NodeKind::Product) {
        std::vector<ExprPtr> args;
        args.reserve(core->args.size() + 1);
        if (core->args[0]->kind == NodeKind::Constant) {
            Rational merged = c * core->args[0]->value;
            if (merged == 0) return constant(0);
            if (merged != 1) args.push_back(constant(merged));
            args.insert(args.end(), core->args.begin() + 1, core->args.end());
            if (args.size() == 1) return args[0];
        } else {
            args.push_back(constant(c));
            args.insert(args.end(), core->args.begin(), core->args.end());
        }
        return intern(NodeKind::Product, Rational(), nullptr, std::move(args));
    }
    if (core->kind == NodeKind::Div) {
        // keep constants in the numerator: c * (n/d) = (c*n)/d
        return intern(NodeKind::Div, Rational(), nullptr,
                      {scaled(c, core->args[0]), core->args[1]});
    }
    return intern(NodeKind::Product, Rational(), nullptr, {constant(c), core});
}

} // namespace

ExprPtr add(std::vector<ExprPtr> terms) {
    std::vector<ExprPtr> flat;
    flat.reserve(terms.size());
    for (auto& t : terms) {
        if (!t) throw std::invalid_argument("null operand in sum");
        if (t->kind == NodeKind::Sum)
            flat.insert(flat.end(), t->args.begin(), t->args.end());
        else
            flat.push_back(std::move(t));
    }

    Rational cst(0);
    std::vector<std::pair<ExprPtr, Rational>> groups;
    std::unordered_map<const Expr*, size_t> index;
    auto accumulate = [&](auto&& self, const ExprPtr& t, const Rational& mult) -> void {
        auto [c, core] = coeff_core(t);
        c *= mult;
        if (!core) {
            cst += c;
            return;
        }
        if (core->kind == NodeKind::Sum) {
            // a scaled sum distributes into the enclosing sum
            for (const auto& sub : core->args) self(self, sub, c);
            return;
        }
        auto it = index.find(core.get());
        if (it == index.end()) {
            index.emplace(core.get(), groups.size());
            groups.emplace_back(core, c);
        } else {
            groups[it->second].second += c;
        }
    };
    for (const auto& t : flat) accumulate(accumulate, t, Rational(1));

    std::erase_if(groups, [](const auto& g) { return g.second == 0; });
    if (groups.empty()) return constant(cst);
    if (cst == 0 && groups.size() == 1) return scaled(groups[0].second, groups[0].first);

    // extract the rational content so every sum is content-free: the scalar
    // multiple of a sum then lives uniquely on the enclosing product
    mpz_class gnum = cst.get_num();
    if (sgn(gnum) < 0) gnum = -gnum;
    mpz_class glcm = cst == 0 ? mpz_class(1) : cst.get_den();
    for (const auto& [core, c] : groups) {
        mpz_class n = c.get_num();
        if (sgn(n) < 0) n = -n;
        mpz_gcd(gnum.get_mpz_t(), gnum.get_mpz_t(), n.get_mpz_t());
        mpz_lcm(glcm.get_mpz_t(), glcm.get_mpz_t(), c.get_den().get_mpz_t());
    }
    Rational content(gnum, glcm);
    content.canonicalize();
    // sign convention: the constant term, else the coefficient of the
    // compare-minimal core, comes out positive
    const Rational* lead = &cst;
    if (cst == 0) {
        size_t min_i = 0;
        for (size_t i = 1; i < groups.size(); ++i)
            if (compare(groups[i].first, groups[min_i].first) < 0) min_i = i;
        lead = &groups[min_i].second;
    }
    if (sgn(*lead) < 0) content = -content;

    std::vector<ExprPtr> out;
    out.reserve(groups.size() + 1);
    for (auto& [core, c] : groups) out.push_back(scaled(Rational(c / content), core));
    std::sort(out.begin(), out.end(), [](const ExprPtr& x, const ExprPtr& y) {
        return compare(x, y) < 0;
    });
    if (cst != 0) out.insert(out.begin(), constant(Rational(cst / content)));
    ExprPtr sum = intern(NodeKind::Sum, Rational(), nullptr, std::move(out));
    return scaled(content, sum);
}

ExprPtr mul(std::vector<ExprPtr> factors) {
    std::vector<ExprPtr> flat;
    flat.reserve(factors.size());
    for (auto& f : factors) {
        if (!f) throw std::invalid_argument("null operand in product");
        if (f->kind == NodeKind::Product)
            flat.insert(flat.end(), f->args.begin(), f->args.end());
        else
            flat.push_back(std::move(f));
    }

    Rational coeff(1);
    std::vector<ExprPtr> nums, dens;
    for (const auto& f : flat) {
        if (f->kind == NodeKind::Constant) {
            coeff *= f->value;
        } else if (f->kind == NodeKind::Div) {
            nums.push_back(f->args[0]);
            dens.push_back(f->args[1]);
        } else {
            nums.push_back(f);
        }
    }
    if (coeff == 0) return constant(0);
    if (!dens.empty()) {
        nums.insert(nums.begin(), constant(coeff));
        return div(mul(std::move(nums)), mul(std::move(dens)));
    }

    // group identical bases, summing exponents
    std::vector<std::pair<ExprPtr, std::vector<ExprPtr>>> groups;
    std::unordered_map<const Expr*, size_t> index;
    for (const auto& f : nums) {
        auto [base, expo] = base_expo(f);
        auto it = index.find(base.get());
        if (it == index.end()) {
            index.emplace(base.get(), groups.size());
            groups.push_back({base, {expo}});
        } else {
            groups[it->second].second.push_back(expo);
        }
    }

    std::vector<ExprPtr> out;
    bool saw_div = false;
    for (auto& [base, expos] : groups) {
        ExprPtr e = expos.size() == 1 ? expos[0] : add(std::move(expos));
        ExprPtr p = pow(base, e);
        if (p->kind == NodeKind::Constant) {
            coeff *= p->value;
        } else if (p->kind == NodeKind::Div) {
            saw_div = true;
            out.push_back(p);
        } else if (p->kind == NodeKind::Product) {
            // pow distributed over a product; merge again below via recursion
            saw_div = true;
            out.push_back(p);
        } else {
            out.push_back(p);
        }
    }
    if (coeff == 0) return constant(0);
    if (saw_div) {
        out.insert(out.begin(), constant(coeff));
        return mul(std::move(out));
    }

    std::sort(out.begin(), out.end(), [](const ExprPtr& x, const ExprPtr& y) {
        return compare(x, y) < 0;
    });
    if (out.empty()) return constant(coeff);
    if (coeff == 1) {
        if (out.size() == 1) return out[0];
        return intern(NodeKind::Product, Rational(), nullptr, std::move(out));
    }
    out.insert(out.begin(), constant(coeff));
    return intern(NodeKind::Product, Rational(), nullptr, std::move(out));
}

ExprPtr pow(ExprPtr base, long exponent) { return pow(std::move(base), constant(exponent)); }

ExprPtr pow(ExprPtr base, ExprPtr exponent) {
    if (!base || !exponent) throw std::invalid_argument("null operand in power");
    if (exponent->kind == NodeKind::Constant) {
        const Rational& e = exponent->value;
        if (e == 0) return constant(1);
        if (e == 1) return base;
        if (base->kind == NodeKind::Constant) {
            if (e.get_den() == 1 && mpz_fits_slong_p(e.get_num_mpz_t())) {
                long n = e.get_num().get_si();
                if (base->value == 0 && n < 0)
                    throw ConstructionError("zero raised to a negative power");
                return constant(rational_pow(base->value, n));
            }
            if (base->value == 1) return constant(1);
            return intern(NodeKind::Power, Rational(), nullptr, {base, exponent});
        }
        if (e.get_den() == 1 && mpz_fits_slong_p(e.get_num_mpz_t())) {
            long n = e.get_num().get_si();
            if (n < 0) return div(constant(1), pow(base, -n));
            if (base->kind == NodeKind::Power)
                return pow(base->args[0], mul({base->args[1], exponent}));
            if (base->kind == NodeKind::Product) {
                std::vector<ExprPtr> fs;
                fs.reserve(base->args.size());
                for (const auto& f : base->args) fs.push_back(pow(f, n));
                return mul(std::move(fs));
            }
            if (base->kind == NodeKind::Div)
                return div(pow(base->args[0], n), pow(base->args[1], n));
            if (base->kind == NodeKind::Sqrt) {
                // sqrt(a)^(2k) = a^k, sqrt(a)^(2k+1) = a^k * sqrt(a); valid on
                // the nonnegative domain where sqrt is defined
                long k = n / 2;
                ExprPtr p = pow(base->args[0], k);
                if (n % 2 == 0) return p;
                return mul({p, base});
            }
        }
        return intern(NodeKind::Power, Rational(), nullptr, {base, exponent});
    }
    if (base->is_constant(1)) return constant(1);
    return intern(NodeKind::Power, Rational(), nullptr, {std::move(base), std::move(exponent)});
}

namespace {

struct FactorDecomp {
    Rational coeff{1};
    std::vector<std::pair<ExprPtr, ExprPtr>> factors; // (base, exponent)
};

FactorDecomp decompose(const ExprPtr& e) {
    FactorDecomp d;
    auto push = [&d](const ExprPtr& f) {
        if (f->kind == NodeKind::Constant) {
            d.coeff *= f->value;
        } else {
            auto [b, x] = base_expo(f);
            d.factors.emplace_back(b, x);
        }
    };
    if (e->kind == NodeKind::Product)
        for (const auto& f : e->args) push(f);
    else
        push(e);
    return d;
}

ExprPtr recompose(const Rational& coeff, const std::vector<std::pair<ExprPtr, ExprPtr>>& fs) {
    std::vector<ExprPtr> out;
    out.reserve(fs.size() + 1);
    out.push_back(constant(coeff));
    for (const auto& [b, x] : fs) out.push_back(pow(b, x));
    return mul(std::move(out));
}

} // namespace

ExprPtr div(ExprPtr num, ExprPtr den) {
    if (!num || !den) throw std::invalid_argument("null operand in division");
    if (den->kind == NodeKind::Constant) {
        if (den->value == 0) throw ConstructionError("division by constant zero");
        return mul({constant(Rational(1) / den->value), std::move(num)});
    }
    if (num->kind == NodeKind::Constant && num->value == 0) return constant(0);
    if (num.get() == den.get()) return constant(1);
    if (num->kind == NodeKind::Div) return div(num->args[0], mul({num->args[1], den}));
    if (den->kind == NodeKind::Div) return div(mul({std::move(num), den->args[1]}), den->args[0]);

    FactorDecomp n = decompose(num);
    FactorDecomp d = decompose(den);

    // cancel identical factors shared by numerator and denominator
    for (auto& [db, dx] : d.factors) {
        for (auto& [nb, nx] : n.factors) {
            if (nb.get() != db.get() || !nb) continue;
            if (nx->is_integer_constant() && dx->is_integer_constant()) {
                Rational m = std::min(nx->value, dx->value);
                if (m > 0) {
                    ExprPtr nx2 = constant(nx->value - m);
                    ExprPtr dx2 = constant(dx->value - m);
                    nx = nx2;
                    dx = dx2;
                }
            } else if (nx.get() == dx.get()) {
                nx = constant(0);
                dx = constant(0);
            }
            break;
        }
    }
    auto strip = [](FactorDecomp& f) {
        std::erase_if(f.factors, [](const auto& p) { return p.second->is_constant(0); });
    };
    strip(n);
    strip(d);

    if (d.coeff == 0) throw ConstructionError("division by constant zero");
    Rational coeff = n.coeff / d.coeff;
    ExprPtr num2 = recompose(coeff, n.factors);
    ExprPtr den2 = recompose(Rational(1), d.factors);

    if (den2->kind == NodeKind::Constant) {
        if (den2->value == 0) throw ConstructionError("division by constant zero");
        return mul({constant(Rational(1) / den2->value), num2});
    }
    if (num2->kind == NodeKind::Constant && num2->value == 0) return constant(0);
    if (num2.get() == den2.get()) return constant(1);
    if (num2->kind == NodeKind::Div || den2->kind == NodeKind::Div) return div(num2, den2);
    return intern(NodeKind::Div, Rational(), nullptr, {num2, den2});
}

ExprPtr sqrt(ExprPtr arg) {
    if (!arg) throw std::invalid_argument("null operand in sqrt");
    if (arg->kind == NodeKind::Constant) {
        if (auto r = exact_sqrt(arg->value)) return constant(*r);
    }
    return intern(NodeKind::Sqrt, Rational(), nullptr, {std::move(arg)});
}

ExprPtr log10(ExprPtr arg) {
    if (!arg) throw std::invalid_argument("null operand in log10");
    if (arg->kind == NodeKind::Constant) {
        if (auto k = exact_log10(arg->value)) return constant(*k);
    }
    return intern(NodeKind::Log10, Rational(), nullptr, {std::move(arg)});
}

size_t dag_size(std::span<const ExprPtr> roots) {
    std::unordered_set<const Expr*> seen;
    std::vector<const Expr*> stack;
    for (const auto& r : roots)
        if (r && seen.insert(r.get()).second) stack.push_back(r.get());
    while (!stack.empty()) {
        const Expr* e = stack.back();
        stack.pop_back();
        for (const auto& a : e->args)
            if (seen.insert(a.get()).second) stack.push_back(a.get());
    }
    return seen.size();
}

size_t dag_size(const ExprPtr& e) {
    ExprPtr roots[1] = {e};
    return dag_size(std::span<const ExprPtr>(roots, 1));
}

// -- printing -----------------------------------------------------------------

namespace {

// precedence: sum 0, product/div 1, power 2, atom 3
int prec_of(const ExprPtr& e) {
    switch (e->kind) {
        case NodeKind::Sum: return 0;
        case NodeKind::Product:
        case NodeKind::Div: return 1;
        case NodeKind::Power: return 2;
        case NodeKind::Constant:
            return (sgn(e->value) < 0 || e->value.get_den() != 1) ? 0 : 3;
        default: return 3;
    }
}

void print(std::ostream& os, const ExprPtr& e);

void print_operand(std::ostream& os, const ExprPtr& e, int min_prec) {
    if (prec_of(e) < min_prec) {
        os << '(';
        print(os, e);
        os << ')';
    } else {
        print(os, e);
    }
}

/// Splits e into (negated?, magnitude) for sum rendering.
std::pair<bool, ExprPtr> split_sign(const ExprPtr& e) {
    if (e->kind == NodeKind::Constant && sgn(e->value) < 0) return {true, constant(-e->value)};
    if (e->kind == NodeKind::Product && e->args[0]->kind == NodeKind::Constant &&
        sgn(e->args[0]->value) < 0) {
        std::vector<ExprPtr> args = e->args;
        args[0] = constant(-args[0]->value);
        if (args[0]->is_constant(1)) args.erase(args.begin());
        if (args.size() == 1) return {true, args[0]};
        return {true, intern(NodeKind::Product, Rational(), nullptr, std::move(args))};
    }
    if (e->kind == NodeKind::Div) {
        auto [neg, nnum] = split_sign(e->args[0]);
        if (neg) return {true, intern(NodeKind::Div, Rational(), nullptr, {nnum, e->args[1]})};
    }
    return {false, e};
}

void print(std::ostream& os, const ExprPtr& e) {
    switch (e->kind) {
        case NodeKind::Constant:
            os << rational_to_string(e->value);
            return;
        case NodeKind::SymbolRef:
            os << e->symbol->name;
            return;
        case NodeKind::Sum:
            for (size_t i = 0; i < e->args.size(); ++i) {
                auto [neg, mag] = split_sign(e->args[i]);
                if (i == 0) {
                    if (neg) os << '-';
                } else {
                    os << (neg ? " - " : " + ");
                }
                print_operand(os, mag, 1);
            }
            return;
        case NodeKind::Product: {
            size_t start = 0;
            if (e->args[0]->kind == NodeKind::Constant) {
                const Rational& c = e->args[0]->value;
                start = 1;
                if (c == -1) {
                    os << '-';
                } else {
                    bool paren = sgn(c) < 0;
                    if (paren) os << '(';
                    os << rational_to_string(c);
                    if (paren) os << ')';
                    os << '*';
                }
            }
            for (size_t i = start; i < e->args.size(); ++i) {
                if (i > start) os << '*';
                print_operand(os, e->args[i], 2);
            }
            return;
        }
        case NodeKind::Div:
            print_operand(os, e->args[0], 1);
            os << '/';
            // a/(b*c): denominator must bind as a unit
            print_operand(os, e->args[1], 2);
            return;
        case NodeKind::Power: {
            print_operand(os, e->args[0], 3);
            os << '^';
            const auto& x = e->args[1];
            bool plain = x->kind == NodeKind::SymbolRef ||
                         (x->kind == NodeKind::Constant && x->value.get_den() == 1 &&
                          sgn(x->value) >= 0);
            if (plain) {
                print(os, x);
            } else {
                os << '(';
                print(os, x);
                os << ')';
            }
            return;
        }
        case NodeKind::Sqrt:
            os << "sqrt(";
            print(os, e->args[0]);
            os << ')';
            return;
        case NodeKind::Log10:
            os << "log10(";
            print(os, e->args[0]);
            os << ')';
            return;
    }
}

} // namespace

std::string to_string(const ExprPtr& e) {
    std::ostringstream os;
    print(os, e);
    return os.str();
}

} // namespace structid::sym
