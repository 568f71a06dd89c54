#include "structid/expr.hpp"
#include "structid/parser.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace structid;
using namespace structid::sym;

namespace {

struct Fixture {
    SymbolTable table;
    SymbolPtr c1, xi1, x1, u, theta5, theta6, x10, x, y, s;

    Fixture() {
        c1 = table.add("c1", SymbolKind::AggregatedConstant);
        xi1 = table.add("xi1", SymbolKind::InletConcentration);
        x1 = table.add("x1", SymbolKind::State);
        u = table.add("u", SymbolKind::Input);
        theta5 = table.add("theta5", SymbolKind::Parameter);
        theta6 = table.add("theta6", SymbolKind::Parameter);
        x10 = table.add("x10", SymbolKind::State);
        x = table.add("x", SymbolKind::State);
        y = table.add("y", SymbolKind::State);
        s = table.add("S", SymbolKind::State);
    }

    ExprPtr parse(const std::string& t) const { return parse_expression(t, table); }
};

/// Random expression trees over the fixture symbols, for property tests.
class TreeGen {
public:
    TreeGen(const Fixture& f, uint64_t seed) : f_(f), rng_(seed) {
        leaves_ = {symref(f.x), symref(f.y), symref(f.x1), symref(f.theta5)};
    }

    ExprPtr gen(int depth) {
        if (depth <= 0 || pick(5) == 0) return leaf();
        switch (pick(6)) {
            case 0: return add({gen(depth - 1), gen(depth - 1)});
            case 1: return mul({gen(depth - 1), gen(depth - 1)});
            case 2: return div(gen(depth - 1), nonzero(depth - 1));
            case 3: return pow(gen(depth - 1), static_cast<long>(2 + pick(3)));
            case 4: return sqrt(positive(depth - 1));
            default: return log10(positive(depth - 1));
        }
    }

    Rational rnd_rational() {
        long n = 1 + static_cast<long>(pick(40));
        long d = 1 + static_cast<long>(pick(20));
        Rational q(pick(2) == 0 ? n : -n, d);
        q.canonicalize();
        return q;
    }

private:
    ExprPtr leaf() {
        if (pick(4) == 0) return constant(rnd_rational());
        return leaves_[pick(leaves_.size())];
    }
    ExprPtr nonzero(int depth) {
        // denominators structurally bounded away from zero on positive points
        return add({constant(1 + static_cast<long>(pick(4))), pow(gen(depth), 2)});
    }
    ExprPtr positive(int depth) { return nonzero(depth); }
    size_t pick(size_t n) { return static_cast<size_t>(rng_() % n); }

    const Fixture& f_;
    std::mt19937_64 rng_;
    std::vector<ExprPtr> leaves_;
};

RationalBindings positive_point(const Fixture& f, std::mt19937_64& rng) {
    RationalBindings b;
    for (const auto& sym : f.table.all()) {
        Rational q(1 + static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 30));
        q.canonicalize();
        b[sym.get()] = q;
    }
    b[ln10_symbol().get()] = rational_from_string("2302585092994046/1000000000000000");
    return b;
}

} // namespace

TEST_CASE("parse: grammar round trip of a feed term") {
    Fixture f;
    ExprPtr e = f.parse("c1*(xi1 - x1)*u");
    CHECK(e->kind == NodeKind::Product);
    // c1 * (xi1 - x1) * u with the difference kept as a sum with a negated term
    ExprPtr rebuilt = mul({symref(f.c1), sub(symref(f.xi1), symref(f.x1)), symref(f.u)});
    CHECK(e.get() == rebuilt.get());
    CHECK(parse_expression(to_string(e), f.table).get() == e.get());
}

TEST_CASE("parse: malformed input is position-annotated") {
    Fixture f;
    CHECK_THROWS_AS(f.parse("x1+*2"), SyntaxError);
    try {
        f.parse("x1+*2");
    } catch (const SyntaxError& e) {
        CHECK(e.offset == 3);
    }
    CHECK_THROWS_AS(f.parse("x1 +* 2"), SyntaxError);
    CHECK_THROWS_AS(f.parse("(x1"), SyntaxError);
    CHECK_THROWS_AS(f.parse(""), SyntaxError);
}

TEST_CASE("parse: unknown identifiers are named") {
    Fixture f;
    try {
        f.parse("c1*zz9");
        FAIL("expected UnknownSymbolError");
    } catch (const UnknownSymbolError& e) {
        CHECK(e.identifier == "zz9");
        CHECK(e.offset == 3);
    }
}

TEST_CASE("parse: Monod term becomes a single quotient") {
    Fixture f;
    ExprPtr e = f.parse("theta5*x1*x10/(theta6 + x1)");
    REQUIRE(e->kind == NodeKind::Div);
    CHECK(e->args[0].get() == mul({symref(f.theta5), symref(f.x1), symref(f.x10)}).get());
    CHECK(e->args[1].get() == add({symref(f.theta6), symref(f.x1)}).get());
}

TEST_CASE("simplifier: flattening, like terms, cancellation") {
    Fixture f;
    ExprPtr x = symref(f.x);
    ExprPtr y = symref(f.y);
    CHECK(add({x, x}).get() == mul({constant(2), x}).get());
    CHECK(add({add({x, y}), neg(x)}).get() == y.get());
    CHECK(mul({x, x, x}).get() == pow(x, 3).get());
    CHECK(div(mul({x, y}), x).get() == y.get());
    CHECK(div(pow(x, 3), pow(x, 2)).get() == x.get());
    CHECK(pow(x, 0)->is_constant(1));
    CHECK(sqrt(constant(Rational(9, 4)))->value == Rational(3, 2));
    CHECK(log10(constant(1000))->value == 3);
    CHECK(log10(constant(Rational(1, 100)))->value == -2);
    CHECK_THROWS_AS(div(x, constant(0)), ConstructionError);
    CHECK_THROWS_AS(div(x, sub(y, y)), ConstructionError);
}

TEST_CASE("simplifier: sums and products keep at least two operands") {
    Fixture f;
    ExprPtr x = symref(f.x);
    ExprPtr e = add({x, symref(f.y)});
    CHECK(e->args.size() == 2);
    ExprPtr p = mul({constant(3), x});
    CHECK(p->args.size() == 2);
    CHECK(p->args[0]->is_constant(3));
}

TEST_CASE("differentiate: power rule on c*x^2") {
    Fixture f;
    ExprPtr e = mul({symref(f.c1), pow(symref(f.x), 2)});
    ExprPtr d = differentiate(e, f.x);
    CHECK(d.get() == mul({constant(2), symref(f.c1), symref(f.x)}).get());
}

TEST_CASE("differentiate: feed convection term is linear in its state") {
    // d/dx1 of c1*(xi1 - x1)*u + (x1-free terms) - c2-like decay
    Fixture f;
    ExprPtr rhs = f.parse("c1*(xi1 - x1)*u + theta5*x10 - 3*x1");
    ExprPtr d = differentiate(rhs, f.x1);
    ExprPtr expect = f.parse("-c1*u - 3");
    CHECK(d.get() == expect.get());
}

TEST_CASE("differentiate: negative common logarithm") {
    Fixture f;
    ExprPtr e = neg(log10(symref(f.s)));
    ExprPtr d = differentiate(e, f.s);
    // -1/(S*ln10)
    ExprPtr expect = neg(div(constant(1), mul({symref(f.s), symref(ln10_symbol())})));
    CHECK(d.get() == expect.get());
}

TEST_CASE("differentiate: sqrt chain rule") {
    Fixture f;
    ExprPtr v = add({pow(symref(f.x), 2), constant(4)});
    ExprPtr d = differentiate(sqrt(v), f.x);
    ExprPtr expect = div(symref(f.x), sqrt(v));
    CHECK(d.get() == expect.get());
}

TEST_CASE("differentiate: symbolic constant exponent") {
    Fixture f;
    ExprPtr e = pow(symref(f.s), symref(f.c1)); // S^c1
    ExprPtr d = differentiate(e, f.s);
    ExprPtr expect = mul({symref(f.c1), pow(symref(f.s), sub(symref(f.c1), constant(1)))});
    CHECK(d.get() == expect.get());
    CHECK_THROWS_AS(differentiate(pow(symref(f.x), symref(f.s)), f.s), ConstructionError);
}

TEST_CASE("evaluate: exact rational arithmetic") {
    Fixture f;
    RationalBindings env{{f.x.get(), Rational(1, 2)}, {f.y.get(), Rational(1, 3)}};
    CHECK(evaluate_rational(add({symref(f.x), symref(f.y)}), env) == Rational(5, 6));
    CHECK(evaluate_rational(mul({constant(Rational(1, 3)), constant(3)}), env) == 1);
}

TEST_CASE("evaluate: charge-balance expression vanishes at the worked point") {
    // x12 + (x4 - x15)/17 - x14/44 - x13/60 at (1, 17, 0, 44, 60)
    SymbolTable t;
    auto x12 = t.add("x12", SymbolKind::State);
    auto x4 = t.add("x4", SymbolKind::State);
    auto x15 = t.add("x15", SymbolKind::State);
    auto x14 = t.add("x14", SymbolKind::State);
    auto x13 = t.add("x13", SymbolKind::State);
    ExprPtr phi = parse_expression("x12 + (x4 - x15)/17 - x14/44 - x13/60", t);
    RationalBindings env{{x12.get(), 1},
                         {x4.get(), 17},
                         {x15.get(), 0},
                         {x14.get(), 44},
                         {x13.get(), 60}};
    CHECK(evaluate_rational(phi, env) == 0);
}

TEST_CASE("evaluate: non-perfect sqrt is rejected in exact mode") {
    Fixture f;
    RationalBindings env;
    try {
        evaluate_rational(sqrt(constant(2)), env);
        FAIL("expected NonRationalOperation");
    } catch (const EvalError& e) {
        CHECK(e.error_kind == EvalErrorKind::NonRationalOperation);
    }
    try {
        evaluate_rational(div(constant(1), symref(f.x)), {{f.x.get(), Rational(0)}});
        FAIL("expected DivisionByZero");
    } catch (const EvalError& e) {
        CHECK(e.error_kind == EvalErrorKind::DivisionByZero);
    }
}

TEST_CASE("free symbols") {
    Fixture f;
    CHECK(constant(3)->free_symbols().empty());
    ExprPtr e = add({symref(f.x), symref(f.x)});
    CHECK(e->free_symbols().size() == 1);
    CHECK(e->free_symbols()[0] == f.x.get());

    SymbolTable t;
    auto x12 = t.add("x12", SymbolKind::State);
    auto x4 = t.add("x4", SymbolKind::State);
    auto x15 = t.add("x15", SymbolKind::State);
    auto x14 = t.add("x14", SymbolKind::State);
    auto x13 = t.add("x13", SymbolKind::State);
    auto c4 = t.add("c4", SymbolKind::AggregatedConstant);
    ExprPtr sh = parse_expression(
        "-(x12 + (x4 - x15)/17 - x14/44 - x13/60)/2 + sqrt((x12 + (x4 - x15)/17 - x14/44 - "
        "x13/60)^2 + c4)/2",
        t);
    auto fs = sh->free_symbols();
    CHECK(fs.size() == 6);
    for (const auto& sym : {x12, x4, x15, x14, x13, c4})
        CHECK(sh->depends_on(sym.get()));
}

TEST_CASE("substitute: simultaneous replacement with collection") {
    Fixture f;
    ExprPtr e = add({symref(f.x), symref(f.y)});
    ExprPtr r = substitute(e, {{f.x.get(), mul({constant(2), symref(f.y)})}});
    CHECK(r.get() == mul({constant(3), symref(f.y)}).get());
    CHECK(substitute(e, {{f.x.get(), symref(f.x)}}).get() == e.get());
    // simultaneous, not sequential: swap x and y
    ExprPtr sw = substitute(sub(symref(f.x), symref(f.y)),
                            {{f.x.get(), symref(f.y)}, {f.y.get(), symref(f.x)}});
    CHECK(sw.get() == sub(symref(f.y), symref(f.x)).get());
}

TEST_CASE("property: differentiation is linear") {
    Fixture f;
    for (uint64_t seed = 0; seed < 300; ++seed) {
        TreeGen gen(f, 1000 + seed);
        ExprPtr e1 = gen.gen(3);
        ExprPtr e2 = gen.gen(3);
        ExprPtr a = constant(gen.rnd_rational());
        ExprPtr b = constant(gen.rnd_rational());
        ExprPtr lhs = differentiate(add({mul({a, e1}), mul({b, e2})}), f.x);
        ExprPtr rhs = add({mul({a, differentiate(e1, f.x)}), mul({b, differentiate(e2, f.x)})});
        REQUIRE_MESSAGE(lhs.get() == rhs.get(),
                        "seed " << seed << ": " << to_string(lhs) << " vs " << to_string(rhs));
    }
}

TEST_CASE("property: central differences confirm symbolic derivatives") {
    Fixture f;
    std::mt19937_64 rng(42);
    int checked = 0;
    for (uint64_t seed = 0; checked < 120 && seed < 600; ++seed) {
        TreeGen gen(f, 7000 + seed);
        ExprPtr e = gen.gen(3);
        if (!e->depends_on(f.x.get())) continue;
        RationalBindings rb = positive_point(f, rng);
        DoubleBindings env;
        for (const auto& [symp, q] : rb) env[symp] = to_double(q);
        double x0 = env[f.x.get()];
        double h = 1e-6 * std::fabs(x0);
        double fp, fm, sym_d;
        try {
            sym_d = evaluate_double(differentiate(e, f.x), env);
            env[f.x.get()] = x0 + h;
            fp = evaluate_double(e, env);
            env[f.x.get()] = x0 - h;
            fm = evaluate_double(e, env);
        } catch (const EvalError&) {
            continue; // point outside the expression's domain; draw another tree
        }
        double fd = (fp - fm) / (2 * h);
        if (!std::isfinite(fd) || !std::isfinite(sym_d)) continue;
        double scale = std::max({std::fabs(sym_d), std::fabs(fd), 1e-4});
        REQUIRE_MESSAGE(std::fabs(fd - sym_d) <= 1e-6 * scale,
                        "seed " << seed << " expr " << to_string(e) << " fd " << fd << " sym "
                                << sym_d);
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("property: parse of printed form is the identity") {
    Fixture f;
    for (uint64_t seed = 0; seed < 1000; ++seed) {
        TreeGen gen(f, 31337 + seed);
        ExprPtr e = gen.gen(4);
        std::string text = to_string(e);
        ExprPtr back = parse_expression(text, f.table);
        REQUIRE_MESSAGE(back.get() == e.get(), "seed " << seed << ": " << text << " reparsed as "
                                                       << to_string(back));
    }
}

TEST_CASE("construction is canonical: operand order does not matter") {
    Fixture f;
    ExprPtr x = symref(f.x), y = symref(f.y);
    CHECK(add({x, y}).get() == add({y, x}).get());
    CHECK(mul({x, y, constant(2)}).get() == mul({constant(2), y, x}).get());
}

TEST_CASE("dag_size counts unique nodes") {
    Fixture f;
    ExprPtr x = symref(f.x);
    ExprPtr e = mul({add({x, constant(1)}), add({x, constant(1)})}); // shared subtree
    CHECK(dag_size(e) == 5); // x, 1, x+1, exponent 2, (x+1)^2
    CHECK(dag_size(constant(5)) == 1);
}
