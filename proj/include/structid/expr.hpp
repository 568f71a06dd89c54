#pragma once

#include "structid/rational.hpp"
#include "structid/symbol.hpp"

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace structid::sym {

enum class NodeKind : uint8_t {
    Constant,
    SymbolRef,
    Sum,
    Product,
    Power, // args = {base, exponent}; exponent must not depend on differentiation symbols
    Div,   // args = {numerator, denominator}
    Sqrt,
    Log10,
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable, hash-consed expression node. Structural equality is pointer
/// equality; construction always runs the shallow simplifier, so any two
/// structurally equal trees share one node.
class Expr {
public:
    NodeKind kind;
    Rational value;             // Constant payload
    SymbolPtr symbol;           // SymbolRef payload
    std::vector<ExprPtr> args;  // operands of composite nodes
    uint64_t hash = 0;

    bool is_constant() const { return kind == NodeKind::Constant; }
    bool is_constant(long v) const { return kind == NodeKind::Constant && value == v; }
    bool is_symbol() const { return kind == NodeKind::SymbolRef; }
    bool is_integer_constant() const { return kind == NodeKind::Constant && value.get_den() == 1; }

    /// Free symbols, sorted by name (deterministic iteration order).
    const std::vector<const Symbol*>& free_symbols() const { return *free_; }
    bool depends_on(const Symbol* s) const;

    ~Expr() = default;

private:
    friend class ExprArena;
    Expr() = default;
    const std::vector<const Symbol*>* free_ = nullptr;
};

/// Thrown when a construction rule is violated (e.g. division by constant zero).
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- canonical constructors ---------------------------------------------------

ExprPtr constant(Rational q);
ExprPtr constant(long v);
ExprPtr symref(const SymbolPtr& s);
ExprPtr add(std::vector<ExprPtr> terms);
ExprPtr mul(std::vector<ExprPtr> factors);
ExprPtr pow(ExprPtr base, ExprPtr exponent);
ExprPtr pow(ExprPtr base, long exponent);
ExprPtr div(ExprPtr num, ExprPtr den);
ExprPtr sqrt(ExprPtr arg);
ExprPtr log10(ExprPtr arg);

inline ExprPtr add(std::initializer_list<ExprPtr> ts) { return add(std::vector<ExprPtr>(ts)); }
inline ExprPtr mul(std::initializer_list<ExprPtr> fs) { return mul(std::vector<ExprPtr>(fs)); }
inline ExprPtr neg(const ExprPtr& e) { return mul({constant(-1), e}); }
inline ExprPtr sub(const ExprPtr& a, const ExprPtr& b) { return add({a, neg(b)}); }

/// Deterministic total order on expressions (used for canonical operand order).
int compare(const ExprPtr& a, const ExprPtr& b);

/// Number of distinct nodes reachable from e (DAG size, not tree size).
size_t dag_size(const ExprPtr& e);
size_t dag_size(std::span<const ExprPtr> roots);

/// Parseable infix form; parse(to_string(e)) == e.
std::string to_string(const ExprPtr& e);

// -- calculus -----------------------------------------------------------------

/// Partial derivative, simplified. Total on valid expressions; throws
/// ConstructionError only if a Power exponent depends on s.
ExprPtr differentiate(const ExprPtr& e, const Symbol* s);
inline ExprPtr differentiate(const ExprPtr& e, const SymbolPtr& s) {
    return differentiate(e, s.get());
}

/// Simultaneous substitution followed by simplification.
ExprPtr substitute(const ExprPtr& e, const std::map<const Symbol*, ExprPtr>& map);

/// Replaces every occurrence of a subexpression (by structural identity).
ExprPtr replace_subtree(const ExprPtr& e, const ExprPtr& target, const ExprPtr& replacement);

// -- evaluation ---------------------------------------------------------------

enum class EvalErrorKind { DivisionByZero, NonRationalOperation, DomainError, UnboundSymbol };

struct EvalError : std::runtime_error {
    EvalErrorKind error_kind;
    EvalError(EvalErrorKind k, const std::string& msg) : std::runtime_error(msg), error_kind(k) {}
};

using RationalBindings = std::unordered_map<const Symbol*, Rational>;

/// Exact rational evaluation. Sqrt/Log10/Power of non-perfect arguments raise
/// NonRationalOperation; callers that need such values must use float mode.
/// A shared instance memoizes per-node values, so evaluating many expressions
/// over one binding set costs one visit per distinct DAG node.
class RationalEvaluator {
public:
    explicit RationalEvaluator(const RationalBindings& env) : env_(env) {}
    Rational eval(const ExprPtr& e);

private:
    const RationalBindings& env_;
    std::unordered_map<const Expr*, Rational> memo_;
};

Rational evaluate_rational(const ExprPtr& e, const RationalBindings& env);

using DoubleBindings = std::unordered_map<const Symbol*, double>;
double evaluate_double(const ExprPtr& e, const DoubleBindings& env);

/// Flat instruction tape for fast repeated float evaluation (the simulator's
/// right-hand sides). Slots follow the symbol order given at compile time.
class CompiledEval {
public:
    CompiledEval(std::span<const ExprPtr> roots, std::span<const SymbolPtr> slots);
    size_t num_roots() const { return roots_.size(); }
    /// values.size() == slot count; out.size() == num_roots().
    void eval(std::span<const double> values, std::span<double> out) const;

private:
    enum class Op : uint8_t { Const, Slot, Add, Mul, Div, Neg, PowI, PowReg, Sqrt, Log10 };
    struct Ins {
        Op op;
        int32_t a = -1, b = -1;
        double k = 0.0;
        long ipow = 0;
    };
    std::vector<Ins> code_;
    std::vector<int32_t> roots_;
    size_t nslots_;
};

} // namespace structid::sym
