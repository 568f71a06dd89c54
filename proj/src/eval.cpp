#include "structid/expr.hpp"

#include <cmath>
#include <unordered_map>

namespace structid::sym {

Rational RationalEvaluator::eval(const ExprPtr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Rational r;
    switch (e->kind) {
        case NodeKind::Constant:
            r = e->value;
            break;
        case NodeKind::SymbolRef: {
            auto b = env_.find(e->symbol.get());
            if (b == env_.end())
                throw EvalError(EvalErrorKind::UnboundSymbol,
                                "unbound symbol: " + e->symbol->name);
            r = b->second;
            break;
        }
        case NodeKind::Sum: {
            r = 0;
            for (const auto& a : e->args) r += eval(a);
            break;
        }
        case NodeKind::Product: {
            r = 1;
            for (const auto& a : e->args) r *= eval(a);
            break;
        }
        case NodeKind::Power: {
            Rational x = eval(e->args[1]);
            if (x.get_den() != 1 || !mpz_fits_slong_p(x.get_num_mpz_t()))
                throw EvalError(EvalErrorKind::NonRationalOperation,
                                "non-integer exponent in exact evaluation: " +
                                    rational_to_string(x));
            long n = x.get_num().get_si();
            if (std::abs(n) > 4096)
                throw EvalError(EvalErrorKind::NonRationalOperation, "exponent too large");
            Rational b = eval(e->args[0]);
            if (b == 0 && n < 0)
                throw EvalError(EvalErrorKind::DivisionByZero, "0 raised to a negative power");
            r = rational_pow(b, n);
            break;
        }
        case NodeKind::Div: {
            Rational den = eval(e->args[1]);
            if (den == 0) throw EvalError(EvalErrorKind::DivisionByZero, "division by zero");
            r = eval(e->args[0]) / den;
            break;
        }
        case NodeKind::Sqrt: {
            Rational a = eval(e->args[0]);
            if (sgn(a) < 0)
                throw EvalError(EvalErrorKind::DomainError, "sqrt of a negative value");
            auto s = exact_sqrt(a);
            if (!s)
                throw EvalError(EvalErrorKind::NonRationalOperation,
                                "sqrt of a non-perfect-square rational");
            r = *s;
            break;
        }
        case NodeKind::Log10: {
            Rational a = eval(e->args[0]);
            if (sgn(a) <= 0)
                throw EvalError(EvalErrorKind::DomainError, "log10 of a non-positive value");
            auto k = exact_log10(a);
            if (!k)
                throw EvalError(EvalErrorKind::NonRationalOperation,
                                "log10 of a non-power-of-ten rational");
            r = Rational(*k);
            break;
        }
    }
    memo_.emplace(e.get(), r);
    return r;
}

Rational evaluate_rational(const ExprPtr& e, const RationalBindings& env) {
    RationalEvaluator ev(env);
    return ev.eval(e);
}

namespace {

double eval_d(const ExprPtr& e, const DoubleBindings& env,
              std::unordered_map<const Expr*, double>& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    double r = 0;
    switch (e->kind) {
        case NodeKind::Constant:
            r = to_double(e->value);
            break;
        case NodeKind::SymbolRef: {
            if (e->symbol.get() == ln10_symbol().get()) {
                r = std::log(10.0);
                break;
            }
            auto b = env.find(e->symbol.get());
            if (b == env.end())
                throw EvalError(EvalErrorKind::UnboundSymbol,
                                "unbound symbol: " + e->symbol->name);
            r = b->second;
            break;
        }
        case NodeKind::Sum:
            for (const auto& a : e->args) r += eval_d(a, env, memo);
            break;
        case NodeKind::Product:
            r = 1;
            for (const auto& a : e->args) r *= eval_d(a, env, memo);
            break;
        case NodeKind::Power:
            r = std::pow(eval_d(e->args[0], env, memo), eval_d(e->args[1], env, memo));
            break;
        case NodeKind::Div: {
            double den = eval_d(e->args[1], env, memo);
            if (den == 0.0) throw EvalError(EvalErrorKind::DivisionByZero, "division by zero");
            r = eval_d(e->args[0], env, memo) / den;
            break;
        }
        case NodeKind::Sqrt: {
            double a = eval_d(e->args[0], env, memo);
            if (a < 0) throw EvalError(EvalErrorKind::DomainError, "sqrt of a negative value");
            r = std::sqrt(a);
            break;
        }
        case NodeKind::Log10: {
            double a = eval_d(e->args[0], env, memo);
            if (a <= 0)
                throw EvalError(EvalErrorKind::DomainError, "log10 of a non-positive value");
            r = std::log10(a);
            break;
        }
    }
    memo.emplace(e.get(), r);
    return r;
}

} // namespace

double evaluate_double(const ExprPtr& e, const DoubleBindings& env) {
    std::unordered_map<const Expr*, double> memo;
    return eval_d(e, env, memo);
}

CompiledEval::CompiledEval(std::span<const ExprPtr> roots, std::span<const SymbolPtr> slots) {
    nslots_ = slots.size();
    std::unordered_map<const Symbol*, int32_t> slot_of;
    for (size_t i = 0; i < slots.size(); ++i) slot_of[slots[i].get()] = static_cast<int32_t>(i);

    std::unordered_map<const Expr*, int32_t> reg;
    auto compile = [&](const ExprPtr& root, auto&& self) -> int32_t {
        auto it = reg.find(root.get());
        if (it != reg.end()) return it->second;
        Ins ins;
        switch (root->kind) {
            case NodeKind::Constant:
                ins.op = Op::Const;
                ins.k = to_double(root->value);
                break;
            case NodeKind::SymbolRef: {
                if (root->symbol.get() == ln10_symbol().get()) {
                    ins.op = Op::Const;
                    ins.k = std::log(10.0);
                    break;
                }
                auto s = slot_of.find(root->symbol.get());
                if (s == slot_of.end())
                    throw EvalError(EvalErrorKind::UnboundSymbol,
                                    "symbol has no slot: " + root->symbol->name);
                ins.op = Op::Slot;
                ins.a = s->second;
                break;
            }
            case NodeKind::Sum: {
                int32_t acc = self(root->args[0], self);
                for (size_t i = 1; i < root->args.size(); ++i) {
                    Ins step{Op::Add, acc, self(root->args[i], self)};
                    code_.push_back(step);
                    acc = static_cast<int32_t>(code_.size()) - 1;
                }
                reg[root.get()] = acc;
                return acc;
            }
            case NodeKind::Product: {
                int32_t acc = self(root->args[0], self);
                for (size_t i = 1; i < root->args.size(); ++i) {
                    Ins step{Op::Mul, acc, self(root->args[i], self)};
                    code_.push_back(step);
                    acc = static_cast<int32_t>(code_.size()) - 1;
                }
                reg[root.get()] = acc;
                return acc;
            }
            case NodeKind::Power: {
                if (root->args[1]->is_integer_constant() &&
                    mpz_fits_slong_p(root->args[1]->value.get_num_mpz_t())) {
                    ins.op = Op::PowI;
                    ins.a = self(root->args[0], self);
                    ins.ipow = root->args[1]->value.get_num().get_si();
                } else {
                    ins.op = Op::PowReg;
                    ins.a = self(root->args[0], self);
                    ins.b = self(root->args[1], self);
                }
                break;
            }
            case NodeKind::Div:
                ins.op = Op::Div;
                ins.a = self(root->args[0], self);
                ins.b = self(root->args[1], self);
                break;
            case NodeKind::Sqrt:
                ins.op = Op::Sqrt;
                ins.a = self(root->args[0], self);
                break;
            case NodeKind::Log10:
                ins.op = Op::Log10;
                ins.a = self(root->args[0], self);
                break;
        }
        code_.push_back(ins);
        int32_t idx = static_cast<int32_t>(code_.size()) - 1;
        reg[root.get()] = idx;
        return idx;
    };
    for (const auto& r : roots) roots_.push_back(compile(r, compile));
}

void CompiledEval::eval(std::span<const double> values, std::span<double> out) const {
    thread_local std::vector<double> scratch;
    scratch.resize(code_.size());
    for (size_t i = 0; i < code_.size(); ++i) {
        const Ins& ins = code_[i];
        double r = 0;
        switch (ins.op) {
            case Op::Const: r = ins.k; break;
            case Op::Slot: r = values[static_cast<size_t>(ins.a)]; break;
            case Op::Add: r = scratch[ins.a] + scratch[ins.b]; break;
            case Op::Mul: r = scratch[ins.a] * scratch[ins.b]; break;
            case Op::Div: r = scratch[ins.a] / scratch[ins.b]; break;
            case Op::Neg: r = -scratch[ins.a]; break;
            case Op::PowI: {
                double b = scratch[ins.a];
                long n = ins.ipow;
                bool inv = n < 0;
                if (inv) n = -n;
                double acc = 1;
                while (n) {
                    if (n & 1) acc *= b;
                    b *= b;
                    n >>= 1;
                }
                r = inv ? 1.0 / acc : acc;
                break;
            }
            case Op::PowReg: r = std::pow(scratch[ins.a], scratch[ins.b]); break;
            case Op::Sqrt: r = std::sqrt(scratch[ins.a]); break;
            case Op::Log10: r = std::log10(scratch[ins.a]); break;
        }
        scratch[i] = r;
    }
    for (size_t i = 0; i < roots_.size(); ++i) out[i] = scratch[static_cast<size_t>(roots_[i])];
}

} // namespace structid::sym
