#pragma once

#include "structid/model.hpp"

#include <stdexcept>
#include <vector>

namespace structid::lie {

using models::ModelDef;
using sym::ExprPtr;

/// Raised when an expression exceeds the configured node budget.
struct ExpressionBlowup : std::runtime_error {
    size_t nodes;
    ExpressionBlowup(size_t n, const std::string& what) : std::runtime_error(what), nodes(n) {}
};

constexpr size_t kDefaultNodeBudget = 2'000'000;

struct StackEntry {
    int output_index;
    int order;
    ExprPtr expr;
    /// d(expr)/d(state_i); filled lazily while building the next order.
    std::vector<ExprPtr> state_gradient;
};

struct LieStack {
    const ModelDef* model = nullptr;
    int max_order = -1;
    /// entries[k][i] is y_i^(k)
    std::vector<std::vector<StackEntry>> entries;

    const StackEntry& at(int output_index, int order) const {
        return entries.at(static_cast<size_t>(order)).at(static_cast<size_t>(output_index));
    }
};

/// L_f h = sum_i dh/dx_i * f_i over the model's states; inputs and parameters
/// are treated as constants (u' = 0, theta' = 0).
ExprPtr lie_derivative(const ExprPtr& h, const ModelDef& m);

/// All y_i^(k) for k <= max_order, memoized per (model, order) within the
/// process. Throws ExpressionBlowup when any entry exceeds node_budget.
const LieStack& build_lie_stack(const ModelDef& m, int max_order,
                                size_t node_budget = kDefaultNodeBudget);

/// d(y_i^(k))/dx over the model states, cached alongside the stack entry.
std::vector<ExprPtr> stack_state_gradient(const ModelDef& m, int output_index, int order,
                                          size_t node_budget = kDefaultNodeBudget);

struct NotInputAffine : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// x' = f0(x) + sum_j g[j](x) * u_j and y = h0(x) + sum_j h[j](x) * u_j.
struct AffineDecomposition {
    std::vector<ExprPtr> f0;               // per state
    std::vector<std::vector<ExprPtr>> g;   // per input, per state
    std::vector<ExprPtr> h0;               // per output
    std::vector<std::vector<ExprPtr>> h;   // per input, per output
};

/// Splits dynamics and outputs into drift and per-input columns; throws
/// NotInputAffine if any input appears nonlinearly or inside Div/Sqrt/Log10.
/// The reconstruction identity f0 + sum g_j u_j == f is checked structurally.
AffineDecomposition decompose_input_affine(const ModelDef& m);

} // namespace structid::lie
