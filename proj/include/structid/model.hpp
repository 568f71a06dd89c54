#pragma once

#include "structid/expr.hpp"
#include "structid/symbol.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace structid::models {

using sym::ExprPtr;
using sym::SymbolPtr;
using sym::SymbolTable;

enum class Channel : uint8_t { Online, Offline };

struct Output {
    std::string name;
    ExprPtr expr;
    Channel channel;
};

/// One stoichiometric process row: signed coefficients per component plus the
/// kinetic rate. Biological rows (fermentation, decay, methanogenesis) are
/// elemental mass balances; transport rows are not.
struct ProcessRow {
    std::string label;
    bool biological = true;
    std::map<int, Rational> coefficients; // component (1-based) -> signed entry
    std::string rate; // display form of the process rate
};

struct PetersenMatrix {
    std::vector<std::string> component_order;
    int liquid_components = 0; // components 1..liquid_components enter mass balances
    std::vector<ProcessRow> rows;
};

/// Memo slot for derived per-model data (Lie stacks). Deliberately not
/// copied: a copied model starts with a cold cache.
struct CacheSlot {
    mutable std::shared_ptr<void> ptr;
    CacheSlot() = default;
    CacheSlot(const CacheSlot&) {}
    CacheSlot& operator=(const CacheSlot&) {
        ptr.reset();
        return *this;
    }
    CacheSlot(CacheSlot&&) = default;
    CacheSlot& operator=(CacheSlot&&) = default;
};

/// A complete dynamical system x' = f(x,u,theta), y = h(x,theta).
struct ModelDef {
    std::string name;
    SymbolTable symbols;

    std::vector<SymbolPtr> states;
    std::vector<SymbolPtr> inputs;
    std::vector<SymbolPtr> parameters; // the identifiability-analyzed set
    std::vector<SymbolPtr> inlets;
    std::vector<SymbolPtr> constants;

    std::vector<ExprPtr> dynamics; // one per state
    std::vector<Output> outputs;

    std::vector<std::string> state_labels; // species names, parallel to states
    std::optional<PetersenMatrix> petersen;
    std::map<std::string, ExprPtr> named_subexpressions; // e.g. inhibition terms
    int water_state = -1; // index of the water-concentration state, if any
    CacheSlot lie_cache;  // managed by structid::lie

    int state_index(const sym::Symbol* s) const;
    int output_index(const std::string& name) const;
    const Output& output(const std::string& name) const;

    /// Throws ValidationError if any structural invariant fails.
    void validate(bool require_exact_symbol_use) const;
};

using ModelPtr = std::shared_ptr<const ModelDef>;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoStoichiometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Signed coefficient sum over liquid-phase components, one entry per
/// biological process row. Catalog rows balance to 0 within 2e-4.
std::vector<std::pair<std::string, Rational>> validate_mass_balance(const ModelDef& m);

} // namespace structid::models
