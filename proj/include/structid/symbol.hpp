#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace structid::sym {

/// Role a symbol plays inside a model. Immutable after creation.
enum class SymbolKind : uint8_t {
    State,              // x_i
    Parameter,          // theta_i, the identifiability-analyzed set
    InletConcentration, // xi_i
    AggregatedConstant, // c_i
    Input,              // u
    Stoichiometric,     // a_ij
};

const char* kind_name(SymbolKind k);

struct Symbol {
    std::string name;
    SymbolKind kind;
    int index; // ordinal within its kind

    Symbol(std::string n, SymbolKind k, int i) : name(std::move(n)), kind(k), index(i) {}
};

using SymbolPtr = std::shared_ptr<const Symbol>;

/// The named irrational constant introduced by d/dx log10(v); it is bound to
/// a numeric value only at evaluation time.
const SymbolPtr& ln10_symbol();

/// Ordered collection of symbols with unique names.
class SymbolTable {
public:
    SymbolPtr add(const std::string& name, SymbolKind kind, int index);
    SymbolPtr add(const std::string& name, SymbolKind kind);

    const Symbol* find(const std::string& name) const;
    SymbolPtr find_ptr(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }

    const std::vector<SymbolPtr>& all() const { return order_; }
    size_t size() const { return order_.size(); }

private:
    std::vector<SymbolPtr> order_;
    std::unordered_map<std::string, SymbolPtr> by_name_;
};

} // namespace structid::sym
