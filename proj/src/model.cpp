#include "structid/model.hpp"

#include <algorithm>
#include <set>

namespace structid::models {

int ModelDef::state_index(const sym::Symbol* s) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i].get() == s) return static_cast<int>(i);
    return -1;
}

int ModelDef::output_index(const std::string& n) const {
    for (size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].name == n) return static_cast<int>(i);
    return -1;
}

const Output& ModelDef::output(const std::string& n) const {
    int i = output_index(n);
    if (i < 0) throw ValidationError(name + ": no output named '" + n + "'");
    return outputs[static_cast<size_t>(i)];
}

void ModelDef::validate(bool require_exact_symbol_use) const {
    if (dynamics.size() != states.size())
        throw ValidationError(name + ": " + std::to_string(dynamics.size()) +
                              " dynamics for " + std::to_string(states.size()) + " states");
    if (!state_labels.empty() && state_labels.size() != states.size())
        throw ValidationError(name + ": state label count mismatch");

    std::set<const sym::Symbol*> declared;
    auto declare = [&](const std::vector<SymbolPtr>& v) {
        for (const auto& s : v)
            if (!declared.insert(s.get()).second)
                throw ValidationError(name + ": symbol '" + s->name +
                                      "' declared in more than one role");
    };
    declare(states);
    declare(inputs);
    declare(parameters);
    declare(inlets);
    declare(constants);

    std::set<const sym::Symbol*> used;
    auto check_expr = [&](const ExprPtr& e, const std::string& where) {
        for (const sym::Symbol* s : e->free_symbols()) {
            if (!declared.count(s))
                throw ValidationError(name + ": undeclared symbol '" + s->name + "' in " + where);
            used.insert(s);
        }
    };
    for (size_t i = 0; i < dynamics.size(); ++i)
        check_expr(dynamics[i], "d/dt " + states[i]->name);
    for (const auto& o : outputs) check_expr(o.expr, "output " + o.name);

    std::set<std::string> outnames;
    for (const auto& o : outputs)
        if (!outnames.insert(o.name).second)
            throw ValidationError(name + ": duplicate output name '" + o.name + "'");

    if (require_exact_symbol_use) {
        for (const sym::Symbol* s : declared)
            if (!used.count(s))
                throw ValidationError(name + ": declared symbol '" + s->name +
                                      "' unused in dynamics and outputs");
    }
}

std::vector<std::pair<std::string, Rational>> validate_mass_balance(const ModelDef& m) {
    if (!m.petersen)
        throw NoStoichiometry(m.name + ": model carries no Petersen matrix");
    std::vector<std::pair<std::string, Rational>> sums;
    for (const auto& row : m.petersen->rows) {
        if (!row.biological) continue;
        Rational s(0);
        for (const auto& [comp, coeff] : row.coefficients)
            if (comp <= m.petersen->liquid_components) s += coeff;
        sums.emplace_back(row.label, s);
    }
    return sums;
}

} // namespace structid::models
