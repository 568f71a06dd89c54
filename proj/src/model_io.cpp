#include "structid/model_io.hpp"

#include "structid/parser.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace structid::models {

using sym::SymbolKind;

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

ModelDef load_model(std::istream& in, const std::string& display_name) {
    ModelDef m;
    m.name = display_name;

    enum class Section { None, States, Inputs, Parameters, Inlets, Constants, Dynamics, Outputs };
    static const std::map<std::string, Section> sections = {
        {"[states]", Section::States},         {"[inputs]", Section::Inputs},
        {"[parameters]", Section::Parameters}, {"[inlets]", Section::Inlets},
        {"[constants]", Section::Constants},   {"[dynamics]", Section::Dynamics},
        {"[outputs]", Section::Outputs},
    };

    Section cur = Section::None;
    std::vector<std::pair<std::string, std::string>> dyn_lines;   // state = expr
    std::vector<std::pair<std::string, std::string>> out_lines;   // name = expr, channel=...
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };

        if (t.front() == '[') {
            auto it = sections.find(t);
            if (it == sections.end()) throw ParseError("unknown section " + t + where());
            cur = it->second;
            continue;
        }
        switch (cur) {
            case Section::None: {
                auto eq = t.find('=');
                if (eq == std::string::npos || trim(t.substr(0, eq)) != "name")
                    throw ParseError("expected 'name = ...' or a section header" + where());
                m.name = trim(t.substr(eq + 1));
                break;
            }
            case Section::States:
            case Section::Inputs:
            case Section::Parameters:
            case Section::Inlets:
            case Section::Constants: {
                std::istringstream words(t);
                std::string w;
                while (words >> w) {
                    SymbolKind kind;
                    std::vector<sym::SymbolPtr>* dest;
                    switch (cur) {
                        case Section::States:
                            kind = SymbolKind::State;
                            dest = &m.states;
                            break;
                        case Section::Inputs:
                            kind = SymbolKind::Input;
                            dest = &m.inputs;
                            break;
                        case Section::Parameters:
                            kind = SymbolKind::Parameter;
                            dest = &m.parameters;
                            break;
                        case Section::Inlets:
                            kind = SymbolKind::InletConcentration;
                            dest = &m.inlets;
                            break;
                        default:
                            kind = SymbolKind::AggregatedConstant;
                            dest = &m.constants;
                            break;
                    }
                    try {
                        dest->push_back(m.symbols.add(w, kind, static_cast<int>(dest->size())));
                    } catch (const std::invalid_argument& e) {
                        throw ParseError(std::string(e.what()) + where());
                    }
                }
                break;
            }
            case Section::Dynamics: {
                auto eq = t.find('=');
                if (eq == std::string::npos) throw ParseError("expected '<state> = <expr>'" + where());
                dyn_lines.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
                break;
            }
            case Section::Outputs: {
                auto eq = t.find('=');
                if (eq == std::string::npos) throw ParseError("expected '<name> = <expr>'" + where());
                out_lines.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
                break;
            }
        }
    }

    // dynamics, in declared state order
    std::map<std::string, std::string> dyn_by_state;
    for (auto& [s, e] : dyn_lines) {
        if (!dyn_by_state.emplace(s, e).second)
            throw ParseError("duplicate dynamics for state " + s);
    }
    for (const auto& s : m.states) {
        auto it = dyn_by_state.find(s->name);
        if (it == dyn_by_state.end()) throw ParseError("missing dynamics for state " + s->name);
        try {
            m.dynamics.push_back(sym::parse_expression(it->second, m.symbols));
        } catch (const sym::UnknownSymbolError& e) {
            throw ValidationError(m.name + ": " + e.what() + " in dynamics of " + s->name);
        }
        dyn_by_state.erase(it);
    }
    if (!dyn_by_state.empty())
        throw ParseError("dynamics given for undeclared state " + dyn_by_state.begin()->first);

    for (auto& [name, rhs] : out_lines) {
        Channel ch = Channel::Online;
        std::string expr_text = rhs;
        auto marker = rhs.rfind(", channel=");
        if (marker != std::string::npos) {
            std::string chs = trim(rhs.substr(marker + 10));
            expr_text = trim(rhs.substr(0, marker));
            if (chs == "online") ch = Channel::Online;
            else if (chs == "offline") ch = Channel::Offline;
            else throw ParseError("unknown channel '" + chs + "' for output " + name);
        }
        try {
            m.outputs.push_back({name, sym::parse_expression(expr_text, m.symbols), ch});
        } catch (const sym::UnknownSymbolError& e) {
            throw ValidationError(m.name + ": " + e.what() + " in output " + name);
        }
    }

    m.state_labels.clear();
    m.validate(/*require_exact_symbol_use=*/false);
    return m;
}

ModelDef load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    return load_model(in, path);
}

void save_model(const ModelDef& m, std::ostream& out) {
    out << "name = " << m.name << "\n\n";
    auto section = [&](const char* header, const std::vector<sym::SymbolPtr>& syms) {
        if (syms.empty()) return;
        out << header << "\n";
        for (const auto& s : syms) out << s->name << "\n";
        out << "\n";
    };
    section("[states]", m.states);
    section("[inputs]", m.inputs);
    section("[parameters]", m.parameters);
    section("[inlets]", m.inlets);
    section("[constants]", m.constants);
    out << "[dynamics]\n";
    for (size_t i = 0; i < m.states.size(); ++i)
        out << m.states[i]->name << " = " << sym::to_string(m.dynamics[i]) << "\n";
    out << "\n[outputs]\n";
    for (const auto& o : m.outputs)
        out << o.name << " = " << sym::to_string(o.expr)
            << ", channel=" << (o.channel == Channel::Online ? "online" : "offline") << "\n";
}

void save_model(const ModelDef& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    save_model(m, out);
}

} // namespace structid::models
