#include "structid/catalog.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>

namespace structid::models {

using namespace structid::sym;

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> v = {
        Variant::BMR4,    Variant::BMR4_A,  Variant::BMR4_B, Variant::ADM1_R4, Variant::BMR3,
        Variant::BMR3_A,  Variant::BMR3_AC, Variant::BMR3_BC, Variant::BMR3_ABC,
        Variant::ADM1_R3,
    };
    return v;
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::BMR4: return "BMR4";
        case Variant::BMR4_A: return "BMR4+A";
        case Variant::BMR4_B: return "BMR4+B";
        case Variant::ADM1_R4: return "ADM1-R4";
        case Variant::BMR3: return "BMR3";
        case Variant::BMR3_A: return "BMR3+A";
        case Variant::BMR3_AC: return "BMR3+AC";
        case Variant::BMR3_BC: return "BMR3+BC";
        case Variant::BMR3_ABC: return "BMR3+ABC";
        case Variant::ADM1_R3: return "ADM1-R3";
    }
    return "?";
}

std::string variant_id(Variant v) {
    std::string s = variant_name(v);
    std::string out;
    for (char ch : s) {
        if (ch == '+' || ch == '-') ch = '_';
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

std::optional<Variant> parse_variant(const std::string& s) {
    std::string key;
    for (char ch : s) {
        if (ch == '+' || ch == '-') ch = '_';
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    for (Variant v : all_variants())
        if (variant_id(v) == key) return v;
    return std::nullopt;
}

namespace {

Rational Q(const char* s) { return rational_from_string(s); }

// Stoichiometric tables: (component, process) -> signed entry. The a_ij used
// in the differential equations are the absolute values; signs are written
// out explicitly in each equation.
using Tab = std::map<std::pair<int, int>, Rational>;

const Tab& tab_r4_original() { // ADM1-R4 table (used by ADM1-R4 and BMR4+A)
    static const Tab t = {
        {{1, 1}, Q("0.2482")},  {{2, 1}, Q("0.6809")},  {{3, 1}, Q("-0.0207")},
        {{4, 1}, Q("-0.0456")}, {{5, 1}, Q("-1")},      {{8, 1}, Q("0.1372")},
        {{1, 2}, Q("0.3221")},  {{2, 2}, Q("0.7954")},  {{3, 2}, Q("0.1689")},
        {{4, 2}, Q("-0.4588")}, {{6, 2}, Q("-1")},      {{8, 2}, Q("0.1723")},
        {{1, 3}, Q("0.6393")},  {{2, 3}, Q("0.5817")},  {{3, 3}, Q("-0.0344")},
        {{4, 3}, Q("-0.4152")}, {{7, 3}, Q("-1")},      {{8, 3}, Q("0.2286")},
        {{5, 4}, Q("0.18")},    {{6, 4}, Q("0.77")},    {{7, 4}, Q("0.05")},
        {{8, 4}, Q("-1")},
    };
    return t;
}

const Tab& tab_r4_modified() { // BMR4+B table (used by BMR4+B and BMR4)
    static const Tab t = [] {
        Tab t2 = tab_r4_original();
        for (auto it = t2.begin(); it != t2.end();) {
            if (it->first.second == 4) it = t2.erase(it);
            else ++it;
        }
        t2[{1, 4}] = Q("0.3246");
        t2[{2, 4}] = Q("0.7641");
        t2[{3, 4}] = Q("0.1246");
        t2[{4, 4}] = Q("-0.3822");
        t2[{8, 4}] = Q("-0.8312");
        return t2;
    }();
    return t;
}

const Tab& tab_r3_original() { // ADM1-R3 table (parts A present)
    static const Tab t = {
        {{1, 1}, Q("0.6555")},   {{2, 1}, Q("0.0818")}, {{3, 1}, Q("0.2245")},
        {{4, 1}, Q("-0.0169")},  {{5, 1}, Q("-0.0574")}, {{6, 1}, Q("-1")},
        {{9, 1}, Q("0.1125")},
        {{1, 2}, Q("0.9947")},   {{2, 2}, Q("0.0696")}, {{3, 2}, Q("0.1029")},
        {{4, 2}, Q("0.1746")},   {{5, 2}, Q("-0.4767")}, {{7, 2}, Q("-1")},
        {{9, 2}, Q("0.1349")},
        {{1, 3}, Q("1.7651")},   {{2, 3}, Q("0.1913")}, {{3, 3}, Q("-0.6472")},
        {{4, 3}, Q("-0.0244")},  {{5, 3}, Q("-0.4470")}, {{8, 3}, Q("-1")},
        {{9, 3}, Q("0.1621")},
        {{1, 4}, Q("-26.5447")}, {{2, 4}, Q("6.7367")}, {{3, 4}, Q("18.4808")},
        {{4, 4}, Q("-0.1506")},  {{5, 4}, Q("0.4778")}, {{10, 4}, Q("1")},
        {{6, 5}, Q("0.18")},     {{7, 5}, Q("0.77")},   {{8, 5}, Q("0.05")},
        {{9, 5}, Q("-1")},
        {{6, 6}, Q("0.18")},     {{7, 6}, Q("0.77")},   {{8, 6}, Q("0.05")},
        {{10, 6}, Q("-1")},
    };
    return t;
}

const Tab& tab_r3_modified() { // BMR3+BC table (part A removed)
    static const Tab t = [] {
        Tab t2 = tab_r3_original();
        for (auto it = t2.begin(); it != t2.end();) {
            if (it->first.second >= 5) it = t2.erase(it);
            else ++it;
        }
        for (int j : {5, 6}) {
            t2[{1, j}] = Q("0.9722");
            t2[{2, j}] = Q("0.0779");
            t2[{3, j}] = Q("0.0873");
            t2[{4, j}] = Q("0.1301");
            t2[{5, j}] = Q("-0.3997");
        }
        t2[{9, 5}] = Q("-0.8678");
        t2[{9, 6}] = Q("0.1322");
        t2[{10, 6}] = Q("-1");
        return t2;
    }();
    return t;
}

/// Absolute value of a table entry (the a_ij of the equations).
ExprPtr A(const Tab& t, int comp, int proc) {
    auto it = t.find({comp, proc});
    assert(it != t.end());
    return constant(abs(it->second));
}

PetersenMatrix petersen_r4(const Tab& t, const std::string& caption) {
    PetersenMatrix p;
    p.component_order = {"S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr",
                         "X_li", "X_bac", "X_ash", "S_ch4_gas", "S_co2_gas"};
    p.liquid_components = 9;
    auto row = [&](int j, std::string label, bool bio, std::string rate) {
        ProcessRow r;
        r.label = caption + " " + label;
        r.biological = bio;
        r.rate = std::move(rate);
        for (const auto& [key, v] : t)
            if (key.second == j) r.coefficients[key.first] = v;
        p.rows.push_back(std::move(r));
    };
    row(1, "fermentation X_ch", true, "theta1*x5");
    row(2, "fermentation X_pr", true, "theta2*x6");
    row(3, "fermentation X_li", true, "theta3*x7");
    row(4, "decay X_bac", true, "theta4*x8");
    ProcessRow g1{caption + " phase transition S_ch4", false, {{1, Q("-1")}}, "c2*x1 - c3*x10"};
    ProcessRow g2{caption + " phase transition S_IC", false, {{2, Q("-1")}}, "c2*x2 - c4*x11"};
    p.rows.push_back(g1);
    p.rows.push_back(g2);
    return p;
}

PetersenMatrix petersen_r3(const Tab& t, const std::string& caption, bool full17) {
    PetersenMatrix p;
    if (full17) {
        p.component_order = {"S_ac", "S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li",
                             "X_bac", "X_ac", "X_ash", "S_ion", "S_acminus", "S_hco3minus",
                             "S_nh3", "S_ch4_gas", "S_co2_gas"};
        p.liquid_components = 15;
    } else {
        p.component_order = {"S_ac", "S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li",
                             "X_bac", "X_ac", "X_ash", "S_ch4_gas", "S_co2_gas"};
        p.liquid_components = 11;
    }
    auto row = [&](int j, std::string label, std::string rate) {
        ProcessRow r;
        r.label = caption + " " + label;
        r.biological = true;
        r.rate = std::move(rate);
        for (const auto& [key, v] : t)
            if (key.second == j) r.coefficients[key.first] = v;
        p.rows.push_back(std::move(r));
    };
    row(1, "fermentation X_ch", "theta1*x6");
    row(2, "fermentation X_pr", "theta2*x7");
    row(3, "fermentation X_li", "theta3*x8");
    row(4, "methanogenesis S_ac", "theta5*x1*x10/(theta6 + x1)*I_ac");
    row(5, "decay X_bac", "theta4*x9");
    row(6, "decay X_ac", "theta4*x10");
    return p;
}

/// Shared scaffolding for writing the published equations.
struct Builder {
    ModelDef m;
    std::vector<ExprPtr> x, xi, th, c;
    ExprPtr u;

    explicit Builder(std::string name) { m.name = std::move(name); }

    void add_states(std::vector<std::string> labels) {
        m.state_labels = labels;
        for (size_t i = 0; i < labels.size(); ++i) {
            auto s = m.symbols.add("x" + std::to_string(i + 1), SymbolKind::State,
                                   static_cast<int>(i));
            m.states.push_back(s);
            x.push_back(symref(s));
        }
    }
    void add_input() {
        auto s = m.symbols.add("u", SymbolKind::Input, 0);
        m.inputs.push_back(s);
        u = symref(s);
    }
    void add_inlets(int count) {
        for (int i = 1; i <= count; ++i) {
            auto s = m.symbols.add("xi" + std::to_string(i), SymbolKind::InletConcentration, i - 1);
            m.inlets.push_back(s);
            xi.push_back(symref(s));
        }
    }
    void add_params(int count) {
        for (int i = 1; i <= count; ++i) {
            auto s = m.symbols.add("theta" + std::to_string(i), SymbolKind::Parameter, i - 1);
            m.parameters.push_back(s);
            th.push_back(symref(s));
        }
    }
    /// c8 (the nitrogen-limitation half-saturation constant) is analyzed as a
    /// parameter in the part-C submodels; see the catalog notes in the README.
    ExprPtr add_c8_as_param() {
        auto s = m.symbols.add("c8", SymbolKind::Parameter, static_cast<int>(m.parameters.size()));
        m.parameters.push_back(s);
        return symref(s);
    }
    void add_consts(std::vector<int> indices) {
        c.assign(40, nullptr);
        for (int i : indices) {
            auto s = m.symbols.add("c" + std::to_string(i), SymbolKind::AggregatedConstant, i - 1);
            m.constants.push_back(s);
            c[static_cast<size_t>(i)] = symref(s);
        }
    }

    ExprPtr X(int i) const { return x[static_cast<size_t>(i - 1)]; }
    ExprPtr XI(int i) const { return xi[static_cast<size_t>(i - 1)]; }
    ExprPtr TH(int i) const { return th[static_cast<size_t>(i - 1)]; }
    ExprPtr C(int i) const {
        assert(c[static_cast<size_t>(i)]);
        return c[static_cast<size_t>(i)];
    }

    ExprPtr feed(int i) const { return mul({C(1), sub(XI(i), X(i)), u}); }

    void out(std::string name, ExprPtr e, Channel ch) {
        m.outputs.push_back({std::move(name), std::move(e), ch});
    }
};

ExprPtr one() { return constant(1); }

// ---- ADM1-R4 family ----------------------------------------------------------

void r4_outputs_11(Builder& b) {
    b.out("Vg",
          add({mul({b.C(6), pow(b.X(10), 2)}), mul({b.C(7), b.X(10), b.X(11)}),
               mul({b.C(8), pow(b.X(11), 2)}), mul({b.C(9), b.X(10)}), mul({b.C(10), b.X(11)}),
               b.C(11)}),
          Channel::Online);
    b.out("CH4", mul({b.C(12), b.X(10)}), Channel::Online);
    b.out("CO2", mul({b.C(13), b.X(11)}), Channel::Online);
    b.out("IN", b.X(3), Channel::Offline);
    b.out("TS", sub(one(), div(b.X(4), b.C(14))), Channel::Offline);
    b.out("VS", sub(one(), div(b.X(9), sub(b.C(14), b.X(4)))), Channel::Offline);
}

void r4_outputs_9(Builder& b) {
    b.out("Vg",
          add({mul({b.C(6), pow(b.X(8), 2)}), mul({b.C(7), b.X(8), b.X(9)}),
               mul({b.C(8), pow(b.X(9), 2)}), mul({b.C(9), b.X(8)}), mul({b.C(10), b.X(9)}),
               b.C(11)}),
          Channel::Online);
    b.out("CH4", mul({b.C(12), b.X(8)}), Channel::Online);
    b.out("CO2", mul({b.C(13), b.X(9)}), Channel::Online);
    b.out("IN", b.X(1), Channel::Offline);
    b.out("TS", sub(one(), div(b.X(2), b.C(14))), Channel::Offline);
    b.out("VS", sub(one(), div(b.X(7), sub(b.C(14), b.X(2)))), Channel::Offline);
}

ModelDef build_adm1_r4() {
    Builder b("ADM1-R4");
    b.add_states({"S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac", "X_ash",
                  "S_ch4_gas", "S_co2_gas"});
    b.add_input();
    b.add_params(4);
    b.add_inlets(9);
    b.add_consts({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21});
    const Tab& T = tab_r4_original();
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 4)}); }; // fermentation
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), neg(mul({b.C(2), b.X(1)})),
             mul({b.C(3), b.X(10)})}),
        add({b.feed(2), F(2, 1), F(2, 2), F(2, 3), neg(mul({b.C(2), b.X(2)})),
             mul({b.C(4), b.X(11)})}),
        add({b.feed(3), neg(F(3, 1)), F(3, 2), neg(F(3, 3))}),
        add({b.feed(4), neg(F(4, 1)), neg(F(4, 2)), neg(F(4, 3))}),
        add({b.feed(5), neg(mul({b.TH(1), b.X(5)})), mul({A(T, 5, 4), b.TH(4), b.X(8)})}),
        add({b.feed(6), neg(mul({b.TH(2), b.X(6)})), mul({A(T, 6, 4), b.TH(4), b.X(8)})}),
        add({b.feed(7), neg(mul({b.TH(3), b.X(7)})), mul({A(T, 7, 4), b.TH(4), b.X(8)})}),
        add({b.feed(8), F(8, 1), F(8, 2), F(8, 3), neg(mul({b.TH(4), b.X(8)}))}),
        b.feed(9),
        add({mul({b.C(15), pow(b.X(10), 3)}), mul({b.C(16), pow(b.X(10), 2), b.X(11)}),
             mul({b.C(17), b.X(10), pow(b.X(11), 2)}), mul({b.C(18), pow(b.X(10), 2)}),
             mul({b.C(19), b.X(10), b.X(11)}), mul({b.C(20), b.X(10)}), mul({b.C(5), b.X(1)})}),
        add({mul({b.C(17), pow(b.X(11), 3)}), mul({b.C(16), b.X(10), pow(b.X(11), 2)}),
             mul({b.C(15), pow(b.X(10), 2), b.X(11)}), mul({b.C(19), pow(b.X(11), 2)}),
             mul({b.C(18), b.X(10), b.X(11)}), mul({b.C(21), b.X(11)}), mul({b.C(5), b.X(2)})}),
    };
    r4_outputs_11(b);
    b.m.petersen = petersen_r4(T, "ADM1-R4");
    b.m.water_state = 3;
    return std::move(b.m);
}

ModelDef build_bmr4_b() {
    Builder b("BMR4+B");
    b.add_states({"S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac", "X_ash",
                  "S_ch4_gas", "S_co2_gas"});
    b.add_input();
    b.add_params(4);
    b.add_inlets(9);
    b.add_consts({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21});
    const Tab& T = tab_r4_modified();
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 4)}); };
    auto D = [&](int i) { return mul({A(T, i, 4), b.TH(4), b.X(8)}); }; // modified decay
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), D(1), neg(mul({b.C(2), b.X(1)})),
             mul({b.C(3), b.X(10)})}),
        add({b.feed(2), F(2, 1), F(2, 2), F(2, 3), D(2), neg(mul({b.C(2), b.X(2)})),
             mul({b.C(4), b.X(11)})}),
        add({b.feed(3), neg(F(3, 1)), F(3, 2), neg(F(3, 3)), D(3)}),
        add({b.feed(4), neg(F(4, 1)), neg(F(4, 2)), neg(F(4, 3)), neg(D(4))}),
        add({b.feed(5), neg(mul({b.TH(1), b.X(5)}))}),
        add({b.feed(6), neg(mul({b.TH(2), b.X(6)}))}),
        add({b.feed(7), neg(mul({b.TH(3), b.X(7)}))}),
        add({b.feed(8), F(8, 1), F(8, 2), F(8, 3), neg(D(8))}),
        b.feed(9),
        add({mul({b.C(15), pow(b.X(10), 3)}), mul({b.C(16), pow(b.X(10), 2), b.X(11)}),
             mul({b.C(17), b.X(10), pow(b.X(11), 2)}), mul({b.C(18), pow(b.X(10), 2)}),
             mul({b.C(19), b.X(10), b.X(11)}), mul({b.C(20), b.X(10)}), mul({b.C(5), b.X(1)})}),
        add({mul({b.C(17), pow(b.X(11), 3)}), mul({b.C(16), b.X(10), pow(b.X(11), 2)}),
             mul({b.C(15), pow(b.X(10), 2), b.X(11)}), mul({b.C(19), pow(b.X(11), 2)}),
             mul({b.C(18), b.X(10), b.X(11)}), mul({b.C(21), b.X(11)}), mul({b.C(5), b.X(2)})}),
    };
    r4_outputs_11(b);
    b.m.petersen = petersen_r4(T, "BMR4+B");
    b.m.water_state = 3;
    return std::move(b.m);
}

ModelDef build_bmr4_a() {
    Builder b("BMR4+A");
    b.add_states({"S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac", "X_ash", "S_ch4_gas",
                  "S_co2_gas"});
    b.add_input();
    b.add_params(4);
    b.add_inlets(7);
    b.add_consts({1, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 22, 23});
    const Tab& T = tab_r4_original();
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 2)}); };
    b.m.dynamics = {
        add({b.feed(1), neg(F(3, 1)), F(3, 2), neg(F(3, 3))}),
        add({b.feed(2), neg(F(4, 1)), neg(F(4, 2)), neg(F(4, 3))}),
        add({b.feed(3), neg(mul({b.TH(1), b.X(3)})), mul({A(T, 5, 4), b.TH(4), b.X(6)})}),
        add({b.feed(4), neg(mul({b.TH(2), b.X(4)})), mul({A(T, 6, 4), b.TH(4), b.X(6)})}),
        add({b.feed(5), neg(mul({b.TH(3), b.X(5)})), mul({A(T, 7, 4), b.TH(4), b.X(6)})}),
        add({b.feed(6), F(8, 1), F(8, 2), F(8, 3), neg(mul({b.TH(4), b.X(6)}))}),
        b.feed(7),
        add({mul({b.C(22), A(T, 1, 1), b.TH(1), b.X(3)}), mul({b.C(22), A(T, 1, 2), b.TH(2), b.X(4)}),
             mul({b.C(22), A(T, 1, 3), b.TH(3), b.X(5)}), mul({b.C(15), pow(b.X(8), 3)}),
             mul({b.C(16), pow(b.X(8), 2), b.X(9)}), mul({b.C(17), b.X(8), pow(b.X(9), 2)}),
             mul({b.C(18), pow(b.X(8), 2)}), mul({b.C(19), b.X(8), b.X(9)}),
             mul({b.C(23), b.X(8)})}),
        add({mul({b.C(22), A(T, 2, 1), b.TH(1), b.X(3)}), mul({b.C(22), A(T, 2, 2), b.TH(2), b.X(4)}),
             mul({b.C(22), A(T, 2, 3), b.TH(3), b.X(5)}), mul({b.C(17), pow(b.X(9), 3)}),
             mul({b.C(16), b.X(8), pow(b.X(9), 2)}), mul({b.C(15), pow(b.X(8), 2), b.X(9)}),
             mul({b.C(19), pow(b.X(9), 2)}), mul({b.C(18), b.X(8), b.X(9)}),
             mul({b.C(23), b.X(9)})}),
    };
    r4_outputs_9(b);
    b.m.petersen = petersen_r4(T, "ADM1-R4");
    b.m.water_state = 1;
    return std::move(b.m);
}

ModelDef build_bmr4() {
    Builder b("BMR4");
    b.add_states({"S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac", "X_ash", "S_ch4_gas",
                  "S_co2_gas"});
    b.add_input();
    b.add_params(4);
    b.add_inlets(7);
    b.add_consts({1, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 22, 23});
    const Tab& T = tab_r4_modified();
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 2)}); };
    auto D = [&](int i) { return mul({A(T, i, 4), b.TH(4), b.X(6)}); };
    b.m.dynamics = {
        add({b.feed(1), neg(F(3, 1)), F(3, 2), neg(F(3, 3)), D(3)}),
        add({b.feed(2), neg(F(4, 1)), neg(F(4, 2)), neg(F(4, 3)), neg(D(4))}),
        add({b.feed(3), neg(mul({b.TH(1), b.X(3)}))}),
        add({b.feed(4), neg(mul({b.TH(2), b.X(4)}))}),
        add({b.feed(5), neg(mul({b.TH(3), b.X(5)}))}),
        add({b.feed(6), F(8, 1), F(8, 2), F(8, 3), neg(D(8))}),
        b.feed(7),
        add({mul({b.C(22), A(T, 1, 1), b.TH(1), b.X(3)}), mul({b.C(22), A(T, 1, 2), b.TH(2), b.X(4)}),
             mul({b.C(22), A(T, 1, 3), b.TH(3), b.X(5)}), mul({b.C(22), A(T, 1, 4), b.TH(4), b.X(6)}),
             mul({b.C(15), pow(b.X(8), 3)}), mul({b.C(16), pow(b.X(8), 2), b.X(9)}),
             mul({b.C(17), b.X(8), pow(b.X(9), 2)}), mul({b.C(18), pow(b.X(8), 2)}),
             mul({b.C(19), b.X(8), b.X(9)}), mul({b.C(23), b.X(8)})}),
        add({mul({b.C(22), A(T, 2, 1), b.TH(1), b.X(3)}), mul({b.C(22), A(T, 2, 2), b.TH(2), b.X(4)}),
             mul({b.C(22), A(T, 2, 3), b.TH(3), b.X(5)}), mul({b.C(22), A(T, 2, 4), b.TH(4), b.X(6)}),
             mul({b.C(17), pow(b.X(9), 3)}), mul({b.C(16), b.X(8), pow(b.X(9), 2)}),
             mul({b.C(15), pow(b.X(8), 2), b.X(9)}), mul({b.C(19), pow(b.X(9), 2)}),
             mul({b.C(18), b.X(8), b.X(9)}), mul({b.C(23), b.X(9)})}),
    };
    r4_outputs_9(b);
    b.m.petersen = petersen_r4(T, "BMR4+B");
    b.m.water_state = 1;
    return std::move(b.m);
}

// ---- ADM1-R3 family ----------------------------------------------------------

ModelDef build_adm1_r3() {
    Builder b("ADM1-R3");
    b.add_states({"S_ac", "S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac",
                  "X_ac", "X_ash", "S_ion", "S_acminus", "S_hco3minus", "S_nh3", "S_ch4_gas",
                  "S_co2_gas"});
    b.add_input();
    b.add_params(7);
    b.add_inlets(12);
    {
        std::vector<int> idx;
        for (int i = 1; i <= 31; ++i) idx.push_back(i);
        b.add_consts(idx);
    }
    const Tab& T = tab_r3_original();

    ExprPtr phi = add({b.X(12), mul({constant(rat(1, 17)), sub(b.X(4), b.X(15))}),
                       mul({constant(rat(-1, 44)), b.X(14)}),
                       mul({constant(rat(-1, 60)), b.X(13)})});
    ExprPtr s_h = add({mul({constant(rat(-1, 2)), phi}),
                       mul({constant(rat(1, 2)), sqrt(add({pow(phi, 2), b.C(4)}))})});
    ExprPtr i_ph = div(b.C(3), add({b.C(3), pow(s_h, b.C(2))}));
    ExprPtr i_n = div(b.X(4), add({b.X(4), b.C(8)}));
    ExprPtr i_nh3 = div(b.TH(7), add({b.TH(7), b.X(15)}));
    ExprPtr i_ac = mul({i_ph, i_n, i_nh3});
    ExprPtr monod = mul({b.TH(5), div(mul({b.X(1), b.X(10)}), add({b.TH(6), b.X(1)})), i_ac});
    b.m.named_subexpressions["Phi"] = phi;
    b.m.named_subexpressions["S_Hplus"] = s_h;
    b.m.named_subexpressions["I_pH"] = i_ph;
    b.m.named_subexpressions["I_N"] = i_n;
    b.m.named_subexpressions["I_nh3"] = i_nh3;
    b.m.named_subexpressions["I_ac"] = i_ac;

    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 5)}); };
    auto Dk = [&](int i, int j) { return mul({A(T, i, j), b.TH(4), b.X(j + 4)}); }; // decay j=5,6
    auto Mz = [&](int i) { return mul({A(T, i, 4), monod}); };
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), neg(Mz(1))}),
        add({b.feed(2), F(2, 1), F(2, 2), F(2, 3), neg(mul({b.C(5), b.X(2)})),
             mul({b.C(6), b.X(16)}), Mz(2)}),
        add({b.feed(3), F(3, 1), F(3, 2), neg(F(3, 3)), neg(mul({b.C(5), b.X(3)})),
             mul({b.C(5), b.X(14)}), mul({b.C(7), b.X(17)}), Mz(3)}),
        add({b.feed(4), neg(F(4, 1)), F(4, 2), neg(F(4, 3)), neg(Mz(4))}),
        add({b.feed(5), neg(F(5, 1)), neg(F(5, 2)), neg(F(5, 3)), Mz(5)}),
        add({b.feed(6), neg(mul({b.TH(1), b.X(6)})), Dk(6, 5), Dk(6, 6)}),
        add({b.feed(7), neg(mul({b.TH(2), b.X(7)})), Dk(7, 5), Dk(7, 6)}),
        add({b.feed(8), neg(mul({b.TH(3), b.X(8)})), Dk(8, 5), Dk(8, 6)}),
        add({b.feed(9), F(9, 1), F(9, 2), F(9, 3), neg(mul({b.TH(4), b.X(9)}))}),
        add({b.feed(10), neg(mul({b.TH(4), b.X(10)})), monod}),
        b.feed(11),
        b.feed(12),
        add({mul({b.C(29), sub(b.X(1), b.X(13))}), neg(mul({b.C(9), b.X(13), s_h}))}),
        add({mul({b.C(30), sub(b.X(3), b.X(14))}), neg(mul({b.C(10), b.X(14), s_h}))}),
        add({mul({b.C(31), sub(b.X(4), b.X(15))}), neg(mul({b.C(11), b.X(15), s_h}))}),
        add({mul({b.C(22), pow(b.X(16), 3)}), mul({b.C(23), pow(b.X(16), 2), b.X(17)}),
             mul({b.C(24), b.X(16), pow(b.X(17), 2)}), mul({b.C(25), pow(b.X(16), 2)}),
             mul({b.C(26), b.X(16), b.X(17)}), mul({b.C(12), b.X(2)}), mul({b.C(27), b.X(16)})}),
        add({mul({b.C(24), pow(b.X(17), 3)}), mul({b.C(23), b.X(16), pow(b.X(17), 2)}),
             mul({b.C(22), pow(b.X(16), 2), b.X(17)}), mul({b.C(26), pow(b.X(17), 2)}),
             mul({b.C(25), b.X(16), b.X(17)}), mul({b.C(12), b.X(3)}),
             neg(mul({b.C(12), b.X(14)})), mul({b.C(28), b.X(17)})}),
    };
    b.out("Vg",
          add({mul({b.C(13), pow(b.X(16), 2)}), mul({b.C(14), b.X(16), b.X(17)}),
               mul({b.C(15), pow(b.X(17), 2)}), mul({b.C(16), b.X(16)}), mul({b.C(17), b.X(17)}),
               b.C(18)}),
          Channel::Online);
    b.out("CH4", mul({b.C(19), b.X(16)}), Channel::Online);
    b.out("CO2", mul({b.C(20), b.X(17)}), Channel::Online);
    b.out("pH", neg(log10(s_h)), Channel::Online);
    b.out("IN", b.X(4), Channel::Offline);
    b.out("TS", sub(one(), div(b.X(5), b.C(21))), Channel::Offline);
    b.out("VS", sub(one(), div(b.X(11), sub(b.C(21), b.X(5)))), Channel::Offline);
    b.m.petersen = petersen_r3(T, "ADM1-R3", true);
    b.m.water_state = 4;
    return std::move(b.m);
}

void r3_outputs_13(Builder& b) {
    b.out("Vg",
          add({mul({b.C(13), pow(b.X(12), 2)}), mul({b.C(14), b.X(12), b.X(13)}),
               mul({b.C(15), pow(b.X(13), 2)}), mul({b.C(16), b.X(12)}), mul({b.C(17), b.X(13)}),
               b.C(18)}),
          Channel::Online);
    b.out("CH4", mul({b.C(19), b.X(12)}), Channel::Online);
    b.out("CO2", mul({b.C(20), b.X(13)}), Channel::Online);
    b.out("IN", b.X(4), Channel::Offline);
    b.out("TS", sub(one(), div(b.X(5), b.C(21))), Channel::Offline);
    b.out("VS", sub(one(), div(b.X(11), sub(b.C(21), b.X(5)))), Channel::Offline);
    b.out("Ac", b.X(1), Channel::Online);
}

void r3_outputs_11(Builder& b) {
    b.out("Vg",
          add({mul({b.C(13), pow(b.X(10), 2)}), mul({b.C(14), b.X(10), b.X(11)}),
               mul({b.C(15), pow(b.X(11), 2)}), mul({b.C(16), b.X(10)}), mul({b.C(17), b.X(11)}),
               b.C(18)}),
          Channel::Online);
    b.out("CH4", mul({b.C(19), b.X(10)}), Channel::Online);
    b.out("CO2", mul({b.C(20), b.X(11)}), Channel::Online);
    b.out("IN", b.X(2), Channel::Offline);
    b.out("TS", sub(one(), div(b.X(3), b.C(21))), Channel::Offline);
    b.out("VS", sub(one(), div(b.X(9), sub(b.C(21), b.X(3)))), Channel::Offline);
    b.out("Ac", b.X(1), Channel::Online);
}

ModelDef build_bmr3_abc() {
    Builder b("BMR3+ABC");
    b.add_states({"S_ac", "S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac",
                  "X_ac", "X_ash", "S_ch4_gas", "S_co2_gas"});
    b.add_input();
    b.add_params(6);
    ExprPtr c8 = b.add_c8_as_param();
    b.add_inlets(11);
    b.add_consts({1, 5, 6, 7, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28});
    const Tab& T = tab_r3_original();
    ExprPtr i_n = div(b.X(4), add({b.X(4), c8}));
    ExprPtr monod = mul({b.TH(5), div(mul({b.X(1), b.X(10)}), add({b.TH(6), b.X(1)})), i_n});
    b.m.named_subexpressions["I_N"] = i_n;
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 5)}); };
    auto Dk = [&](int i, int j) { return mul({A(T, i, j), b.TH(4), b.X(j + 4)}); };
    auto Mz = [&](int i) { return mul({A(T, i, 4), monod}); };
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), neg(Mz(1))}),
        add({b.feed(2), F(2, 1), F(2, 2), F(2, 3), neg(mul({b.C(5), b.X(2)})),
             mul({b.C(6), b.X(12)}), Mz(2)}),
        add({b.feed(3), F(3, 1), F(3, 2), neg(F(3, 3)), neg(mul({b.C(5), b.X(3)})),
             mul({b.C(7), b.X(13)}), Mz(3)}),
        add({b.feed(4), neg(F(4, 1)), F(4, 2), neg(F(4, 3)), neg(Mz(4))}),
        add({b.feed(5), neg(F(5, 1)), neg(F(5, 2)), neg(F(5, 3)), Mz(5)}),
        add({b.feed(6), neg(mul({b.TH(1), b.X(6)})), Dk(6, 5), Dk(6, 6)}),
        add({b.feed(7), neg(mul({b.TH(2), b.X(7)})), Dk(7, 5), Dk(7, 6)}),
        add({b.feed(8), neg(mul({b.TH(3), b.X(8)})), Dk(8, 5), Dk(8, 6)}),
        add({b.feed(9), F(9, 1), F(9, 2), F(9, 3), neg(mul({b.TH(4), b.X(9)}))}),
        add({b.feed(10), neg(mul({b.TH(4), b.X(10)})), monod}),
        b.feed(11),
        add({mul({b.C(22), pow(b.X(12), 3)}), mul({b.C(23), pow(b.X(12), 2), b.X(13)}),
             mul({b.C(24), b.X(12), pow(b.X(13), 2)}), mul({b.C(25), pow(b.X(12), 2)}),
             mul({b.C(26), b.X(12), b.X(13)}), mul({b.C(12), b.X(2)}), mul({b.C(27), b.X(12)})}),
        add({mul({b.C(24), pow(b.X(13), 3)}), mul({b.C(23), b.X(12), pow(b.X(13), 2)}),
             mul({b.C(22), pow(b.X(12), 2), b.X(13)}), mul({b.C(26), pow(b.X(13), 2)}),
             mul({b.C(25), b.X(12), b.X(13)}), mul({b.C(12), b.X(3)}), mul({b.C(28), b.X(13)})}),
    };
    r3_outputs_13(b);
    b.m.petersen = petersen_r3(T, "ADM1-R3", false);
    b.m.water_state = 4;
    return std::move(b.m);
}

ModelDef build_bmr3_bc() {
    Builder b("BMR3+BC");
    b.add_states({"S_ac", "S_ch4", "S_IC", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac",
                  "X_ac", "X_ash", "S_ch4_gas", "S_co2_gas"});
    b.add_input();
    b.add_params(6);
    ExprPtr c8 = b.add_c8_as_param();
    b.add_inlets(11);
    b.add_consts({1, 5, 6, 7, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28});
    const Tab& T = tab_r3_modified();
    ExprPtr i_n = div(b.X(4), add({b.X(4), c8}));
    ExprPtr monod = mul({b.TH(5), div(mul({b.X(1), b.X(10)}), add({b.TH(6), b.X(1)})), i_n});
    b.m.named_subexpressions["I_N"] = i_n;
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 5)}); };
    auto Dk = [&](int i, int j) { return mul({A(T, i, j), b.TH(4), b.X(j + 4)}); };
    auto Mz = [&](int i) { return mul({A(T, i, 4), monod}); };
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), neg(Mz(1)), Dk(1, 5), Dk(1, 6)}),
        add({b.feed(2), F(2, 1), F(2, 2), F(2, 3), neg(mul({b.C(5), b.X(2)})),
             mul({b.C(6), b.X(12)}), Mz(2), Dk(2, 5), Dk(2, 6)}),
        add({b.feed(3), F(3, 1), F(3, 2), neg(F(3, 3)), neg(mul({b.C(5), b.X(3)})),
             mul({b.C(7), b.X(13)}), Mz(3), Dk(3, 5), Dk(3, 6)}),
        add({b.feed(4), neg(F(4, 1)), F(4, 2), neg(F(4, 3)), neg(Mz(4)), Dk(4, 5), Dk(4, 6)}),
        add({b.feed(5), neg(F(5, 1)), neg(F(5, 2)), neg(F(5, 3)), Mz(5), neg(Dk(5, 5)),
             neg(Dk(5, 6))}),
        add({b.feed(6), neg(mul({b.TH(1), b.X(6)}))}),
        add({b.feed(7), neg(mul({b.TH(2), b.X(7)}))}),
        add({b.feed(8), neg(mul({b.TH(3), b.X(8)}))}),
        add({b.feed(9), F(9, 1), F(9, 2), F(9, 3), neg(Dk(9, 5)), Dk(9, 6)}),
        add({b.feed(10), neg(mul({b.TH(4), b.X(10)})), monod}),
        b.feed(11),
        add({mul({b.C(22), pow(b.X(12), 3)}), mul({b.C(23), pow(b.X(12), 2), b.X(13)}),
             mul({b.C(24), b.X(12), pow(b.X(13), 2)}), mul({b.C(25), pow(b.X(12), 2)}),
             mul({b.C(26), b.X(12), b.X(13)}), mul({b.C(12), b.X(2)}), mul({b.C(27), b.X(12)})}),
        add({mul({b.C(24), pow(b.X(13), 3)}), mul({b.C(23), b.X(12), pow(b.X(13), 2)}),
             mul({b.C(22), pow(b.X(12), 2), b.X(13)}), mul({b.C(26), pow(b.X(13), 2)}),
             mul({b.C(25), b.X(12), b.X(13)}), mul({b.C(12), b.X(3)}), mul({b.C(28), b.X(13)})}),
    };
    r3_outputs_13(b);
    b.m.petersen = petersen_r3(T, "BMR3+BC", false);
    b.m.water_state = 4;
    return std::move(b.m);
}

ModelDef build_bmr3_ac() {
    Builder b("BMR3+AC");
    b.add_states({"S_ac", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac", "X_ac", "X_ash",
                  "S_ch4_gas", "S_co2_gas"});
    b.add_input();
    b.add_params(6);
    ExprPtr c8 = b.add_c8_as_param();
    b.add_inlets(9);
    b.add_consts({1, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 32, 33});
    const Tab& T = tab_r3_original();
    ExprPtr i_n = div(b.X(2), add({b.X(2), c8}));
    ExprPtr monod = mul({b.TH(5), div(mul({b.X(1), b.X(8)}), add({b.TH(6), b.X(1)})), i_n});
    b.m.named_subexpressions["I_N"] = i_n;
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 3)}); };
    auto Dk = [&](int i, int j) { return mul({A(T, i, j), b.TH(4), b.X(j + 2)}); };
    auto Mz = [&](int i) { return mul({A(T, i, 4), monod}); };
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), neg(Mz(1))}),
        add({b.feed(2), neg(F(4, 1)), F(4, 2), neg(F(4, 3)), neg(Mz(4))}),
        add({b.feed(3), neg(F(5, 1)), neg(F(5, 2)), neg(F(5, 3)), Mz(5)}),
        add({b.feed(4), neg(mul({b.TH(1), b.X(4)})), Dk(6, 5), Dk(6, 6)}),
        add({b.feed(5), neg(mul({b.TH(2), b.X(5)})), Dk(7, 5), Dk(7, 6)}),
        add({b.feed(6), neg(mul({b.TH(3), b.X(6)})), Dk(8, 5), Dk(8, 6)}),
        add({b.feed(7), F(9, 1), F(9, 2), F(9, 3), neg(mul({b.TH(4), b.X(7)}))}),
        add({b.feed(8), monod, neg(mul({b.TH(4), b.X(8)}))}),
        b.feed(9),
        add({mul({b.C(32), A(T, 2, 1), b.TH(1), b.X(4)}), mul({b.C(32), A(T, 2, 2), b.TH(2), b.X(5)}),
             mul({b.C(32), A(T, 2, 3), b.TH(3), b.X(6)}), mul({b.C(32), A(T, 2, 4), monod}),
             mul({b.C(22), pow(b.X(10), 3)}), mul({b.C(23), pow(b.X(10), 2), b.X(11)}),
             mul({b.C(24), b.X(10), pow(b.X(11), 2)}), mul({b.C(25), pow(b.X(10), 2)}),
             mul({b.C(26), b.X(10), b.X(11)}), mul({b.C(33), b.X(10)})}),
        add({mul({b.C(32), A(T, 3, 1), b.TH(1), b.X(4)}), mul({b.C(32), A(T, 3, 2), b.TH(2), b.X(5)}),
             neg(mul({b.C(32), A(T, 3, 3), b.TH(3), b.X(6)})), mul({b.C(32), A(T, 3, 4), monod}),
             mul({b.C(24), pow(b.X(11), 3)}), mul({b.C(23), b.X(10), pow(b.X(11), 2)}),
             mul({b.C(22), pow(b.X(10), 2), b.X(11)}), mul({b.C(26), pow(b.X(11), 2)}),
             mul({b.C(25), b.X(10), b.X(11)}), mul({b.C(33), b.X(11)})}),
    };
    r3_outputs_11(b);
    b.m.petersen = petersen_r3(T, "ADM1-R3", false);
    b.m.water_state = 2;
    return std::move(b.m);
}

ModelDef build_bmr3_a() {
    Builder b("BMR3+A");
    b.add_states({"S_ac", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac", "X_ac", "X_ash",
                  "S_ch4_gas", "S_co2_gas"});
    b.add_input();
    b.add_params(6);
    b.add_inlets(9);
    b.add_consts({1, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 32, 33});
    const Tab& T = tab_r3_original();
    ExprPtr monod = mul({b.TH(5), div(mul({b.X(1), b.X(8)}), add({b.TH(6), b.X(1)}))});
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 3)}); };
    auto Dk = [&](int i, int j) { return mul({A(T, i, j), b.TH(4), b.X(j + 2)}); };
    auto Mz = [&](int i) { return mul({A(T, i, 4), monod}); };
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), neg(Mz(1))}),
        add({b.feed(2), neg(F(4, 1)), F(4, 2), neg(F(4, 3)), neg(Mz(4))}),
        add({b.feed(3), neg(F(5, 1)), neg(F(5, 2)), neg(F(5, 3)), Mz(5)}),
        add({b.feed(4), neg(mul({b.TH(1), b.X(4)})), Dk(6, 5), Dk(6, 6)}),
        add({b.feed(5), neg(mul({b.TH(2), b.X(5)})), Dk(7, 5), Dk(7, 6)}),
        add({b.feed(6), neg(mul({b.TH(3), b.X(6)})), Dk(8, 5), Dk(8, 6)}),
        add({b.feed(7), F(9, 1), F(9, 2), F(9, 3), neg(mul({b.TH(4), b.X(7)}))}),
        add({b.feed(8), monod, neg(mul({b.TH(4), b.X(8)}))}),
        b.feed(9),
        add({mul({b.C(32), A(T, 2, 1), b.TH(1), b.X(4)}), mul({b.C(32), A(T, 2, 2), b.TH(2), b.X(5)}),
             mul({b.C(32), A(T, 2, 3), b.TH(3), b.X(6)}), mul({b.C(32), A(T, 2, 4), monod}),
             mul({b.C(22), pow(b.X(10), 3)}), mul({b.C(23), pow(b.X(10), 2), b.X(11)}),
             mul({b.C(24), b.X(10), pow(b.X(11), 2)}), mul({b.C(25), pow(b.X(10), 2)}),
             mul({b.C(26), b.X(10), b.X(11)}), mul({b.C(33), b.X(10)})}),
        add({mul({b.C(32), A(T, 3, 1), b.TH(1), b.X(4)}), mul({b.C(32), A(T, 3, 2), b.TH(2), b.X(5)}),
             neg(mul({b.C(32), A(T, 3, 3), b.TH(3), b.X(6)})), mul({b.C(32), A(T, 3, 4), monod}),
             mul({b.C(24), pow(b.X(11), 3)}), mul({b.C(23), b.X(10), pow(b.X(11), 2)}),
             mul({b.C(22), pow(b.X(10), 2), b.X(11)}), mul({b.C(26), pow(b.X(11), 2)}),
             mul({b.C(25), b.X(10), b.X(11)}), mul({b.C(33), b.X(11)})}),
    };
    r3_outputs_11(b);
    b.m.petersen = petersen_r3(T, "ADM1-R3", false);
    b.m.water_state = 2;
    return std::move(b.m);
}

ModelDef build_bmr3() {
    Builder b("BMR3");
    b.add_states({"S_ac", "S_IN", "S_h2o", "X_ch", "X_pr", "X_li", "X_bac", "X_ac", "X_ash",
                  "S_ch4_gas", "S_co2_gas"});
    b.add_input();
    b.add_params(6);
    b.add_inlets(9);
    b.add_consts({1, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 32, 33});
    const Tab& T = tab_r3_modified();
    ExprPtr monod = mul({b.TH(5), div(mul({b.X(1), b.X(8)}), add({b.TH(6), b.X(1)}))});
    auto F = [&](int i, int j) { return mul({A(T, i, j), b.TH(j), b.X(j + 3)}); };
    auto Dk = [&](int i, int j) { return mul({A(T, i, j), b.TH(4), b.X(j + 2)}); };
    auto Mz = [&](int i) { return mul({A(T, i, 4), monod}); };
    b.m.dynamics = {
        add({b.feed(1), F(1, 1), F(1, 2), F(1, 3), neg(Mz(1)), Dk(1, 5), Dk(1, 6)}),
        add({b.feed(2), neg(F(4, 1)), F(4, 2), neg(F(4, 3)), neg(Mz(4)), Dk(4, 5), Dk(4, 6)}),
        add({b.feed(3), neg(F(5, 1)), neg(F(5, 2)), neg(F(5, 3)), Mz(5), neg(Dk(5, 5)),
             neg(Dk(5, 6))}),
        add({b.feed(4), neg(mul({b.TH(1), b.X(4)}))}),
        add({b.feed(5), neg(mul({b.TH(2), b.X(5)}))}),
        add({b.feed(6), neg(mul({b.TH(3), b.X(6)}))}),
        add({b.feed(7), F(9, 1), F(9, 2), F(9, 3), neg(Dk(9, 5)), Dk(9, 6)}),
        add({b.feed(8), monod, neg(mul({b.TH(4), b.X(8)}))}),
        b.feed(9),
        add({mul({b.C(32), A(T, 2, 1), b.TH(1), b.X(4)}), mul({b.C(32), A(T, 2, 2), b.TH(2), b.X(5)}),
             mul({b.C(32), A(T, 2, 3), b.TH(3), b.X(6)}), mul({b.C(32), A(T, 2, 4), monod}),
             mul({b.C(32), A(T, 2, 5), b.TH(4), b.X(7)}), mul({b.C(32), A(T, 2, 6), b.TH(4), b.X(8)}),
             mul({b.C(22), pow(b.X(10), 3)}), mul({b.C(23), pow(b.X(10), 2), b.X(11)}),
             mul({b.C(24), b.X(10), pow(b.X(11), 2)}), mul({b.C(25), pow(b.X(10), 2)}),
             mul({b.C(26), b.X(10), b.X(11)}), mul({b.C(33), b.X(10)})}),
        add({mul({b.C(32), A(T, 3, 1), b.TH(1), b.X(4)}), mul({b.C(32), A(T, 3, 2), b.TH(2), b.X(5)}),
             neg(mul({b.C(32), A(T, 3, 3), b.TH(3), b.X(6)})), mul({b.C(32), A(T, 3, 4), monod}),
             mul({b.C(32), A(T, 3, 5), b.TH(4), b.X(7)}), mul({b.C(32), A(T, 3, 6), b.TH(4), b.X(8)}),
             mul({b.C(24), pow(b.X(11), 3)}), mul({b.C(23), b.X(10), pow(b.X(11), 2)}),
             mul({b.C(22), pow(b.X(10), 2), b.X(11)}), mul({b.C(26), pow(b.X(11), 2)}),
             mul({b.C(25), b.X(10), b.X(11)}), mul({b.C(33), b.X(11)})}),
    };
    r3_outputs_11(b);
    b.m.petersen = petersen_r3(T, "BMR3+BC", false);
    b.m.water_state = 2;
    return std::move(b.m);
}

} // namespace

ModelPtr build_model(Variant v) {
    static std::mutex mu;
    static std::map<Variant, ModelPtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(v);
    if (it != cache.end()) return it->second;

    ModelDef m;
    switch (v) {
        case Variant::BMR4: m = build_bmr4(); break;
        case Variant::BMR4_A: m = build_bmr4_a(); break;
        case Variant::BMR4_B: m = build_bmr4_b(); break;
        case Variant::ADM1_R4: m = build_adm1_r4(); break;
        case Variant::BMR3: m = build_bmr3(); break;
        case Variant::BMR3_A: m = build_bmr3_a(); break;
        case Variant::BMR3_AC: m = build_bmr3_ac(); break;
        case Variant::BMR3_BC: m = build_bmr3_bc(); break;
        case Variant::BMR3_ABC: m = build_bmr3_abc(); break;
        case Variant::ADM1_R3: m = build_adm1_r3(); break;
    }
    m.validate(/*require_exact_symbol_use=*/true);
    auto p = std::make_shared<const ModelDef>(std::move(m));
    cache.emplace(v, p);
    return p;
}

} // namespace structid::models
