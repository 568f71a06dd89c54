#include "structid/parser.hpp"

#include <cctype>

namespace structid::sym {

namespace {

struct Parser {
    const std::string& text;
    const SymbolTable& symbols;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw SyntaxError(pos, std::string("expected ") + what);
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            if (accept('+')) {
                e = add({e, parse_term()});
            } else if (accept('-')) {
                e = sub(e, parse_term());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            if (accept('*')) {
                e = mul({e, parse_factor()});
            } else if (accept('/')) {
                e = div(e, parse_factor());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_factor() {
        if (accept('-')) return neg(parse_factor());
        ExprPtr e = parse_atom();
        if (accept('^')) e = pow(e, parse_exponent());
        return e;
    }

    ExprPtr parse_exponent() {
        skip_ws();
        if (accept('-')) {
            size_t at = pos;
            ExprPtr n = parse_number();
            if (!n->is_integer_constant()) throw SyntaxError(at, "expected integer exponent");
            return constant(-n->value);
        }
        char c = peek();
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_expr();
            expect(')', "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw SyntaxError(pos, "expected exponent");
    }

    ExprPtr parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos;
            ExprPtr e = parse_expr();
            expect(')', "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t at = pos;
            std::string ident = read_ident();
            if ((ident == "sqrt" || ident == "log10") && peek() == '(') {
                ++pos;
                ExprPtr arg = parse_expr();
                expect(')', "')'");
                return ident == "sqrt" ? sqrt(arg) : log10(arg);
            }
            return resolve(ident, at);
        }
        throw SyntaxError(pos, "expected operand");
    }

    std::string read_ident() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        return text.substr(start, pos - start);
    }

    ExprPtr parse_ident() {
        size_t at = pos;
        return resolve(read_ident(), at);
    }

    ExprPtr resolve(const std::string& ident, size_t at) {
        if (ident == "ln10") return symref(ln10_symbol());
        if (SymbolPtr s = symbols.find_ptr(ident)) return symref(s);
        throw UnknownSymbolError(at, ident);
    }

    ExprPtr parse_number() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            size_t frac = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == frac) throw SyntaxError(pos, "malformed decimal literal");
        }
        if (pos == start) throw SyntaxError(start, "expected number");
        return constant(rational_from_string(text.substr(start, pos - start)));
    }
};

} // namespace

ExprPtr parse_expression(const std::string& text, const SymbolTable& symbols) {
    Parser p{text, symbols};
    ExprPtr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError(p.pos, "unexpected trailing input");
    return e;
}

} // namespace structid::sym
