#pragma once

#include "structid/expr.hpp"

#include <stdexcept>
#include <string>

namespace structid::sym {

struct SyntaxError : std::runtime_error {
    size_t offset;
    SyntaxError(size_t off, const std::string& msg)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

struct UnknownSymbolError : std::runtime_error {
    std::string identifier;
    size_t offset;
    UnknownSymbolError(size_t off, const std::string& ident)
        : std::runtime_error("unknown symbol '" + ident + "' at offset " + std::to_string(off)),
          identifier(ident), offset(off) {}
};

/// Infix grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' expo)?
///   expo   := ['-'] integer | ident | '(' expr ')'
///   atom   := number | ident | '(' expr ')' | 'sqrt(' expr ')' | 'log10(' expr ')'
/// Numbers are decimal or integer literals, converted exactly to rationals.
/// All identifiers must resolve in the symbol table ('ln10' is built in).
ExprPtr parse_expression(const std::string& text, const SymbolTable& symbols);

} // namespace structid::sym
