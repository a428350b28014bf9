#pragma once

#include "sra/core/source.hpp"
#include "sra/frontend/diagnostics.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sra {

enum class Tok : std::uint8_t {
    End,
    Ident,
    Int,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Dot,
    Bar,      // |
    OrOr,     // ||
    AndAnd,   // &&
    Bang,     // !
    BangBang, // !!
    EqEq,     // == or =
    NotEq,    // !=
    Lt,
    Le,
    Gt,
    Ge,
    Implies, // =>
    Iff,     // <=>
    Plus,
    Minus,
    Star,
    Assign, // :=
    Arrow,  // ->
    Question,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    SourceSpan span;
};

const char* describe(Tok t);

// Splits `src` into tokens; `//` and `/* */` comments are skipped. Lexical
// errors are reported as E001 and the offending character is dropped.
std::vector<Token> lex(std::string_view src, const std::string& file, Diagnostics& diags);

} // namespace sra
