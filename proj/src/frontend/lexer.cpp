#include "sra/frontend/lexer.hpp"

#include <cctype>

namespace sra {

const char* describe(Tok t)
{
    switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Bar: return "'|'";
    case Tok::OrOr: return "'||'";
    case Tok::AndAnd: return "'&&'";
    case Tok::Bang: return "'!'";
    case Tok::BangBang: return "'!!'";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Implies: return "'=>'";
    case Tok::Iff: return "'<=>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Assign: return "':='";
    case Tok::Arrow: return "'->'";
    case Tok::Question: return "'?'";
    }
    return "token";
}

namespace {

class Lexer {
public:
    Lexer(std::string_view src, const std::string& file, Diagnostics& diags) : src_(src), file_(file), diags_(diags) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.span = here();
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t b = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    advance();
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(b, pos_ - b));
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t b = pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    advance();
                t.kind = Tok::Int;
                t.text = std::string(src_.substr(b, pos_ - b));
                try {
                    t.value = std::stoll(t.text);
                } catch (const std::exception&) {
                    diags_.error("E001", "integer literal out of range: " + t.text, t.span);
                }
            } else if (!punct(t)) {
                diags_.error("E001", std::string("unexpected character '") + c + "'", t.span);
                advance();
                continue;
            }
            t.span.end = pos_;
            out.push_back(std::move(t));
        }
    }

private:
    std::string_view src_;
    const std::string& file_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    SourceSpan here() const { return {file_, pos_, pos_, line_, col_}; }

    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void skip_space()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (starts("//")) {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
            } else if (starts("/*")) {
                auto start = here();
                advance();
                advance();
                while (pos_ < src_.size() && !starts("*/"))
                    advance();
                if (pos_ >= src_.size()) {
                    diags_.error("E001", "unterminated comment", start);
                    return;
                }
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    bool punct(Token& t)
    {
        struct P {
            std::string_view s;
            Tok k;
        };
        static constexpr P table[] = {
            {"<=>", Tok::Iff}, {":=", Tok::Assign}, {"->", Tok::Arrow}, {"=>", Tok::Implies}, {"==", Tok::EqEq},
            {"!=", Tok::NotEq}, {"!!", Tok::BangBang}, {"<=", Tok::Le},   {">=", Tok::Ge},      {"||", Tok::OrOr},
            {"&&", Tok::AndAnd}, {"(", Tok::LParen},  {")", Tok::RParen},  {"{", Tok::LBrace},   {"}", Tok::RBrace},
            {",", Tok::Comma},   {";", Tok::Semi},     {":", Tok::Colon},   {".", Tok::Dot},      {"|", Tok::Bar},
            {"!", Tok::Bang},    {"=", Tok::EqEq},     {"<", Tok::Lt},      {">", Tok::Gt},       {"+", Tok::Plus},
            {"-", Tok::Minus},   {"*", Tok::Star},     {"?", Tok::Question},
        };
        for (const auto& p : table) {
            if (starts(p.s)) {
                t.kind = p.k;
                t.text = std::string(p.s);
                for (std::size_t i = 0; i < p.s.size(); ++i)
                    advance();
                return true;
            }
        }
        return false;
    }
};

} // namespace

std::vector<Token> lex(std::string_view src, const std::string& file, Diagnostics& diags)
{
    return Lexer(src, file, diags).run();
}

} // namespace sra
