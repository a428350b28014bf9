#include "sra/frontend/parser.hpp"

#include "sra/frontend/lexer.hpp"

#include <algorithm>
#include <set>

namespace sra {

namespace {

struct SyntaxError {};

const std::set<std::string>& reserved()
{
    static const std::set<std::string> r = {
        "true", "false", "null", "inactive", "self", "phase", "All", "old", "forall", "exists", "if",
        "then", "else", "in", "subset", "union", "assume", "assert",
    };
    return r;
}

ExprPtr node(Op op, const SourceSpan& sp, std::vector<ExprPtr> args = {}, std::string name = {})
{
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->span = sp;
    e->args = std::move(args);
    e->name = std::move(name);
    return e;
}

ExprPtr with_span(ExprPtr e, const SourceSpan& sp)
{
    auto c = std::make_shared<Expr>(*e);
    c->span = sp;
    return c;
}

class Parser {
public:
    Parser(std::string_view src, const std::string& file, Diagnostics& diags)
        : toks_(lex(src, file, diags)), diags_(diags)
    {
    }

    RawModel model()
    {
        RawModel m;
        while (!at(Tok::End)) {
            try {
                if (at_kw("enum"))
                    m.enums.push_back(enum_decl());
                else if (at_kw("class"))
                    m.classes.push_back(class_decl());
                else if (at_kw("scheduler"))
                    scheduler(m.scheduler);
                else if (at_kw("constraints"))
                    constraints(m.constraints);
                else
                    fail("expected 'enum', 'class', 'scheduler' or 'constraints'");
            } catch (const SyntaxError&) {
                sync_top();
            }
        }
        return m;
    }

    RawInvariantFile invariant_file()
    {
        RawInvariantFile f;
        while (!at(Tok::End)) {
            try {
                if (at_kw("gprime")) {
                    RawGPrime g;
                    g.span = cur().span;
                    next();
                    g.phase = ident("phase name");
                    g.cls = ident("class name");
                    expect(Tok::Colon);
                    g.expr = expr();
                    expect(Tok::Semi);
                    f.gprime.push_back(std::move(g));
                } else {
                    f.items.push_back(labelled_item());
                }
            } catch (const SyntaxError&) {
                sync_semi();
            }
        }
        return f;
    }

    RawConfiguration configuration()
    {
        RawConfiguration c;
        while (!at(Tok::End)) {
            try {
                auto sp = cur().span;
                std::string first = ident("class or instance name");
                if (accept(Tok::Colon)) {
                    RawConfiguration::Universe u;
                    u.cls = first;
                    u.span = sp;
                    if (!at(Tok::Semi)) {
                        do {
                            u.spans.push_back(cur().span);
                            u.names.push_back(ident("instance name"));
                        } while (accept(Tok::Comma));
                    }
                    expect(Tok::Semi);
                    c.universes.push_back(std::move(u));
                } else {
                    expect(Tok::Dot);
                    RawSetBinding b;
                    b.object = first;
                    b.span = sp;
                    b.field = ident("field name");
                    expect(Tok::EqEq);
                    if (accept(Tok::LBrace)) {
                        b.is_set = true;
                        if (!at(Tok::RBrace)) {
                            do {
                                b.elems.push_back(ident("instance name"));
                            } while (accept(Tok::Comma));
                        }
                        expect(Tok::RBrace);
                    } else {
                        b.literal = expr();
                    }
                    expect(Tok::Semi);
                    c.bindings.push_back(std::move(b));
                }
            } catch (const SyntaxError&) {
                sync_semi();
            }
        }
        return c;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Diagnostics& diags_;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t k = 1) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_kw(const char* kw) const { return cur().kind == Tok::Ident && cur().text == kw; }
    void next()
    {
        if (!at(Tok::End))
            ++pos_;
    }
    bool accept(Tok k)
    {
        if (!at(k))
            return false;
        next();
        return true;
    }
    bool accept_kw(const char* kw)
    {
        if (!at_kw(kw))
            return false;
        next();
        return true;
    }

    [[noreturn]] void fail(const std::string& what)
    {
        std::string found = at(Tok::End) ? "end of input" : "'" + cur().text + "'";
        diags_.error("E001", what + ", found " + found, cur().span);
        throw SyntaxError{};
    }

    void expect(Tok k)
    {
        if (!accept(k))
            fail(std::string("expected ") + describe(k));
    }

    void expect_kw(const char* kw)
    {
        if (!accept_kw(kw))
            fail(std::string("expected '") + kw + "'");
    }

    std::string ident(const char* what)
    {
        if (!at(Tok::Ident))
            fail(std::string("expected ") + what);
        std::string s = cur().text;
        next();
        return s;
    }

    void sync_top()
    {
        int depth = 0;
        while (!at(Tok::End)) {
            if (depth == 0 && (at_kw("enum") || at_kw("class") || at_kw("scheduler") || at_kw("constraints")))
                return;
            if (at(Tok::LBrace))
                ++depth;
            if (at(Tok::RBrace) && --depth <= 0) {
                next();
                if (depth < 0)
                    depth = 0;
                continue;
            }
            next();
        }
    }

    void sync_semi()
    {
        while (!at(Tok::End) && !at(Tok::Semi))
            next();
        accept(Tok::Semi);
    }

    // Skips to the end of the current member inside a brace block.
    void sync_member()
    {
        int depth = 0;
        int parens = 0;
        while (!at(Tok::End)) {
            if (at(Tok::LParen))
                ++parens;
            if (at(Tok::RParen))
                --parens;
            if (at(Tok::LBrace))
                ++depth;
            if (at(Tok::RBrace)) {
                if (depth == 0)
                    return;
                --depth;
            }
            if (depth == 0 && parens <= 0 &&
                (at_kw("var") || at_kw("input") || at_kw("event") || at_kw("timer") || at_kw("param") ||
                 at_kw("set") || at_kw("ghost") || at_kw("grounded") || at_kw("transition") ||
                 at_kw("phases") || at_kw("initial") || at_kw("final") || at_kw("trans")))
                return;
            bool semi = at(Tok::Semi) && depth == 0 && parens <= 0;
            next();
            if (semi)
                return;
        }
    }

    EnumDecl enum_decl()
    {
        EnumDecl e;
        e.span = cur().span;
        next();
        e.name = ident("enum name");
        expect(Tok::LBrace);
        if (!at(Tok::RBrace)) {
            do {
                e.values.push_back(ident("enum value"));
            } while (accept(Tok::Comma));
        }
        expect(Tok::RBrace);
        accept(Tok::Semi);
        return e;
    }

    RawType type()
    {
        RawType t;
        t.span = cur().span;
        t.name = ident("type");
        if (t.name == "Set") {
            expect(Tok::Lt);
            t.elem = ident("element class");
            expect(Tok::Gt);
        }
        if (accept(Tok::Question))
            t.nullable = true;
        return t;
    }

    RawClass class_decl()
    {
        RawClass c;
        c.span = cur().span;
        next();
        c.name = ident("class name");
        expect(Tok::LBrace);
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            try {
                member(c);
            } catch (const SyntaxError&) {
                sync_member();
            }
        }
        expect(Tok::RBrace);
        accept(Tok::Semi);
        return c;
    }

    void member(RawClass& c)
    {
        auto sp = cur().span;
        if (at_kw("transition")) {
            c.transitions.push_back(transition());
            return;
        }
        RawField f;
        f.span = sp;
        if (accept_kw("ghost")) {
            f.ghost = true;
            if (!at_kw("set"))
                fail("expected 'set' after 'ghost'");
        }
        std::string kw = ident("member declaration");
        if (kw == "var")
            f.kind = FieldKind::Var;
        else if (kw == "input")
            f.kind = FieldKind::Input;
        else if (kw == "event")
            f.kind = FieldKind::Event;
        else if (kw == "timer")
            f.kind = FieldKind::Timer;
        else if (kw == "param")
            f.kind = FieldKind::Param;
        else if (kw == "set")
            f.kind = FieldKind::Set;
        else if (kw == "grounded")
            f.kind = FieldKind::Grounded;
        else {
            --pos_;
            fail("expected a member declaration");
        }
        f.span = sp;
        f.name = ident("field name");
        bool optional_type = f.kind == FieldKind::Event || f.kind == FieldKind::Timer;
        if (accept(Tok::Colon)) {
            f.type = type();
            f.has_type = true;
        } else if (!optional_type) {
            fail("expected ':' and a type");
        }
        if (f.kind == FieldKind::Grounded) {
            expect_kw("from");
            f.from = ident("set field name");
        }
        if (f.kind == FieldKind::Var && at(Tok::EqEq)) {
            next();
            f.init = expr();
        }
        accept(Tok::Semi);
        c.fields.push_back(std::move(f));
    }

    RawTransition transition()
    {
        RawTransition t;
        t.span = cur().span;
        next();
        t.name = ident("transition name");
        expect(Tok::EqEq);
        expect(Tok::LParen);
        t.from_span = cur().span;
        t.from = ident("start location");
        expect(Tok::Comma);
        t.guard = expr();
        expect(Tok::Comma);
        t.to_span = cur().span;
        t.to = ident("end location");
        expect(Tok::Comma);
        t.effect = block();
        expect(Tok::Comma);
        t.phase_span = cur().span;
        t.phase = ident("phase");
        expect(Tok::RParen);
        accept(Tok::Semi);
        return t;
    }

    void scheduler(RawScheduler& s)
    {
        if (s.present)
            diags_.error("E002", "duplicate scheduler block", cur().span);
        s.present = true;
        s.span = cur().span;
        next();
        expect(Tok::LBrace);
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            try {
                if (accept_kw("phases")) {
                    do {
                        s.phase_spans.push_back(cur().span);
                        s.phases.push_back(ident("phase name"));
                    } while (accept(Tok::Comma));
                } else if (at_kw("initial")) {
                    next();
                    s.initial_span = cur().span;
                    s.initial = ident("phase name");
                } else if (at_kw("final")) {
                    next();
                    s.final_span = cur().span;
                    s.final_phase = ident("phase name");
                } else if (at_kw("trans")) {
                    RawSchedTransition t;
                    t.span = cur().span;
                    next();
                    t.from = ident("phase name");
                    expect(Tok::Arrow);
                    t.to = ident("phase name");
                    expect_kw("when");
                    t.guard = expr();
                    s.transitions.push_back(std::move(t));
                } else {
                    fail("expected 'phases', 'initial', 'final' or 'trans'");
                }
                expect(Tok::Semi);
            } catch (const SyntaxError&) {
                sync_member();
            }
        }
        expect(Tok::RBrace);
        accept(Tok::Semi);
    }

    Constraint labelled_item()
    {
        Constraint c;
        c.span = cur().span;
        if (at(Tok::Ident) && peek().kind == Tok::Colon && !reserved().count(cur().text)) {
            c.label = cur().text;
            next();
            next();
        }
        c.expr = expr();
        expect(Tok::Semi);
        return c;
    }

    void constraints(std::vector<Constraint>& out)
    {
        next();
        expect(Tok::LBrace);
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            try {
                out.push_back(labelled_item());
            } catch (const SyntaxError&) {
                sync_semi();
            }
        }
        expect(Tok::RBrace);
        accept(Tok::Semi);
    }

    // ---- statements

    StmtPtr block()
    {
        auto sp = cur().span;
        expect(Tok::LBrace);
        std::vector<StmtPtr> parts;
        while (!at(Tok::RBrace) && !at(Tok::End))
            parts.push_back(statement(false));
        expect(Tok::RBrace);
        auto s = build::seq(std::move(parts));
        if (s->kind == StmtKind::Skip)
            return s;
        auto c = std::make_shared<Stmt>(*s);
        if (c->span.line == 0)
            c->span = sp;
        return c;
    }

    StmtPtr branch()
    {
        if (at(Tok::LBrace))
            return block();
        return statement(true);
    }

    // `before_else`: the trailing ';' may be omitted when 'else' follows.
    void end_simple(bool before_else)
    {
        if (before_else && at_kw("else"))
            return;
        expect(Tok::Semi);
    }

    StmtPtr statement(bool before_else)
    {
        auto sp = cur().span;
        auto s = std::make_shared<Stmt>();
        s->span = sp;
        if (accept(Tok::Semi))
            return build::skip();
        if (accept_kw("if")) {
            s->kind = StmtKind::If;
            s->cond = expr();
            expect_kw("then");
            auto then_s = branch();
            StmtPtr else_s = build::skip();
            if (accept_kw("else"))
                else_s = branch();
            s->body = {then_s, else_s};
            return s;
        }
        if (accept_kw("forall")) {
            s->kind = StmtKind::ForallAssign;
            s->var = ident("bound variable");
            expect_kw("in");
            s->range = union_expr();
            auto body = block();
            if (body->kind != StmtKind::FieldAssign || body->object->op != Op::Name ||
                body->object->name != s->var) {
                diags_.error("E008",
                             "quantified assignment body must be a single assignment '" + s->var + ".f := e;'",
                             body->span.line ? body->span : sp);
                return build::skip();
            }
            s->target = body->target;
            s->value = body->value;
            return s;
        }
        if (at_kw("assume") || at_kw("assert")) {
            s->kind = cur().text == "assume" ? StmtKind::Assume : StmtKind::Assert;
            next();
            s->cond = expr();
            end_simple(before_else);
            return s;
        }
        ExprPtr lhs = postfix();
        expect(Tok::Assign);
        if (lhs->op == Op::Name) {
            s->target = lhs->name;
            if (accept(Tok::Star)) {
                s->kind = StmtKind::Havoc;
            } else {
                s->kind = StmtKind::Assign;
                s->value = expr();
            }
        } else if (lhs->op == Op::Field) {
            s->kind = StmtKind::FieldAssign;
            s->object = lhs->args[0];
            s->target = lhs->name;
            s->value = expr();
        } else {
            diags_.error("E001", "invalid assignment target", sp);
            throw SyntaxError{};
        }
        end_simple(before_else);
        return s;
    }

    // ---- expressions

    ExprPtr expr() { return iff_expr(); }

    ExprPtr iff_expr()
    {
        auto lhs = implies_expr();
        while (at(Tok::Iff)) {
            auto sp = cur().span;
            next();
            auto rhs = implies_expr();
            lhs = node(Op::Iff, sp, {lhs, rhs});
        }
        return lhs;
    }

    ExprPtr implies_expr()
    {
        auto lhs = or_expr();
        if (at(Tok::Implies)) {
            auto sp = cur().span;
            next();
            auto rhs = implies_expr();
            return node(Op::Implies, sp, {lhs, rhs});
        }
        return lhs;
    }

    ExprPtr nary(Op op, std::vector<ExprPtr> parts, const SourceSpan& sp)
    {
        std::vector<ExprPtr> flat;
        for (auto& p : parts) {
            if (p->op == op)
                flat.insert(flat.end(), p->args.begin(), p->args.end());
            else
                flat.push_back(p);
        }
        return node(op, sp, std::move(flat));
    }

    ExprPtr or_expr()
    {
        auto first = and_expr();
        if (!at(Tok::OrOr))
            return first;
        auto sp = first->span;
        std::vector<ExprPtr> parts{first};
        while (accept(Tok::OrOr))
            parts.push_back(and_expr());
        return nary(Op::Or, std::move(parts), sp);
    }

    ExprPtr and_expr()
    {
        auto first = cmp_expr();
        if (!at(Tok::AndAnd))
            return first;
        auto sp = first->span;
        std::vector<ExprPtr> parts{first};
        while (accept(Tok::AndAnd))
            parts.push_back(cmp_expr());
        return nary(Op::And, std::move(parts), sp);
    }

    ExprPtr cmp_expr()
    {
        auto lhs = union_expr();
        Op op;
        switch (cur().kind) {
        case Tok::EqEq: op = Op::Eq; break;
        case Tok::NotEq: op = Op::Ne; break;
        case Tok::Lt: op = Op::Lt; break;
        case Tok::Le: op = Op::Le; break;
        case Tok::Gt: op = Op::Gt; break;
        case Tok::Ge: op = Op::Ge; break;
        case Tok::BangBang: op = Op::Disjoint; break;
        case Tok::Ident:
            if (cur().text == "in") {
                op = Op::In;
                break;
            }
            if (cur().text == "subset") {
                op = Op::Subset;
                break;
            }
            return lhs;
        default: return lhs;
        }
        auto sp = cur().span;
        next();
        auto rhs = union_expr();
        return node(op, sp, {lhs, rhs});
    }

    ExprPtr union_expr()
    {
        auto lhs = add_expr();
        while (at_kw("union")) {
            auto sp = cur().span;
            next();
            lhs = node(Op::Union, sp, {lhs, add_expr()});
        }
        return lhs;
    }

    ExprPtr add_expr()
    {
        auto lhs = mul_expr();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            Op op = at(Tok::Plus) ? Op::Add : Op::Sub;
            auto sp = cur().span;
            next();
            lhs = node(op, sp, {lhs, mul_expr()});
        }
        return lhs;
    }

    ExprPtr mul_expr()
    {
        auto lhs = unary();
        while (at(Tok::Star)) {
            auto sp = cur().span;
            next();
            lhs = node(Op::Mul, sp, {lhs, unary()});
        }
        return lhs;
    }

    ExprPtr unary()
    {
        auto sp = cur().span;
        if (accept(Tok::Bang))
            return node(Op::Not, sp, {unary()});
        if (accept(Tok::Minus)) {
            auto a = unary();
            if (a->op == Op::IntLit)
                return with_span(build::int_lit(-a->value), sp);
            return node(Op::Neg, sp, {a});
        }
        return postfix();
    }

    ExprPtr postfix()
    {
        auto e = primary();
        while (at(Tok::Dot)) {
            next();
            auto sp = cur().span;
            std::string f = ident("field name");
            e = node(Op::Field, sp, {e}, f);
        }
        return e;
    }

    ExprPtr binder(Op op, const SourceSpan& sp)
    {
        std::string v = ident("bound variable");
        expect_kw("in");
        auto range = union_expr();
        expect(Tok::Colon);
        auto body = expr();
        return node(op, sp, {range, body}, v);
    }

    ExprPtr primary()
    {
        auto sp = cur().span;
        switch (cur().kind) {
        case Tok::Int: {
            auto e = with_span(build::int_lit(cur().value), sp);
            next();
            return e;
        }
        case Tok::LParen: {
            next();
            auto e = expr();
            expect(Tok::RParen);
            return e;
        }
        case Tok::Bar: {
            next();
            auto e = expr();
            expect(Tok::Bar);
            return node(Op::Card, sp, {e});
        }
        case Tok::Ident: break;
        default: fail("expected an expression");
        }
        const std::string t = cur().text;
        next();
        if (t == "true" || t == "false")
            return with_span(build::bool_lit(t == "true"), sp);
        if (t == "null")
            return node(Op::NullLit, sp);
        if (t == "inactive")
            return node(Op::Inactive, sp);
        if (t == "self")
            return node(Op::Self, sp);
        if (t == "phase")
            return node(Op::Phase, sp);
        if (t == "All")
            return node(Op::AllAny, sp, {}, "All");
        if (t == "old") {
            expect(Tok::LParen);
            auto e = expr();
            expect(Tok::RParen);
            return node(Op::Old, sp, {e});
        }
        if (t == "forall")
            return binder(Op::Forall, sp);
        if (t == "exists")
            return binder(Op::Exists, sp);
        if (t == "if") {
            auto c = expr();
            expect_kw("then");
            auto a = expr();
            expect_kw("else");
            auto b = expr();
            return node(Op::Ite, sp, {c, a, b});
        }
        if (reserved().count(t)) {
            --pos_;
            fail("unexpected keyword");
        }
        return node(Op::Name, sp, {}, t);
    }
};

} // namespace

RawModel parse_model_syntax(std::string_view src, const std::string& file, Diagnostics& diags)
{
    return Parser(src, file, diags).model();
}

RawInvariantFile parse_invariant_syntax(std::string_view src, const std::string& file, Diagnostics& diags)
{
    return Parser(src, file, diags).invariant_file();
}

RawConfiguration parse_configuration_syntax(std::string_view src, const std::string& file, Diagnostics& diags)
{
    return Parser(src, file, diags).configuration();
}

} // namespace sra
