#include "resolve.hpp"

#include "sra/core/symbols.hpp"

#include <map>
#include <set>

namespace sra {

namespace {

ExprPtr spanned(const ExprPtr& e, const SourceSpan& sp)
{
    if (!e)
        return e;
    auto c = std::make_shared<Expr>(*e);
    c->span = sp;
    return c;
}

StmtPtr spanned(const StmtPtr& s, const SourceSpan& sp)
{
    auto c = std::make_shared<Stmt>(*s);
    c->span = sp;
    return c;
}

bool known(const ExprPtr& e)
{
    return e && e->type.kind != TypeKind::Unknown;
}

bool class_context(ExprMode m)
{
    return m == ExprMode::Guard || m == ExprMode::Effect || m == ExprMode::LocalCondition ||
           m == ExprMode::TwoState;
}

std::string type_name(const Type& t)
{
    return to_string(t);
}

} // namespace

ExprPtr Resolver::error(const SourceSpan& sp)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::BoolLit;
    e->type = Type{};
    e->span = sp;
    return e;
}

bool Resolver::expect(const ExprPtr& e, TypeKind k, const char* what)
{
    if (!known(e))
        return false;
    if (e->type.kind == k)
        return true;
    d_.error("E011", std::string("expected ") + what + ", found " + type_name(e->type), e->span);
    return false;
}

bool Resolver::unify(ExprPtr& a, ExprPtr& b, const SourceSpan& sp)
{
    if (!known(a) || !known(b))
        return false;
    const Type& ta = a->type;
    const Type& tb = b->type;
    if (ta.kind == tb.kind && ta.name == tb.name)
        return true;
    if (ta.kind == TypeKind::Timer && tb.kind == TypeKind::Int) {
        b = spanned(build::timer_from_int(b), b->span);
        return true;
    }
    if (ta.kind == TypeKind::Int && tb.kind == TypeKind::Timer) {
        a = spanned(build::timer_from_int(a), a->span);
        return true;
    }
    d_.error("E011", "type mismatch: " + type_name(ta) + " vs " + type_name(tb), sp);
    return false;
}

ExprPtr Resolver::coerce_to(const ExprPtr& value, const Type& t, const SourceSpan& sp)
{
    if (!known(value) || t.kind == TypeKind::Unknown)
        return value;
    if (t.kind == TypeKind::Timer && value->type.kind == TypeKind::Int)
        return spanned(build::timer_from_int(value), value->span);
    if (t.kind == value->type.kind && t.name == value->type.name)
        return value;
    d_.error("E011", "cannot assign " + type_name(value->type) + " to a field of type " + type_name(t), sp);
    return value;
}

ExprPtr Resolver::expr(const ExprPtr& raw, ExprMode mode, int cls)
{
    Ctx ctx{mode, cls, false};
    scope_.clear();
    return resolve(raw, ctx);
}

ExprPtr Resolver::name(const Expr& e, Ctx& ctx)
{
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
        if (it->first == e.name)
            return spanned(build::var(e.name, it->second), e.span);
    if (ctx.cls >= 0 && class_context(ctx.mode)) {
        const auto& c = m_.classes[static_cast<std::size_t>(ctx.cls)];
        if (e.name == "executed")
            return spanned(build::executed(m_.self_ref(ctx.cls), ctx.cls), e.span);
        int f = c.find_field(e.name);
        if (f >= 0)
            return spanned(m_.field_ref(m_.self_ref(ctx.cls), ctx.cls, f), e.span);
    }
    if (e.name.rfind("All_", 0) == 0) {
        int c = m_.class_index(e.name.substr(4));
        if (c >= 0)
            return spanned(build::all_set(m_.classes[static_cast<std::size_t>(c)].name, c), e.span);
    }
    if (auto lit = m_.enum_literal(e.name))
        return spanned(m_.enum_value(lit->first, lit->second), e.span);
    for (const auto& c : m_.classes) {
        if (c.find_field(e.name) >= 0 || e.name == "executed") {
            d_.error("E003", "field '" + e.name + "' is not accessible here; qualify it with an object", e.span);
            return error(e.span);
        }
    }
    d_.error("E003", "unknown name '" + e.name + "'", e.span);
    return error(e.span);
}

ExprPtr Resolver::field_access(const Expr& e, Ctx& ctx)
{
    auto obj = resolve(e.args[0], ctx);
    if (!known(obj))
        return error(e.span);
    if (obj->type.kind == TypeKind::Timer) {
        if (e.name == "active")
            return spanned(build::timer_active(obj), e.span);
        if (e.name == "count")
            return spanned(build::timer_count(obj), e.span);
        d_.error("E003", "timers only have '.active' and '.count'", e.span);
        return error(e.span);
    }
    if (obj->type.kind != TypeKind::Object) {
        d_.error("E011", "field access on a value of type " + type_name(obj->type), e.span);
        return error(e.span);
    }
    int c = m_.class_index(obj->type.name);
    if (c < 0)
        return error(e.span);
    if (e.name == "executed")
        return spanned(build::executed(obj, c), e.span);
    int f = m_.classes[static_cast<std::size_t>(c)].find_field(e.name);
    if (f < 0) {
        d_.error("E003", "class " + obj->type.name + " has no field '" + e.name + "'", e.span);
        return error(e.span);
    }
    return spanned(m_.field_ref(obj, c, f), e.span);
}

ExprPtr Resolver::quantifier(const Expr& e, Ctx& ctx)
{
    const bool is_forall = e.op == Op::Forall;
    if (e.args[0]->op == Op::AllAny) {
        std::vector<ExprPtr> parts;
        bool ok = true;
        for (std::size_t c = 0; c < m_.classes.size(); ++c) {
            const auto& cname = m_.classes[c].name;
            scope_.emplace_back(e.name, Type::object(cname));
            auto body = resolve(e.args[1], ctx);
            scope_.pop_back();
            ok = expect(body, TypeKind::Bool, "a boolean quantifier body") && ok;
            auto range = spanned(build::all_set(cname, static_cast<int>(c)), e.args[0]->span);
            auto q = is_forall ? build::forall(e.name, Type::object(cname), range, body)
                               : build::exists(e.name, Type::object(cname), range, body);
            parts.push_back(spanned(q, e.span));
        }
        if (!ok)
            return error(e.span);
        return spanned(is_forall ? build::conj(parts) : build::disj(parts), e.span);
    }
    auto range = resolve(e.args[0], ctx);
    Type bt;
    if (known(range)) {
        if (range->type.kind != TypeKind::Set)
            d_.error("E012", "quantifier range must be a set, found " + type_name(range->type), e.args[0]->span);
        else
            bt = Type::object(range->type.name);
    }
    scope_.emplace_back(e.name, bt);
    auto body = resolve(e.args[1], ctx);
    scope_.pop_back();
    expect(body, TypeKind::Bool, "a boolean quantifier body");
    if (bt.kind == TypeKind::Unknown || !known(body))
        return error(e.span);
    return spanned(is_forall ? build::forall(e.name, bt, range, body) : build::exists(e.name, bt, range, body),
                   e.span);
}

ExprPtr Resolver::equality(const Expr& e, Ctx& ctx)
{
    const ExprPtr& ra = e.args[0];
    const ExprPtr& rb = e.args[1];
    ExprPtr a;
    ExprPtr b;
    if (ra->op == Op::NullLit || rb->op == Op::NullLit) {
        bool null_left = ra->op == Op::NullLit;
        auto other = resolve(null_left ? rb : ra, ctx);
        if (!known(other))
            return error(e.span);
        if (other->type.kind != TypeKind::Object) {
            d_.error("E011", "null compared with a value of type " + type_name(other->type), e.span);
            return error(e.span);
        }
        auto nl = spanned(build::null_lit(other->type.name), (null_left ? ra : rb)->span);
        a = null_left ? nl : other;
        b = null_left ? other : nl;
    } else {
        a = resolve(ra, ctx);
        b = resolve(rb, ctx);
        if (!unify(a, b, e.span))
            return error(e.span);
    }
    return spanned(e.op == Op::Eq ? build::eq(a, b) : build::ne(a, b), e.span);
}

ExprPtr Resolver::resolve(const ExprPtr& e, Ctx& ctx)
{
    switch (e->op) {
    case Op::IntLit:
    case Op::BoolLit:
    case Op::EnumLit: return e;
    case Op::NullLit:
        d_.error("E011", "null may only be compared with a nullable object", e->span);
        return error(e->span);
    case Op::Inactive: return spanned(build::inactive(), e->span);
    case Op::Name: return name(*e, ctx);
    case Op::Var: return e;
    case Op::AllAny:
        d_.error("E011", "'All' may only be used as a quantifier range", e->span);
        return error(e->span);
    case Op::Self:
        if (ctx.cls < 0 || !class_context(ctx.mode)) {
            d_.error("E003", "'self' outside a class context", e->span);
            return error(e->span);
        }
        return spanned(m_.self_ref(ctx.cls), e->span);
    case Op::AllSet: return e;
    case Op::Phase:
        if (class_context(ctx.mode) || ctx.mode == ExprMode::Initializer) {
            d_.error("E003", "'phase' is not visible inside a class", e->span);
            return error(e->span);
        }
        return spanned(build::phase(), e->span);
    case Op::Field: return field_access(*e, ctx);
    case Op::Old: {
        if (ctx.mode != ExprMode::TwoState)
            d_.error("E013", "old() is only allowed in contracts", e->span);
        bool saved = ctx.in_old;
        ctx.in_old = true;
        auto a = resolve(e->args[0], ctx);
        ctx.in_old = saved;
        if (!known(a))
            return error(e->span);
        return spanned(build::old(a), e->span);
    }
    case Op::Neg: {
        auto a = resolve(e->args[0], ctx);
        if (!expect(a, TypeKind::Int, "an integer"))
            return error(e->span);
        return spanned(build::neg(a), e->span);
    }
    case Op::Not: {
        auto a = resolve(e->args[0], ctx);
        if (!expect(a, TypeKind::Bool, "a boolean"))
            return error(e->span);
        return spanned(build::not_(a), e->span);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
        auto a = resolve(e->args[0], ctx);
        auto b = resolve(e->args[1], ctx);
        bool ok = expect(a, TypeKind::Int, "an integer");
        ok = expect(b, TypeKind::Int, "an integer") && ok;
        if (!ok)
            return error(e->span);
        return spanned(build::arith(e->op, a, b), e->span);
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
        auto a = resolve(e->args[0], ctx);
        auto b = resolve(e->args[1], ctx);
        bool ok = expect(a, TypeKind::Int, "an integer");
        ok = expect(b, TypeKind::Int, "an integer") && ok;
        if (!ok)
            return error(e->span);
        return spanned(build::cmp(e->op, a, b), e->span);
    }
    case Op::Eq:
    case Op::Ne: return equality(*e, ctx);
    case Op::And:
    case Op::Or: {
        std::vector<ExprPtr> parts;
        bool ok = true;
        for (const auto& a : e->args) {
            parts.push_back(resolve(a, ctx));
            ok = expect(parts.back(), TypeKind::Bool, "a boolean") && ok;
        }
        if (!ok)
            return error(e->span);
        return spanned(e->op == Op::And ? build::conj(parts) : build::disj(parts), e->span);
    }
    case Op::Implies:
    case Op::Iff: {
        auto a = resolve(e->args[0], ctx);
        auto b = resolve(e->args[1], ctx);
        bool ok = expect(a, TypeKind::Bool, "a boolean");
        ok = expect(b, TypeKind::Bool, "a boolean") && ok;
        if (!ok)
            return error(e->span);
        return spanned(e->op == Op::Implies ? build::implies(a, b) : build::iff(a, b), e->span);
    }
    case Op::In: {
        auto a = resolve(e->args[0], ctx);
        auto b = resolve(e->args[1], ctx);
        bool ok = expect(a, TypeKind::Object, "an object");
        ok = expect(b, TypeKind::Set, "a set") && ok;
        if (!ok)
            return error(e->span);
        if (a->type.name != b->type.name) {
            d_.error("E011", "membership of " + type_name(a->type) + " in " + type_name(b->type), e->span);
            return error(e->span);
        }
        return spanned(build::member(a, b), e->span);
    }
    case Op::Subset:
    case Op::Disjoint:
    case Op::Union: {
        auto a = resolve(e->args[0], ctx);
        auto b = resolve(e->args[1], ctx);
        bool ok = expect(a, TypeKind::Set, "a set");
        ok = expect(b, TypeKind::Set, "a set") && ok;
        if (!ok)
            return error(e->span);
        if (a->type.name != b->type.name) {
            d_.error("E011", "set element types differ: " + type_name(a->type) + " vs " + type_name(b->type),
                     e->span);
            return error(e->span);
        }
        if (e->op == Op::Union)
            return spanned(build::set_union(a, b), e->span);
        return spanned(build::binary(e->op, a, b, Type::boolean()), e->span);
    }
    case Op::Card: {
        auto a = resolve(e->args[0], ctx);
        if (!expect(a, TypeKind::Set, "a set"))
            return error(e->span);
        return spanned(build::card(a), e->span);
    }
    case Op::Ite: {
        auto c = resolve(e->args[0], ctx);
        auto a = resolve(e->args[1], ctx);
        auto b = resolve(e->args[2], ctx);
        bool ok = expect(c, TypeKind::Bool, "a boolean condition");
        ok = unify(a, b, e->span) && ok;
        if (!ok)
            return error(e->span);
        return spanned(build::ite(c, a, b), e->span);
    }
    case Op::Forall:
    case Op::Exists: return quantifier(*e, ctx);
    default: break;
    }
    // Already-resolved internal nodes (TimerFromInt, ScalarForall, Havoc, ...)
    // only occur in programmatically built formulas.
    return e;
}

std::pair<int, int> Resolver::assign_target(int cls, const std::string& n, const SourceSpan& sp)
{
    if (n == "executed") {
        d_.error("E017", "the executed flag is set by the scheduler and cannot be assigned", sp);
        return {-1, -1};
    }
    int f = m_.classes[static_cast<std::size_t>(cls)].find_field(n);
    if (f < 0) {
        d_.error("E003", "unknown field '" + n + "'", sp);
        return {-1, -1};
    }
    return {cls, f};
}

StmtPtr Resolver::stmt(const StmtPtr& raw, int cls)
{
    scope_.clear();
    return resolve_stmt(raw, cls);
}

StmtPtr Resolver::resolve_stmt(const StmtPtr& s, int cls)
{
    Ctx ctx{ExprMode::Effect, cls, false};
    switch (s->kind) {
    case StmtKind::Skip: return s;
    case StmtKind::Seq: {
        std::vector<StmtPtr> parts;
        for (const auto& c : s->body)
            parts.push_back(resolve_stmt(c, cls));
        auto r = build::seq(std::move(parts));
        return r->kind == StmtKind::Seq ? spanned(r, s->span) : r;
    }
    case StmtKind::Assign:
    case StmtKind::Havoc: {
        auto [tc, tf] = assign_target(cls, s->target, s->span);
        ExprPtr value;
        if (s->kind == StmtKind::Assign) {
            value = resolve(s->value, ctx);
            if (tf >= 0)
                value = coerce_to(value, m_.classes[static_cast<std::size_t>(tc)].fields[static_cast<std::size_t>(tf)].type,
                                  s->span);
        }
        if (tf < 0)
            return build::skip();
        auto r = s->kind == StmtKind::Assign ? build::assign(tc, tf, s->target, value)
                                             : build::havoc_stmt(tc, tf, s->target);
        return spanned(r, s->span);
    }
    case StmtKind::If: {
        auto c = resolve(s->cond, ctx);
        expect(c, TypeKind::Bool, "a boolean condition");
        auto t = resolve_stmt(s->body[0], cls);
        auto e = resolve_stmt(s->body[1], cls);
        return spanned(build::if_stmt(c, t, e), s->span);
    }
    case StmtKind::ForallAssign: {
        auto range = resolve(s->range, ctx);
        if (!known(range))
            return build::skip();
        if (range->type.kind != TypeKind::Set) {
            d_.error("E012", "quantified assignment range must be a set, found " + type_name(range->type),
                     s->range->span);
            return build::skip();
        }
        int ec = m_.class_index(range->type.name);
        Type vt = Type::object(range->type.name);
        scope_.emplace_back(s->var, vt);
        auto value = resolve(s->value, ctx);
        scope_.pop_back();
        if (s->target == "executed") {
            d_.error("E017", "the executed flag is set by the scheduler and cannot be assigned", s->span);
            return build::skip();
        }
        int f = m_.classes[static_cast<std::size_t>(ec)].find_field(s->target);
        if (f < 0) {
            d_.error("E003", "class " + range->type.name + " has no field '" + s->target + "'", s->span);
            return build::skip();
        }
        value = coerce_to(value, m_.classes[static_cast<std::size_t>(ec)].fields[static_cast<std::size_t>(f)].type,
                          s->span);
        return spanned(build::forall_assign(s->var, vt, range, ec, f, s->target, value), s->span);
    }
    case StmtKind::FieldAssign: {
        auto obj = resolve(s->object, ctx);
        auto value = resolve(s->value, ctx);
        if (!known(obj))
            return build::skip();
        if (obj->type.kind != TypeKind::Object) {
            d_.error("E011", "assignment target is not an object field", s->span);
            return build::skip();
        }
        int oc = m_.class_index(obj->type.name);
        if (s->target == "executed") {
            d_.error("E017", "the executed flag is set by the scheduler and cannot be assigned", s->span);
            return build::skip();
        }
        int f = m_.classes[static_cast<std::size_t>(oc)].find_field(s->target);
        if (f < 0) {
            d_.error("E003", "class " + obj->type.name + " has no field '" + s->target + "'", s->span);
            return build::skip();
        }
        value = coerce_to(value, m_.classes[static_cast<std::size_t>(oc)].fields[static_cast<std::size_t>(f)].type,
                          s->span);
        return spanned(build::field_assign(obj, oc, f, s->target, value), s->span);
    }
    case StmtKind::Assume:
    case StmtKind::Assert: {
        auto c = resolve(s->cond, ctx);
        expect(c, TypeKind::Bool, "a boolean condition");
        auto r = std::make_shared<Stmt>();
        r->kind = s->kind;
        r->cond = c;
        r->span = s->span;
        return r;
    }
    }
    return s;
}

namespace {

Type resolve_field_type(const Model& m, const RawField& f, Diagnostics& d)
{
    const RawType& t = f.type;
    auto bad = [&](const std::string& msg) {
        d.error("E011", msg, t.span.line ? t.span : f.span);
        return Type{};
    };
    switch (f.kind) {
    case FieldKind::Event:
        if (f.has_type && t.name != "Event" && t.name != "Bool")
            return bad("event fields have type Event");
        return Type::boolean();
    case FieldKind::Timer:
        if (f.has_type && t.name != "Timer")
            return bad("timer fields have type Timer");
        return Type::timer();
    case FieldKind::Set:
        if (t.name != "Set")
            return bad("set fields have type Set<C>");
        if (m.class_index(t.elem) < 0) {
            d.error("E003", "unknown class '" + t.elem + "'", t.span);
            return Type{};
        }
        return Type::set_of(t.elem);
    case FieldKind::Grounded:
        if (m.class_index(t.name) < 0) {
            d.error("E003", "unknown class '" + t.name + "'", t.span);
            return Type{};
        }
        return Type::object(t.name, t.nullable);
    default: break;
    }
    if (t.name == "Int")
        return Type::integer();
    if (t.name == "Bool")
        return Type::boolean();
    if (m.find_enum(t.name))
        return Type::enumeration(t.name);
    if (t.name == "Timer" || t.name == "Event" || t.name == "Set" || m.class_index(t.name) >= 0)
        return bad(std::string(to_string(f.kind)) + " fields hold Int, Bool or enum values, not " + t.name);
    d.error("E003", "unknown type '" + t.name + "'", t.span);
    return Type{};
}

} // namespace

Model resolve_model(const RawModel& raw, const std::string& file, Diagnostics& d)
{
    Model m;
    m.source_name = file;

    std::map<std::string, std::string> literal_owner;
    for (const auto& e : raw.enums) {
        bool dup = false;
        for (const auto& x : m.enums)
            dup = dup || x.name == e.name;
        if (dup) {
            d.error("E002", "duplicate enum '" + e.name + "'", e.span);
            continue;
        }
        if (e.values.empty())
            d.error("E011", "enum '" + e.name + "' has no values", e.span);
        EnumDecl out{e.name, {}, e.span};
        for (const auto& v : e.values) {
            auto [it, fresh] = literal_owner.emplace(v, e.name);
            if (!fresh) {
                d.error("E002", "enum value '" + v + "' already declared in " + it->second, e.span);
                continue;
            }
            out.values.push_back(v);
        }
        m.enums.push_back(std::move(out));
    }

    const auto& rs = raw.scheduler;
    m.scheduler.span = rs.span;
    for (std::size_t i = 0; i < rs.phases.size(); ++i) {
        const auto& p = rs.phases[i];
        auto [it, fresh] = literal_owner.emplace(p, kPhaseEnum);
        if (!fresh) {
            d.error("E002", "phase '" + p + "' already declared" +
                                (it->second == kPhaseEnum ? std::string() : " as a value of " + it->second),
                    rs.phase_spans[i]);
            continue;
        }
        m.scheduler.phases.push_back(p);
    }

    for (const auto& rc : raw.classes) {
        if (m.class_index(rc.name) >= 0) {
            d.error("E002", "duplicate class '" + rc.name + "'", rc.span);
            continue;
        }
        ClassDecl c;
        c.name = rc.name;
        c.span = rc.span;
        m.classes.push_back(std::move(c));
    }
    // Field types may reference any class; classes are registered first.
    for (const auto& rc : raw.classes) {
        int idx = m.class_index(rc.name);
        if (idx < 0 || !m.classes[static_cast<std::size_t>(idx)].fields.empty() ||
            m.classes[static_cast<std::size_t>(idx)].span.begin != rc.span.begin)
            continue;
        auto& c = m.classes[static_cast<std::size_t>(idx)];
        for (const auto& rf : rc.fields) {
            if (rf.name == "executed") {
                if (rf.kind != FieldKind::Var || (rf.has_type && rf.type.name != "Bool") || rf.init)
                    d.error("E011", "'executed' is the built-in flag and may only be declared as 'var executed : Bool'",
                            rf.span);
                continue;
            }
            if (c.find_field(rf.name) >= 0) {
                d.error("E002", "duplicate field '" + rf.name + "' in class " + c.name, rf.span);
                continue;
            }
            FieldDecl f;
            f.name = rf.name;
            f.kind = rf.kind;
            f.ghost = rf.ghost;
            f.span = rf.span;
            f.type = resolve_field_type(m, rf, d);
            c.fields.push_back(std::move(f));
        }
        for (std::size_t i = 0; i < rc.fields.size(); ++i) {
            const auto& rf = rc.fields[i];
            if (rf.kind != FieldKind::Grounded)
                continue;
            int gi = c.find_field(rf.name);
            if (gi < 0)
                continue;
            int si = c.find_field(rf.from);
            auto& g = c.fields[static_cast<std::size_t>(gi)];
            if (si < 0 || c.fields[static_cast<std::size_t>(si)].kind != FieldKind::Set) {
                d.error("E003", "grounded field '" + rf.name + "' names unknown set field '" + rf.from + "'", rf.span);
                continue;
            }
            if (c.fields[static_cast<std::size_t>(si)].type.name != g.type.name)
                d.error("E011", "grounded field '" + rf.name + "' and set '" + rf.from + "' have different classes",
                        rf.span);
            g.source_set = si;
        }
    }
    m.finalize();

    Resolver r(m, d);
    for (const auto& rc : raw.classes) {
        int idx = m.class_index(rc.name);
        if (idx < 0 || m.classes[static_cast<std::size_t>(idx)].span.begin != rc.span.begin)
            continue;
        auto& c = m.classes[static_cast<std::size_t>(idx)];
        for (const auto& rf : rc.fields) {
            if (!rf.init || rf.name == "executed")
                continue;
            int fi = c.find_field(rf.name);
            if (fi < 0)
                continue;
            auto& f = c.fields[static_cast<std::size_t>(fi)];
            if (f.span.begin != rf.span.begin)
                continue;
            auto v = r.expr(rf.init, ExprMode::Initializer, -1);
            f.init = v;
            if (v && v->type.kind != TypeKind::Unknown && !(v->type == f.type))
                d.error("E011", "initial value of '" + f.name + "' has type " + to_string(v->type) + ", expected " +
                                    to_string(f.type),
                        rf.init->span);
        }
    }

    auto phase_of = [&](const std::string& p, const SourceSpan& sp) {
        int i = m.scheduler.find_phase(p);
        if (i < 0)
            d.error("E003", "unknown phase '" + p + "'", sp);
        return i;
    };
    if (!rs.initial.empty())
        m.scheduler.initial = phase_of(rs.initial, rs.initial_span);
    if (!rs.final_phase.empty())
        m.scheduler.final_phase = phase_of(rs.final_phase, rs.final_span);
    if (!rs.present)
        d.error("E016", "missing scheduler block", SourceSpan{file, 0, 0, 1, 1});
    for (const auto& rt : rs.transitions) {
        SchedTransition t;
        t.from = rt.from;
        t.to = rt.to;
        t.span = rt.span;
        t.from_index = phase_of(rt.from, rt.span);
        t.to_index = phase_of(rt.to, rt.span);
        t.guard = r.expr(rt.guard, ExprMode::SchedulerGuard, -1);
        if (t.guard && t.guard->type.kind != TypeKind::Unknown && t.guard->type.kind != TypeKind::Bool)
            d.error("E011", "scheduler guard must be boolean", rt.guard->span);
        m.scheduler.transitions.push_back(std::move(t));
    }

    for (const auto& rc : raw.classes) {
        int idx = m.class_index(rc.name);
        if (idx < 0 || m.classes[static_cast<std::size_t>(idx)].span.begin != rc.span.begin)
            continue;
        auto& c = m.classes[static_cast<std::size_t>(idx)];
        const EnumDecl* locs = nullptr;
        if (c.location >= 0) {
            const auto& lf = c.fields[static_cast<std::size_t>(c.location)];
            if (lf.type.kind == TypeKind::Enum)
                locs = m.find_enum(lf.type.name);
        }
        std::set<std::string> names;
        int order = 0;
        for (const auto& rt : rc.transitions) {
            if (!names.insert(rt.name).second)
                d.error("E002", "duplicate transition '" + rt.name + "' in class " + c.name, rt.span);
            Transition t;
            t.name = rt.name;
            t.span = rt.span;
            t.from = rt.from;
            t.to = rt.to;
            t.phase = rt.phase;
            t.decl_index = order++;
            if (locs) {
                t.from_index = locs->find(rt.from);
                t.to_index = locs->find(rt.to);
                if (t.from_index < 0)
                    d.error("E003", "unknown location '" + rt.from + "' for class " + c.name, rt.from_span);
                if (t.to_index < 0)
                    d.error("E003", "unknown location '" + rt.to + "' for class " + c.name, rt.to_span);
            }
            t.phase_index = phase_of(rt.phase, rt.phase_span);
            t.guard = r.expr(rt.guard, ExprMode::Guard, idx);
            if (t.guard && t.guard->type.kind != TypeKind::Unknown && t.guard->type.kind != TypeKind::Bool)
                d.error("E011", "transition guard must be boolean", rt.guard->span);
            t.effect = r.stmt(rt.effect, idx);
            t.events = guard_events(m, idx, t.guard);
            c.transitions.push_back(std::move(t));
        }
    }

    std::set<std::string> labels;
    for (const auto& rc : raw.constraints) {
        Constraint c;
        c.label = rc.label;
        c.span = rc.span;
        if (!c.label.empty() && !labels.insert(c.label).second)
            d.error("E002", "duplicate constraint label '" + c.label + "'", rc.span);
        c.expr = r.expr(rc.expr, ExprMode::Constraint, -1);
        if (c.expr && c.expr->type.kind != TypeKind::Unknown && c.expr->type.kind != TypeKind::Bool)
            d.error("E011", "constraint must be boolean", rc.span);
        m.constraints.push_back(std::move(c));
    }
    return m;
}

} // namespace sra
