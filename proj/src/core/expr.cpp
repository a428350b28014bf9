#include "sra/core/expr.hpp"

#include <cassert>

namespace sra {

std::string to_string(const Type& t)
{
    switch (t.kind) {
    case TypeKind::Unknown: return "?";
    case TypeKind::Int: return "Int";
    case TypeKind::Bool: return "Bool";
    case TypeKind::Enum: return t.name;
    case TypeKind::Timer: return "Timer";
    case TypeKind::Object: return t.nullable ? t.name + "?" : t.name;
    case TypeKind::Set: return "Set<" + t.name + ">";
    }
    return "?";
}

bool structurally_equal(const Expr& a, const Expr& b)
{
    if (a.op != b.op || a.value != b.value || a.name != b.name || a.cls != b.cls || a.field != b.field)
        return false;
    if (!(a.binder_type == b.binder_type) || a.args.size() != b.args.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(a.args[i], b.args[i]))
            return false;
    return true;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b)
{
    if (!a || !b)
        return !a && !b;
    return a == b || structurally_equal(*a, *b);
}

bool is_true(const ExprPtr& e)
{
    return e && e->op == Op::BoolLit && e->value != 0;
}

bool is_false(const ExprPtr& e)
{
    return e && e->op == Op::BoolLit && e->value == 0;
}

namespace build {

namespace {

ExprPtr make(Op op, Type t, std::vector<ExprPtr> args = {})
{
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->type = std::move(t);
    e->args = std::move(args);
    return e;
}

} // namespace

ExprPtr int_lit(std::int64_t v)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::IntLit;
    e->type = Type::integer();
    e->value = v;
    return e;
}

ExprPtr bool_lit(bool b)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::BoolLit;
    e->type = Type::boolean();
    e->value = b ? 1 : 0;
    return e;
}

ExprPtr true_()
{
    static const ExprPtr t = bool_lit(true);
    return t;
}

ExprPtr false_()
{
    static const ExprPtr f = bool_lit(false);
    return f;
}

ExprPtr enum_lit(const std::string& enum_name, const std::string& literal, std::int64_t ordinal)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::EnumLit;
    e->type = Type::enumeration(enum_name);
    e->name = literal;
    e->value = ordinal;
    return e;
}

ExprPtr null_lit(const std::string& cls)
{
    return make(Op::NullLit, Type::object(cls, true));
}

ExprPtr inactive()
{
    return make(Op::Inactive, Type::timer());
}

ExprPtr havoc(const Type& t)
{
    return make(Op::Havoc, t);
}

ExprPtr var(const std::string& name, const Type& t)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::Var;
    e->type = t;
    e->name = name;
    return e;
}

ExprPtr self(const std::string& cls_name, int cls)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::Self;
    e->type = Type::object(cls_name);
    e->cls = cls;
    return e;
}

ExprPtr field(ExprPtr obj, int cls, int fidx, const std::string& name, const Type& t)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::Field;
    e->type = t;
    e->name = name;
    e->cls = cls;
    e->field = fidx;
    e->args.push_back(std::move(obj));
    return e;
}

ExprPtr executed(ExprPtr obj, int cls)
{
    return field(std::move(obj), cls, kExecutedField, "executed", Type::boolean());
}

ExprPtr all_set(const std::string& cls_name, int cls)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::AllSet;
    e->type = Type::set_of(cls_name);
    e->name = "All_" + cls_name;
    e->cls = cls;
    return e;
}

ExprPtr phase()
{
    return make(Op::Phase, Type::enumeration(kPhaseEnum));
}

ExprPtr unary(Op op, ExprPtr a, const Type& t)
{
    return make(op, t, {std::move(a)});
}

ExprPtr binary(Op op, ExprPtr a, ExprPtr b, const Type& t)
{
    return make(op, t, {std::move(a), std::move(b)});
}

ExprPtr neg(ExprPtr a)
{
    if (a->op == Op::IntLit)
        return int_lit(-a->value);
    return unary(Op::Neg, std::move(a), Type::integer());
}

ExprPtr not_(ExprPtr a)
{
    if (a->op == Op::BoolLit)
        return bool_lit(a->value == 0);
    if (a->op == Op::Not)
        return a->args[0];
    return unary(Op::Not, std::move(a), Type::boolean());
}

namespace {

ExprPtr flatten(Op op, std::vector<ExprPtr> parts)
{
    const bool is_and = op == Op::And;
    std::vector<ExprPtr> out;
    for (auto& p : parts) {
        if (!p)
            continue;
        if (p->op == Op::BoolLit) {
            if ((p->value != 0) == is_and)
                continue; // neutral
            return bool_lit(!is_and);
        }
        if (p->op == op)
            out.insert(out.end(), p->args.begin(), p->args.end());
        else
            out.push_back(std::move(p));
    }
    if (out.empty())
        return bool_lit(is_and);
    if (out.size() == 1)
        return out.front();
    return make(op, Type::boolean(), std::move(out));
}

} // namespace

ExprPtr conj(std::vector<ExprPtr> parts)
{
    return flatten(Op::And, std::move(parts));
}

ExprPtr conj(ExprPtr a, ExprPtr b)
{
    return conj(std::vector<ExprPtr>{std::move(a), std::move(b)});
}

ExprPtr disj(std::vector<ExprPtr> parts)
{
    return flatten(Op::Or, std::move(parts));
}

ExprPtr disj(ExprPtr a, ExprPtr b)
{
    return disj(std::vector<ExprPtr>{std::move(a), std::move(b)});
}

ExprPtr implies(ExprPtr a, ExprPtr b)
{
    if (is_true(a))
        return b;
    if (is_false(a) || is_true(b))
        return true_();
    return binary(Op::Implies, std::move(a), std::move(b), Type::boolean());
}

ExprPtr iff(ExprPtr a, ExprPtr b)
{
    return binary(Op::Iff, std::move(a), std::move(b), Type::boolean());
}

ExprPtr eq(ExprPtr a, ExprPtr b)
{
    return binary(Op::Eq, std::move(a), std::move(b), Type::boolean());
}

ExprPtr ne(ExprPtr a, ExprPtr b)
{
    return binary(Op::Ne, std::move(a), std::move(b), Type::boolean());
}

ExprPtr cmp(Op op, ExprPtr a, ExprPtr b)
{
    return binary(op, std::move(a), std::move(b), Type::boolean());
}

ExprPtr arith(Op op, ExprPtr a, ExprPtr b)
{
    return binary(op, std::move(a), std::move(b), Type::integer());
}

ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr e)
{
    if (is_true(c))
        return t;
    if (is_false(c))
        return e;
    if (structurally_equal(t, e))
        return t;
    Type ty = t->type.kind != TypeKind::Unknown ? t->type : e->type;
    return make(Op::Ite, ty, {std::move(c), std::move(t), std::move(e)});
}

ExprPtr card(ExprPtr set)
{
    return unary(Op::Card, std::move(set), Type::integer());
}

ExprPtr member(ExprPtr obj, ExprPtr set)
{
    return binary(Op::In, std::move(obj), std::move(set), Type::boolean());
}

ExprPtr set_union(ExprPtr a, ExprPtr b)
{
    Type t = a->type;
    return binary(Op::Union, std::move(a), std::move(b), t);
}

ExprPtr forall(const std::string& v, const Type& vt, ExprPtr range, ExprPtr body)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::Forall;
    e->type = Type::boolean();
    e->name = v;
    e->binder_type = vt;
    e->args = {std::move(range), std::move(body)};
    return e;
}

ExprPtr exists(const std::string& v, const Type& vt, ExprPtr range, ExprPtr body)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::Exists;
    e->type = Type::boolean();
    e->name = v;
    e->binder_type = vt;
    e->args = {std::move(range), std::move(body)};
    return e;
}

ExprPtr scalar_forall(const std::string& v, const Type& vt, ExprPtr body)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::ScalarForall;
    e->type = Type::boolean();
    e->name = v;
    e->binder_type = vt;
    e->args = {std::move(body)};
    return e;
}

ExprPtr old(ExprPtr e)
{
    if (e->op == Op::Old || e->op == Op::IntLit || e->op == Op::BoolLit || e->op == Op::EnumLit)
        return e;
    Type t = e->type;
    return make(Op::Old, t, {std::move(e)});
}

ExprPtr timer_from_int(ExprPtr e)
{
    return unary(Op::TimerFromInt, std::move(e), Type::timer());
}

ExprPtr timer_active(ExprPtr t)
{
    return unary(Op::TimerActive, std::move(t), Type::boolean());
}

ExprPtr timer_count(ExprPtr t)
{
    return unary(Op::TimerCount, std::move(t), Type::integer());
}

ExprPtr with_args(const Expr& e, std::vector<ExprPtr> args)
{
    auto c = std::make_shared<Expr>(e);
    c->args = std::move(args);
    return c;
}

} // namespace build

} // namespace sra
