#include "sra/sim/eval.hpp"

#include <algorithm>
#include <iterator>

namespace sra {

bool value_equal(const Value& a, const Value& b)
{
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case Value::Kind::Scalar: return a.scalar == b.scalar;
    case Value::Kind::Object: return a.obj.index == b.obj.index && (a.obj.is_null() || a.obj.cls == b.obj.cls);
    case Value::Kind::Set: return a.set == b.set;
    }
    return false;
}

std::int64_t domain_size(const Model& m, const Type& t)
{
    if (t.kind == TypeKind::Bool)
        return 2;
    if (t.kind == TypeKind::Enum)
        return static_cast<std::int64_t>(m.enum_values(t).size());
    return 0;
}

Value Evaluator::lookup(const std::string& name) const
{
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
        if (it->first == name)
            return it->second;
    throw EvalError("unbound variable '" + name + "'");
}

std::vector<int> Evaluator::all_of(int cls) const
{
    std::vector<int> out(cfg_.instances.at(static_cast<std::size_t>(cls)).size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<int>(i);
    return out;
}

Value Evaluator::field(const Expr& e)
{
    Value o = eval(e.args[0]);
    if (o.kind != Value::Kind::Object)
        throw EvalError("field access on a non-object");
    if (o.obj.is_null())
        throw EvalError("field '" + e.name + "' read through null");
    ObjRef obj{e.cls, o.obj.index};
    if (e.field == kExecutedField)
        return Value::of_bool(cur_->is_executed(obj));
    const auto& fd = m_.classes.at(static_cast<std::size_t>(e.cls)).fields.at(static_cast<std::size_t>(e.field));
    if (fd.is_mutable())
        return Value::of(cur_->get(m_, obj, e.field));
    return cfg_.get(obj, e.field);
}

Value Evaluator::quantifier(const Expr& e)
{
    const bool forall = e.op != Op::Exists;
    std::vector<Value> domain;
    if (e.op == Op::ScalarForall) {
        std::int64_t n = domain_size(m_, e.binder_type);
        if (n == 0)
            throw EvalError("cannot enumerate values of type " + to_string(e.binder_type));
        for (std::int64_t v = 0; v < n; ++v)
            domain.push_back(Value::of(v));
    } else {
        Value range = eval(e.args[0]);
        int cls = m_.class_index(e.binder_type.name);
        for (int i : range.set)
            domain.push_back(Value::of_obj({cls, i}));
    }
    const ExprPtr& body = e.args.back();
    bool result = forall;
    for (auto& v : domain) {
        env_.emplace_back(e.name, std::move(v));
        bool b = eval(body).truthy();
        env_.pop_back();
        if (b != forall) {
            result = !forall;
            break;
        }
    }
    return Value::of_bool(result);
}

Value Evaluator::eval(const ExprPtr& ep)
{
    const Expr& e = *ep;
    auto scalar = [&](std::size_t i) { return eval(e.args[i]).scalar; };
    auto set = [&](std::size_t i) { return eval(e.args[i]).set; };
    switch (e.op) {
    case Op::IntLit:
    case Op::BoolLit:
    case Op::EnumLit: return Value::of(e.value);
    case Op::NullLit: return Value::of_obj({m_.class_index(e.type.name), -1});
    case Op::Inactive: return Value::of(0);
    case Op::Var: return lookup(e.name);
    case Op::Self:
        if (self_.cls < 0)
            throw EvalError("'self' outside a class context");
        return Value::of_obj(self_);
    case Op::Field: return field(e);
    case Op::AllSet: return Value::of_set(all_of(e.cls));
    case Op::Phase: return Value::of(cur_->phase);
    case Op::Neg: return Value::of(-scalar(0));
    case Op::Add: return Value::of(scalar(0) + scalar(1));
    case Op::Sub: return Value::of(scalar(0) - scalar(1));
    case Op::Mul: return Value::of(scalar(0) * scalar(1));
    case Op::Ite: return eval(e.args[0]).truthy() ? eval(e.args[1]) : eval(e.args[2]);
    case Op::Card: return Value::of(static_cast<std::int64_t>(set(0).size()));
    case Op::Not: return Value::of_bool(!eval(e.args[0]).truthy());
    case Op::And:
        for (const auto& a : e.args)
            if (!eval(a).truthy())
                return Value::of_bool(false);
        return Value::of_bool(true);
    case Op::Or:
        for (const auto& a : e.args)
            if (eval(a).truthy())
                return Value::of_bool(true);
        return Value::of_bool(false);
    case Op::Implies: return Value::of_bool(!eval(e.args[0]).truthy() || eval(e.args[1]).truthy());
    case Op::Iff: return Value::of_bool(eval(e.args[0]).truthy() == eval(e.args[1]).truthy());
    case Op::Eq: return Value::of_bool(value_equal(eval(e.args[0]), eval(e.args[1])));
    case Op::Ne: return Value::of_bool(!value_equal(eval(e.args[0]), eval(e.args[1])));
    case Op::Lt: return Value::of_bool(scalar(0) < scalar(1));
    case Op::Le: return Value::of_bool(scalar(0) <= scalar(1));
    case Op::Gt: return Value::of_bool(scalar(0) > scalar(1));
    case Op::Ge: return Value::of_bool(scalar(0) >= scalar(1));
    case Op::In: {
        Value o = eval(e.args[0]);
        auto s = set(1);
        return Value::of_bool(!o.obj.is_null() && std::binary_search(s.begin(), s.end(), o.obj.index));
    }
    case Op::Subset: {
        auto a = set(0);
        auto b = set(1);
        return Value::of_bool(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
    case Op::Disjoint: {
        auto a = set(0);
        auto b = set(1);
        std::vector<int> both;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
        return Value::of_bool(both.empty());
    }
    case Op::Union: {
        auto a = set(0);
        auto b = set(1);
        std::vector<int> u;
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
        return Value::of_set(std::move(u));
    }
    case Op::Forall:
    case Op::Exists:
    case Op::ScalarForall: return quantifier(e);
    case Op::Old: {
        if (!pre_)
            throw EvalError("old() evaluated without a pre-state");
        const GlobalState* saved = cur_;
        cur_ = pre_;
        Value v = eval(e.args[0]);
        cur_ = saved;
        return v;
    }
    case Op::TimerFromInt: {
        std::int64_t v = scalar(0);
        return Value::of(v >= 1 ? v : 0);
    }
    case Op::TimerActive: return Value::of_bool(scalar(0) > 0);
    case Op::TimerCount: return Value::of(scalar(0));
    case Op::Havoc: throw EvalError("havoc marker has no value");
    case Op::Name:
    case Op::AllAny: throw EvalError("unresolved name '" + e.name + "'");
    }
    throw EvalError("unsupported expression");
}

Value evaluate(const ExprPtr& e, const Model& m, const Configuration& cfg, const GlobalState& s,
               const GlobalState* pre, ObjRef self)
{
    return Evaluator(m, cfg, s, pre, self).eval(e);
}

bool holds(const ExprPtr& e, const Model& m, const Configuration& cfg, const GlobalState& s, const GlobalState* pre,
           ObjRef self)
{
    return evaluate(e, m, cfg, s, pre, self).truthy();
}

} // namespace sra
