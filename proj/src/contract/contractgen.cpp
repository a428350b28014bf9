#include "sra/contract/contractgen.hpp"

#include "sra/core/rewrite.hpp"
#include "sra/core/symbols.hpp"

#include <algorithm>

namespace sra {

namespace {

const ClassDecl& class_of(const Model& m, int cls)
{
    return m.classes.at(static_cast<std::size_t>(cls));
}

const FieldDecl& field_of(const Model& m, FieldRef f)
{
    return class_of(m, f.cls).fields.at(static_cast<std::size_t>(f.field));
}

ExprPtr self_field(const Model& m, int cls, int field)
{
    return m.field_ref(m.self_ref(cls), cls, field);
}

ExprPtr lambda_var(const SymbolicEntry& e)
{
    return build::var(e.var, e.var_type);
}

// Value of a function entry at object `obj`.
ExprPtr apply(const SymbolicEntry& e, const ExprPtr& obj)
{
    return substitute_var(e.value, e.var, obj);
}

bool is_state_read(const Model& m, const Expr& e)
{
    if (e.op == Op::Phase)
        return true;
    if (e.op != Op::Field)
        return false;
    if (e.field == kExecutedField)
        return true;
    return field_of(m, {e.cls, e.field}).is_mutable();
}

// post == value, splitting ite nodes whose branches contain the havoc marker.
ExprPtr post_equals(const ExprPtr& post, const ExprPtr& value)
{
    if (value->op == Op::Havoc)
        return build::true_();
    if (!contains_op(value, Op::Havoc))
        return build::eq(post, value);
    if (value->op == Op::Ite) {
        const auto& c = value->args[0];
        if (!contains_op(c, Op::Havoc))
            return build::conj(build::implies(c, post_equals(post, value->args[1])),
                               build::implies(build::not_(c), post_equals(post, value->args[2])));
    }
    return build::true_();
}

std::set<FieldRef> collect_targets(const StmtPtr& effect)
{
    return written_fields(effect);
}

} // namespace

const SymbolicEntry* SymbolicMap::find(FieldRef f) const
{
    auto it = entries.find(f);
    return it == entries.end() ? nullptr : &it->second;
}

SymbolicMap initial_map(const Model& m, int cls, const StmtPtr& effect)
{
    SymbolicMap map;
    std::set<std::string> names;
    for_each_stmt(effect, [&](const Stmt& s) {
        for (const auto& e : {s.value, s.range, s.object, s.cond})
            if (e)
                collect_var_names(e, names);
        if (!s.var.empty())
            names.insert(s.var);
    });
    for (FieldRef f : collect_targets(effect)) {
        SymbolicEntry e;
        e.field = f;
        if (f.cls == cls) {
            e.value = build::old(self_field(m, cls, f.field));
        } else {
            e.function = true;
            e.var = fresh_name("y", names);
            e.var_type = Type::object(class_of(m, f.cls).name);
            e.value = build::old(m.field_ref(lambda_var(e), f.cls, f.field));
        }
        map.entries.emplace(f, std::move(e));
    }
    return map;
}

ExprPtr subst(const Model& m, int cls, const ExprPtr& e, const SymbolicMap& map)
{
    Rewriter r;
    r.hook = [&](const ExprPtr& n) -> ExprPtr {
        if (n->op == Op::Old)
            return nullptr;
        if (n->op == Op::Field && n->field != kExecutedField) {
            if (const auto* entry = map.find({n->cls, n->field})) {
                if (!entry->function && n->args[0]->op == Op::Self && n->cls == cls)
                    return entry->value;
                if (entry->function)
                    return apply(*entry, n->args[0]);
            }
        }
        if (is_state_read(m, *n))
            return build::old(n);
        return nullptr;
    };
    return rewrite(e, r);
}

SymbolicMap transform(const Model& m, int cls, const StmtPtr& s, SymbolicMap map)
{
    if (!s)
        return map;
    switch (s->kind) {
    case StmtKind::Skip: return map;
    case StmtKind::Seq:
        for (const auto& b : s->body)
            map = transform(m, cls, b, std::move(map));
        return map;
    case StmtKind::Assign: {
        ExprPtr v = subst(m, cls, s->value, map);
        map.entries.at({s->cls, s->field}).value = v;
        return map;
    }
    case StmtKind::Havoc:
        map.entries.at({s->cls, s->field}).value = build::havoc(field_of(m, {s->cls, s->field}).type);
        return map;
    case StmtKind::If: {
        ExprPtr b = subst(m, cls, s->cond, map);
        SymbolicMap m1 = transform(m, cls, s->body.at(0), map);
        SymbolicMap m2 = s->body.size() > 1 ? transform(m, cls, s->body[1], map) : map;
        for (auto& [f, entry] : map.entries)
            entry.value = build::ite(b, m1.entries.at(f).value, m2.entries.at(f).value);
        return map;
    }
    case StmtKind::ForallAssign: {
        auto& entry = map.entries.at({s->cls, s->field});
        ExprPtr y = lambda_var(entry);
        ExprPtr range = subst(m, cls, s->range, map);
        ExprPtr value = subst(m, cls, substitute_var(s->value, s->var, y), map);
        entry.value = build::ite(build::member(y, range), value, entry.value);
        return map;
    }
    case StmtKind::FieldAssign: {
        auto& entry = map.entries.at({s->cls, s->field});
        ExprPtr y = lambda_var(entry);
        ExprPtr obj = subst(m, cls, s->object, map);
        ExprPtr value = subst(m, cls, s->value, map);
        entry.value = build::ite(build::eq(y, obj), value, entry.value);
        return map;
    }
    case StmtKind::Assume:
    case StmtKind::Assert:
        throw ContractError("effects containing assume or assert are not supported by contract generation (line " +
                            std::to_string(s->span.line) + ")");
    }
    return map;
}

SymbolicMap transform_effect(const Model& m, int cls, const StmtPtr& effect)
{
    return transform(m, cls, effect, initial_map(m, cls, effect));
}

ExprPtr effect_formula(const Model& m, int cls, const SymbolicMap& map)
{
    std::vector<ExprPtr> parts;
    for (const auto& [f, entry] : map.entries) {
        if (!entry.function) {
            parts.push_back(post_equals(self_field(m, cls, f.field), entry.value));
            continue;
        }
        ExprPtr y = lambda_var(entry);
        ExprPtr body = post_equals(m.field_ref(y, f.cls, f.field), entry.value);
        if (!is_true(body))
            parts.push_back(build::forall(entry.var, entry.var_type, build::all_set(class_of(m, f.cls).name, f.cls), body));
    }
    return build::conj(parts);
}

ExprPtr extended_guard(const Model& m, int cls, int t)
{
    const auto& c = class_of(m, cls);
    const auto& tr = c.transitions.at(static_cast<std::size_t>(t));
    std::vector<ExprPtr> parts{tr.guard};
    for (int k = 0; k < t; ++k) {
        const auto& prev = c.transitions[static_cast<std::size_t>(k)];
        if (prev.phase_index == tr.phase_index && prev.from_index == tr.from_index)
            parts.push_back(build::not_(prev.guard));
    }
    return build::conj(parts);
}

namespace {

ExprPtr location_is(const Model& m, int cls, int ordinal)
{
    const auto& c = class_of(m, cls);
    return build::eq(self_field(m, cls, c.location), m.enum_value(c.location_field().type.name, ordinal));
}

} // namespace

ExprPtr unchanged(const Model& m, int cls, int phase, const std::set<FieldRef>& written)
{
    const auto& c = class_of(m, cls);
    std::vector<ExprPtr> parts;
    for (std::size_t f = 0; f < c.fields.size(); ++f) {
        FieldRef ref{cls, static_cast<int>(f)};
        if (!c.fields[f].is_mutable() || written.count(ref))
            continue;
        ExprPtr post = self_field(m, cls, ref.field);
        parts.push_back(build::eq(post, build::old(post)));
    }
    for (FieldRef ref : write_footprint(m, cls, phase)) {
        if (ref.cls == cls || ref.field == kExecutedField || written.count(ref))
            continue;
        const auto& other = class_of(m, ref.cls);
        std::set<std::string> avoid;
        ExprPtr x = build::var(fresh_name("x", avoid), Type::object(other.name));
        ExprPtr post = m.field_ref(x, ref.cls, ref.field);
        parts.push_back(build::forall(x->name, x->type, build::all_set(other.name, ref.cls), build::eq(post, build::old(post))));
    }
    return build::conj(parts);
}

ExprPtr transition_formula(const Model& m, int cls, int t)
{
    const auto& c = class_of(m, cls);
    const auto& tr = c.transitions.at(static_cast<std::size_t>(t));
    SymbolicMap map = transform_effect(m, cls, tr.effect);
    std::set<FieldRef> written{{cls, c.location}};
    for (int ev : tr.events) {
        map.entries.erase({cls, ev});
        written.insert({cls, ev});
    }
    for (const auto& [f, entry] : map.entries)
        written.insert(f);

    std::vector<ExprPtr> parts;
    parts.push_back(build::old(build::conj(location_is(m, cls, tr.from_index), extended_guard(m, cls, t))));
    parts.push_back(effect_formula(m, cls, map));
    parts.push_back(location_is(m, cls, tr.to_index));
    parts.push_back(build::executed(m.self_ref(cls), cls));
    for (int ev : tr.events)
        parts.push_back(build::not_(self_field(m, cls, ev)));
    parts.push_back(unchanged(m, cls, tr.phase_index, written));
    return build::conj(parts);
}

ExprPtr stutter_formula(const Model& m, int cls, int phase)
{
    const auto& c = class_of(m, cls);
    std::vector<ExprPtr> parts;
    parts.push_back(unchanged(m, cls, phase, {}));
    parts.push_back(build::executed(m.self_ref(cls), cls));
    for (const auto& tr : c.transitions)
        if (tr.phase_index == phase)
            parts.push_back(build::not_(build::old(build::conj(location_is(m, cls, tr.from_index), tr.guard))));
    return build::conj(parts);
}

Contract exec_contract(const Model& m, int cls, int phase)
{
    Contract k;
    k.kind = Contract::Kind::Exec;
    k.cls = cls;
    k.phase = phase;
    const auto& c = class_of(m, cls);
    std::vector<ExprPtr> ds;
    for (std::size_t t = 0; t < c.transitions.size(); ++t) {
        if (c.transitions[t].phase_index != phase)
            continue;
        k.disjuncts.emplace_back(static_cast<int>(t), transition_formula(m, cls, static_cast<int>(t)));
        ds.push_back(k.disjuncts.back().second);
    }
    k.disjuncts.emplace_back(-1, stutter_formula(m, cls, phase));
    ds.push_back(k.disjuncts.back().second);
    k.formula = build::disj(ds);
    return k;
}

Contract init_contract(const Model& m, int cls)
{
    Contract k;
    k.kind = Contract::Kind::Init;
    k.cls = cls;
    const auto& c = class_of(m, cls);
    std::vector<ExprPtr> parts;
    for (std::size_t f = 0; f < c.fields.size(); ++f) {
        const auto& fd = c.fields[f];
        ExprPtr post = self_field(m, cls, static_cast<int>(f));
        switch (fd.kind) {
        case FieldKind::Var:
            if (fd.init)
                parts.push_back(build::eq(post, fd.init));
            break;
        case FieldKind::Event: parts.push_back(build::not_(post)); break;
        case FieldKind::Timer: parts.push_back(build::eq(post, build::inactive())); break;
        default: break;
        }
    }
    parts.push_back(build::not_(build::executed(m.self_ref(cls), cls)));
    k.formula = build::conj(parts);
    return k;
}

Contract tick_contract(const Model& m, int cls)
{
    Contract k;
    k.kind = Contract::Kind::Tick;
    k.cls = cls;
    const auto& c = class_of(m, cls);
    std::vector<ExprPtr> parts;
    std::set<FieldRef> timers;
    for (std::size_t f = 0; f < c.fields.size(); ++f) {
        if (c.fields[f].kind != FieldKind::Timer)
            continue;
        timers.insert({cls, static_cast<int>(f)});
        ExprPtr t = self_field(m, cls, static_cast<int>(f));
        ExprPtr count = build::timer_count(t);
        ExprPtr old_count = build::old(count);
        parts.push_back(build::implies(build::cmp(Op::Gt, old_count, build::int_lit(1)),
                                       build::eq(count, build::arith(Op::Sub, old_count, build::int_lit(1)))));
        parts.push_back(
            build::implies(build::eq(old_count, build::int_lit(1)), build::eq(t, build::inactive())));
        parts.push_back(
            build::implies(build::eq(build::old(t), build::inactive()), build::eq(t, build::inactive())));
    }
    for (std::size_t f = 0; f < c.fields.size(); ++f) {
        const auto& fd = c.fields[f];
        if (!fd.is_mutable() || fd.kind == FieldKind::Timer)
            continue;
        ExprPtr post = self_field(m, cls, static_cast<int>(f));
        parts.push_back(build::eq(post, build::old(post)));
    }
    k.formula = build::conj(parts);
    return k;
}

std::vector<int> self_loop_phases(const Model& m)
{
    std::vector<int> out;
    for (std::size_t p = 0; p < m.scheduler.phases.size(); ++p)
        for (const auto& t : m.scheduler.transitions)
            if (t.self_loop() && t.from_index == static_cast<int>(p)) {
                out.push_back(static_cast<int>(p));
                break;
            }
    return out;
}

std::vector<Contract> all_contracts(const Model& m)
{
    std::vector<Contract> out;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        int ci = static_cast<int>(c);
        out.push_back(init_contract(m, ci));
        for (int p : self_loop_phases(m))
            out.push_back(exec_contract(m, ci, p));
        out.push_back(tick_contract(m, ci));
    }
    return out;
}

std::string contract_name(const Model& m, const Contract& c)
{
    const std::string& cls = class_of(m, c.cls).name;
    switch (c.kind) {
    case Contract::Kind::Init: return "I_" + cls;
    case Contract::Kind::Tick: return "K_" + cls;
    case Contract::Kind::Exec:
        return "T_" + cls + "(" + m.scheduler.phases.at(static_cast<std::size_t>(c.phase)) + ")";
    }
    return cls;
}

} // namespace sra
