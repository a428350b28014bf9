#include "sra/core/rewrite.hpp"
#include "sra/vc/vcgen.hpp"

namespace sra {

namespace {

const ClassDecl& class_of(const Model& m, int cls)
{
    return m.classes.at(static_cast<std::size_t>(cls));
}

ExprPtr self_field(const Model& m, int cls, int field)
{
    return m.field_ref(m.self_ref(cls), cls, field);
}

std::set<std::string> names_in(std::initializer_list<ExprPtr> es)
{
    std::set<std::string> out;
    for (const auto& e : es)
        if (e)
            collect_var_names(e, out);
    return out;
}

// Rebuilds `e` bottom-up, replacing current-state reads of (cls, field) via
// `replace(obj)` where `obj` is the already rewritten object expression.
// Subterms under old() read the pre-state and are left untouched.
template <typename F>
ExprPtr replace_reads(const ExprPtr& e, int cls, int field, F&& replace)
{
    if (!e || e->op == Op::Old)
        return e;
    bool changed = false;
    std::vector<ExprPtr> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) {
        args.push_back(replace_reads(a, cls, field, replace));
        changed = changed || args.back() != a;
    }
    ExprPtr node = changed ? build::with_args(*e, std::move(args)) : e;
    if (node->op == Op::Field && node->cls == cls && node->field == field)
        return replace(node->args[0], node);
    return node;
}

} // namespace

ExprPtr wp(const Model& m, int cls, const StmtPtr& s, const ExprPtr& post)
{
    if (!s)
        return post;
    switch (s->kind) {
    case StmtKind::Skip: return post;
    case StmtKind::Seq: {
        ExprPtr q = post;
        for (auto it = s->body.rbegin(); it != s->body.rend(); ++it)
            q = wp(m, cls, *it, q);
        return q;
    }
    case StmtKind::Assign: {
        ExprPtr self = m.self_ref(cls);
        return replace_reads(post, s->cls, s->field, [&](const ExprPtr& obj, const ExprPtr& node) {
            if (obj->op == Op::Self)
                return s->value;
            return build::ite(build::eq(obj, self), s->value, node);
        });
    }
    case StmtKind::Havoc: {
        const auto& fd = class_of(m, s->cls).fields.at(static_cast<std::size_t>(s->field));
        std::string v = fresh_name("h", names_in({post}));
        ExprPtr hv = build::var(v, fd.type);
        ExprPtr self = m.self_ref(cls);
        ExprPtr body = replace_reads(post, s->cls, s->field, [&](const ExprPtr& obj, const ExprPtr& node) {
            if (obj->op == Op::Self)
                return hv;
            return build::ite(build::eq(obj, self), hv, node);
        });
        return build::scalar_forall(v, fd.type, body);
    }
    case StmtKind::If: {
        ExprPtr a = wp(m, cls, s->body.at(0), post);
        ExprPtr b = s->body.size() > 1 ? wp(m, cls, s->body[1], post) : post;
        return build::conj(build::implies(s->cond, a), build::implies(build::not_(s->cond), b));
    }
    case StmtKind::ForallAssign:
        return replace_reads(post, s->cls, s->field, [&](const ExprPtr& obj, const ExprPtr& node) {
            return build::ite(build::member(obj, s->range), substitute_var(s->value, s->var, obj), node);
        });
    case StmtKind::FieldAssign:
        return replace_reads(post, s->cls, s->field, [&](const ExprPtr& obj, const ExprPtr& node) {
            ExprPtr hit = build::eq(obj, s->object);
            if (s->object->type.nullable)
                hit = build::conj(build::ne(s->object, build::null_lit(s->object->type.name)), hit);
            return build::ite(hit, s->value, node);
        });
    case StmtKind::Assume: return build::implies(s->cond, post);
    case StmtKind::Assert: return build::conj(s->cond, post);
    }
    return post;
}

StmtPtr exec_body(const Model& m, int cls, int phase)
{
    const auto& c = class_of(m, cls);
    const auto& loc = c.location_field();
    // Built back to front: each transition's else branch is the rest of the chain.
    StmtPtr chain = build::skip();
    for (auto i = c.transitions.size(); i-- > 0;) {
        const auto& t = c.transitions[i];
        if (t.phase_index != phase)
            continue;
        ExprPtr enabled =
            build::conj(build::eq(self_field(m, cls, c.location), m.enum_value(loc.type.name, t.from_index)), t.guard);
        std::vector<StmtPtr> body{t.effect, build::assign(cls, c.location, loc.name, m.enum_value(loc.type.name, t.to_index))};
        for (int ev : t.events)
            body.push_back(build::assign(cls, ev, c.fields[static_cast<std::size_t>(ev)].name, build::false_()));
        chain = build::if_stmt(enabled, build::seq(std::move(body)), chain);
    }
    return build::seq({chain, build::assign(cls, kExecutedField, "executed", build::true_())});
}

StmtPtr init_body(const Model& m, int cls)
{
    const auto& c = class_of(m, cls);
    std::vector<StmtPtr> parts;
    for (std::size_t f = 0; f < c.fields.size(); ++f) {
        const auto& fd = c.fields[f];
        int fi = static_cast<int>(f);
        switch (fd.kind) {
        case FieldKind::Var:
            parts.push_back(fd.init ? build::assign(cls, fi, fd.name, fd.init) : build::havoc_stmt(cls, fi, fd.name));
            break;
        case FieldKind::Input: parts.push_back(build::havoc_stmt(cls, fi, fd.name)); break;
        case FieldKind::Event: parts.push_back(build::assign(cls, fi, fd.name, build::false_())); break;
        case FieldKind::Timer: parts.push_back(build::assign(cls, fi, fd.name, build::inactive())); break;
        default: break;
        }
    }
    parts.push_back(build::assign(cls, kExecutedField, "executed", build::false_()));
    return build::seq(std::move(parts));
}

StmtPtr tick_body(const Model& m, int cls)
{
    const auto& c = class_of(m, cls);
    std::vector<StmtPtr> parts;
    for (std::size_t f = 0; f < c.fields.size(); ++f) {
        if (c.fields[f].kind != FieldKind::Timer)
            continue;
        int fi = static_cast<int>(f);
        ExprPtr t = self_field(m, cls, fi);
        parts.push_back(build::assign(
            cls, fi, c.fields[f].name,
            build::timer_from_int(build::arith(Op::Sub, build::timer_count(t), build::int_lit(1)))));
    }
    return build::seq(std::move(parts));
}

namespace {

VerificationTask local_task(const Model& m, const Contract& k, const StmtPtr& body, const std::string& where)
{
    const auto& c = class_of(m, k.cls);
    ExprPtr w = wp(m, k.cls, body, k.formula);
    ExprPtr x = build::var("c", Type::object(c.name));
    VerificationTask t;
    t.kind = TaskKind::LocalContract;
    t.cls = c.name;
    t.phase = where;
    t.id = std::string(to_string(t.kind)) + "_" + c.name + "_" + where;
    t.formula = build::old(build::forall("c", x->type, build::all_set(c.name, k.cls), substitute_self(w, x)));
    return t;
}

} // namespace

std::vector<VerificationTask> build_local_contract_tasks(const Model& m, const ContractSource& contracts)
{
    auto pick = [&](Contract k) { return contracts ? contracts(m, k) : k; };
    std::vector<VerificationTask> out;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        int ci = static_cast<int>(c);
        out.push_back(local_task(m, pick(init_contract(m, ci)), init_body(m, ci), "init"));
        for (int p : self_loop_phases(m))
            out.push_back(local_task(m, pick(exec_contract(m, ci, p)), exec_body(m, ci, p),
                                     m.scheduler.phases[static_cast<std::size_t>(p)]));
        out.push_back(local_task(m, pick(tick_contract(m, ci)), tick_body(m, ci), "tick"));
    }
    return out;
}

} // namespace sra
