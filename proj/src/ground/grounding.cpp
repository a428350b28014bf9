#include "sra/ground/grounding.hpp"

#include "sra/core/rewrite.hpp"
#include "sra/sim/simulator.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace sra {

const GroundedSet* GroundingPlan::find(int cls, int set_field) const
{
    for (const auto& s : sets)
        if (s.cls == cls && s.set_field == set_field)
            return &s;
    return nullptr;
}

namespace {

struct Bounds {
    std::optional<std::int64_t> lower;
    std::optional<std::int64_t> upper;
    std::string text;
};

// |c.s| op k under `forall c in All_C`, either operand order.
void scan_bound(const Model& m, const Expr& e, const std::string& var, int cls,
                std::map<std::pair<int, int>, Bounds>& out)
{
    Op op = e.op;
    if (op != Op::Eq && op != Op::Le && op != Op::Lt && op != Op::Ge && op != Op::Gt)
        return;
    ExprPtr card = e.args[0];
    ExprPtr lit = e.args[1];
    if (card->op != Op::Card) {
        std::swap(card, lit);
        switch (op) {
        case Op::Le: op = Op::Ge; break;
        case Op::Lt: op = Op::Gt; break;
        case Op::Ge: op = Op::Le; break;
        case Op::Gt: op = Op::Lt; break;
        default: break;
        }
    }
    if (card->op != Op::Card || lit->op != Op::IntLit)
        return;
    const Expr& set = *card->args[0];
    if (set.op != Op::Field || set.cls != cls || set.args[0]->op != Op::Var || set.args[0]->name != var)
        return;
    const auto& fd = m.classes[static_cast<std::size_t>(cls)].fields[static_cast<std::size_t>(set.field)];
    if (fd.kind != FieldKind::Set)
        return;
    auto& b = out[{cls, set.field}];
    std::int64_t k = lit->value;
    auto tighten_upper = [&](std::int64_t u) { b.upper = b.upper ? std::min(*b.upper, u) : u; };
    auto tighten_lower = [&](std::int64_t l) { b.lower = b.lower ? std::max(*b.lower, l) : l; };
    switch (op) {
    case Op::Eq: tighten_upper(k); tighten_lower(k); break;
    case Op::Le: tighten_upper(k); break;
    case Op::Lt: tighten_upper(k - 1); break;
    case Op::Ge: tighten_lower(k); break;
    case Op::Gt: tighten_lower(k + 1); break;
    default: break;
    }
    if (b.text.empty())
        b.text = m.classes[static_cast<std::size_t>(cls)].name + "." + fd.name;
}

void scan_constraint(const Model& m, const ExprPtr& e, std::map<std::pair<int, int>, Bounds>& out)
{
    if (e->op == Op::And) {
        for (const auto& a : e->args)
            scan_constraint(m, a, out);
        return;
    }
    if (e->op != Op::Forall || e->args[0]->op != Op::AllSet)
        return;
    int cls = e->args[0]->cls;
    std::vector<ExprPtr> body{e->args[1]};
    if (body[0]->op == Op::And)
        body = body[0]->args;
    for (const auto& b : body)
        scan_bound(m, *b, e->name, cls, out);
}

std::string grounded_name(const ClassDecl& c, const std::string& set)
{
    std::string base = set.size() > 1 && set.back() == 's' ? set.substr(0, set.size() - 1) : set + "Obj";
    std::string name = base;
    for (int i = 2; c.find_field(name) >= 0; ++i)
        name = base + std::to_string(i);
    return name;
}

// --- formula grounding -----------------------------------------------------------

class Grounder {
public:
    Grounder(const GroundingPlan& p, const GroundOptions& o) : plan_(p), opts_(o) {}

    ExprPtr run(const ExprPtr& e)
    {
        if (!e)
            return e;
        switch (e->op) {
        case Op::Forall:
        case Op::Exists: return quantifier(e);
        case Op::In: {
            ExprPtr set = e->args[1];
            if (!has_grounded(set))
                break;
            return member(run(e->args[0]), parts(set));
        }
        case Op::Subset:
            if (!has_grounded(e->args[0]) && !has_grounded(e->args[1]))
                break;
            return subset(parts(e->args[0]), parts(e->args[1]));
        case Op::Disjoint:
            if (!has_grounded(e->args[0]) && !has_grounded(e->args[1]))
                break;
            return disjoint(parts(e->args[0]), parts(e->args[1]));
        case Op::Eq:
        case Op::Ne:
            if (e->args[0]->type.is(TypeKind::Set) && (has_grounded(e->args[0]) || has_grounded(e->args[1]))) {
                auto a = parts(e->args[0]);
                auto b = parts(e->args[1]);
                ExprPtr same = build::conj(subset(a, b), subset(b, a));
                return e->op == Op::Eq ? same : build::not_(same);
            }
            if (auto c = card_comparison(e))
                return c;
            break;
        case Op::Le:
        case Op::Lt:
        case Op::Ge:
        case Op::Gt:
            if (auto c = card_comparison(e))
                return c;
            break;
        case Op::Card:
            if (const Part* g = single_grounded(e->args[0]))
                return nullable(*g) ? build::ite(not_null(*g), build::int_lit(1), build::int_lit(0))
                                    : build::int_lit(1);
            break;
        default: break;
        }
        std::vector<ExprPtr> args;
        args.reserve(e->args.size());
        bool changed = false;
        for (const auto& a : e->args) {
            args.push_back(run(a));
            changed = changed || args.back() != a;
        }
        if (!changed)
            return e;
        if (e->op == Op::And)
            return build::conj(std::move(args));
        if (e->op == Op::Or)
            return build::disj(std::move(args));
        return build::with_args(*e, std::move(args));
    }

private:
    // A union operand: either a grounded reference or a plain set expression.
    struct Part {
        ExprPtr expr;
        const GroundedSet* grounded = nullptr;
    };

    const GroundingPlan& plan_;
    const GroundOptions& opts_;

    const GroundedSet* grounded_of(const ExprPtr& set) const
    {
        if (set->op != Op::Field)
            return nullptr;
        return plan_.find(set->cls, set->field);
    }

    bool has_grounded(const ExprPtr& set) const
    {
        if (set->op == Op::Union)
            return has_grounded(set->args[0]) || has_grounded(set->args[1]);
        return grounded_of(set) != nullptr;
    }

    void flatten(const ExprPtr& set, std::vector<Part>& out)
    {
        if (set->op == Op::Union && has_grounded(set)) {
            flatten(set->args[0], out);
            flatten(set->args[1], out);
            return;
        }
        if (const GroundedSet* g = grounded_of(set)) {
            ExprPtr obj = run(set->args[0]);
            out.push_back({build::field(obj, g->cls, g->grounded_field, g->grounded_name,
                                        Type::object(g->elem, g->nullable)),
                           g});
            return;
        }
        out.push_back({run(set), nullptr});
    }

    std::vector<Part> parts(const ExprPtr& set)
    {
        std::vector<Part> out;
        flatten(set, out);
        return out;
    }

    const Part* single_grounded(const ExprPtr& set)
    {
        if (!grounded_of(set))
            return nullptr;
        scratch_ = parts(set);
        return &scratch_.front();
    }
    std::vector<Part> scratch_;

    bool nullable(const Part& p) const { return p.grounded && p.grounded->nullable && !opts_.drop_null_guard; }

    static ExprPtr not_null(const Part& p) { return build::ne(p.expr, build::null_lit(p.grounded->elem)); }

    // g != null => body (universal) or g != null && body (existential).
    ExprPtr guarded(const Part& g, ExprPtr body, bool universal) const
    {
        if (!nullable(g))
            return body;
        return universal ? build::implies(not_null(g), std::move(body)) : build::conj(not_null(g), std::move(body));
    }

    ExprPtr quantifier(const ExprPtr& e)
    {
        const bool universal = e->op == Op::Forall;
        ExprPtr body = run(e->args[1]);
        if (!has_grounded(e->args[0])) {
            ExprPtr range = run(e->args[0]);
            if (range == e->args[0] && body == e->args[1])
                return e;
            return build::with_args(*e, {range, body});
        }
        std::vector<ExprPtr> out;
        std::vector<Part> plain;
        for (auto& p : parts(e->args[0])) {
            if (p.grounded)
                out.push_back(guarded(p, substitute_var(body, e->name, p.expr), universal));
            else
                plain.push_back(p);
        }
        if (!plain.empty()) {
            ExprPtr range = union_of(plain);
            out.push_back(universal ? build::forall(e->name, e->binder_type, range, body)
                                    : build::exists(e->name, e->binder_type, range, body));
        }
        return universal ? build::conj(out) : build::disj(out);
    }

    static ExprPtr union_of(const std::vector<Part>& plain)
    {
        ExprPtr u = plain.front().expr;
        for (std::size_t i = 1; i < plain.size(); ++i)
            u = build::set_union(u, plain[i].expr);
        return u;
    }

    // y in (parts)
    ExprPtr member(const ExprPtr& y, const std::vector<Part>& set)
    {
        std::vector<ExprPtr> out;
        std::vector<Part> plain;
        for (const auto& p : set) {
            if (p.grounded)
                out.push_back(build::eq(y, p.expr));
            else
                plain.push_back(p);
        }
        if (!plain.empty())
            out.push_back(build::member(y, union_of(plain)));
        return build::disj(out);
    }

    ExprPtr subset(const std::vector<Part>& a, const std::vector<Part>& b)
    {
        bool b_grounded = false;
        for (const auto& p : b)
            b_grounded = b_grounded || p.grounded;
        std::vector<ExprPtr> out;
        for (const auto& p : a) {
            if (p.grounded) {
                out.push_back(guarded(p, member(p.expr, b), true));
            } else if (b_grounded) {
                std::set<std::string> avoid;
                for (const auto& q : b)
                    collect_var_names(q.expr, avoid);
                collect_var_names(p.expr, avoid);
                std::string y = fresh_name("y", avoid);
                Type yt = Type::object(p.expr->type.name);
                out.push_back(build::forall(y, yt, p.expr, member(build::var(y, yt), b)));
            } else {
                out.push_back(build::binary(Op::Subset, p.expr, union_of(b), Type::boolean()));
            }
        }
        return build::conj(out);
    }

    ExprPtr disjoint(const std::vector<Part>& a, const std::vector<Part>& b)
    {
        std::vector<ExprPtr> out;
        for (const auto& p : a) {
            for (const auto& q : b) {
                if (p.grounded)
                    out.push_back(build::not_(guarded(p, member(p.expr, {q}), false)));
                else if (q.grounded)
                    out.push_back(build::not_(guarded(q, member(q.expr, {p}), false)));
                else
                    out.push_back(build::binary(Op::Disjoint, p.expr, q.expr, Type::boolean()));
            }
        }
        return build::conj(out);
    }

    static bool compare(Op op, std::int64_t a, std::int64_t b)
    {
        switch (op) {
        case Op::Eq: return a == b;
        case Op::Ne: return a != b;
        case Op::Lt: return a < b;
        case Op::Le: return a <= b;
        case Op::Gt: return a > b;
        case Op::Ge: return a >= b;
        default: return false;
        }
    }

    // |g| op k with k a literal: decided per null case.
    ExprPtr card_comparison(const ExprPtr& e)
    {
        ExprPtr card = e->args[0];
        ExprPtr lit = e->args[1];
        bool card_left = true;
        if (card->op != Op::Card) {
            std::swap(card, lit);
            card_left = false;
        }
        if (card->op != Op::Card || lit->op != Op::IntLit)
            return nullptr;
        const Part* g = single_grounded(card->args[0]);
        if (!g)
            return nullptr;
        auto holds = [&](std::int64_t n) {
            return card_left ? compare(e->op, n, lit->value) : compare(e->op, lit->value, n);
        };
        bool at1 = holds(1);
        if (!nullable(*g))
            return build::bool_lit(at1);
        bool at0 = holds(0);
        if (at0 == at1)
            return build::bool_lit(at1);
        return at1 ? not_null(*g) : build::eq(g->expr, build::null_lit(g->grounded->elem));
    }
};

bool stmt_mentions_set(const StmtPtr& s, const GroundedSet& g);

bool expr_mentions_set(const ExprPtr& e, const GroundedSet& g)
{
    bool found = false;
    for_each_node(e, [&](const Expr& n) {
        found = found || (n.op == Op::Field && n.cls == g.cls && n.field == g.set_field);
    });
    return found;
}

bool stmt_mentions_set(const StmtPtr& s, const GroundedSet& g)
{
    bool found = false;
    for_each_stmt(s, [&](const Stmt& st) {
        for (const auto& e : {st.range, st.object, st.value, st.cond})
            found = found || expr_mentions_set(e, g);
    });
    return found;
}

StmtPtr ground_stmt(const StmtPtr& s, const GroundingPlan& p)
{
    if (!s)
        return s;
    auto g = [&](const ExprPtr& e) { return ground_formula(e, p); };
    auto copy = std::make_shared<Stmt>(*s);
    switch (s->kind) {
    case StmtKind::ForallAssign: {
        ExprPtr range = s->range;
        const GroundedSet* gs = range->op == Op::Field ? p.find(range->cls, range->field) : nullptr;
        if (gs) {
            ExprPtr obj = build::field(g(range->args[0]), gs->cls, gs->grounded_field, gs->grounded_name,
                                       Type::object(gs->elem, gs->nullable));
            ExprPtr value = substitute_var(g(s->value), s->var, obj);
            StmtPtr fa = build::field_assign(obj, s->cls, s->field, s->target, value);
            if (!gs->nullable)
                return fa;
            return build::if_stmt(build::ne(obj, build::null_lit(gs->elem)), fa, build::skip());
        }
        copy->range = g(s->range);
        copy->value = g(s->value);
        return copy;
    }
    default: break;
    }
    copy->object = g(s->object);
    copy->value = g(s->value);
    copy->cond = g(s->cond);
    copy->range = g(s->range);
    for (auto& b : copy->body)
        b = ground_stmt(b, p);
    return copy;
}

VerificationTask lemma_task(const std::string& cls, const std::string& name, ExprPtr f)
{
    VerificationTask t;
    t.kind = TaskKind::GroundingLemma;
    t.cls = cls;
    t.phase = name;
    t.formula = std::move(f);
    std::string stem;
    for (char ch : name)
        stem += std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ? ch : '-';
    while (!stem.empty() && stem.back() == '-')
        stem.pop_back();
    t.id = std::string(to_string(TaskKind::GroundingLemma)) + "_" + cls + "_" + stem;
    return t;
}

} // namespace

GroundingPlan plan(const Model& m)
{
    std::map<std::pair<int, int>, Bounds> bounds;
    for (const auto& c : m.constraints)
        scan_constraint(m, c.expr, bounds);
    GroundingPlan p;
    std::map<int, int> appended;
    for (const auto& [key, b] : bounds) {
        auto [cls, field] = key;
        const ClassDecl& c = m.classes[static_cast<std::size_t>(cls)];
        bool already = false;
        for (const auto& f : c.fields)
            already = already || (f.kind == FieldKind::Grounded && f.source_set == field);
        if (already || !b.upper)
            continue;
        if (*b.upper >= 2) {
            p.rejected.push_back(b.text + ": |s| <= " + std::to_string(*b.upper) +
                                 " is not grounded (only bounds k <= 1 are supported)");
            continue;
        }
        GroundedSet g;
        g.cls = cls;
        g.set_field = field;
        g.set_name = c.fields[static_cast<std::size_t>(field)].name;
        g.elem = c.fields[static_cast<std::size_t>(field)].type.name;
        g.nullable = !(b.lower && *b.lower >= 1);
        g.grounded_field = static_cast<int>(c.fields.size()) + appended[cls]++;
        g.grounded_name = grounded_name(c, g.set_name);
        for (const auto& prev : p.sets)
            if (prev.cls == cls && prev.grounded_name == g.grounded_name)
                g.grounded_name += std::to_string(g.grounded_field);
        p.sets.push_back(std::move(g));
    }
    return p;
}

ExprPtr ground_formula(const ExprPtr& e, const GroundingPlan& p, const GroundOptions& opts)
{
    if (p.empty() || !e)
        return e;
    return Grounder(p, opts).run(e);
}

bool mentions_grounded(const ExprPtr& e, const GroundingPlan& p)
{
    bool found = false;
    for_each_node(e, [&](const Expr& n) {
        if (n.op != Op::Field)
            return;
        for (const auto& g : p.sets)
            found = found || (n.cls == g.cls && n.field == g.grounded_field);
    });
    return found;
}

Model ground_statements(const Model& m, const GroundingPlan& p)
{
    if (p.empty())
        return m;
    Model out = m;
    for (const auto& g : p.sets) {
        auto& c = out.classes[static_cast<std::size_t>(g.cls)];
        if (static_cast<int>(c.fields.size()) != g.grounded_field)
            throw GroundingError("grounding plan does not match model class " + c.name);
        FieldDecl f;
        f.name = g.grounded_name;
        f.kind = FieldKind::Grounded;
        f.type = Type::object(g.elem, g.nullable);
        f.source_set = g.set_field;
        f.span = c.fields[static_cast<std::size_t>(g.set_field)].span;
        c.fields.push_back(std::move(f));
    }
    for (auto& c : out.classes) {
        for (auto& t : c.transitions) {
            t.guard = ground_formula(t.guard, p);
            t.effect = ground_stmt(t.effect, p);
        }
    }
    for (auto& t : out.scheduler.transitions)
        t.guard = ground_formula(t.guard, p);
    for (const auto& g : p.sets) {
        bool used = false;
        for (const auto& c : out.classes)
            for (const auto& t : c.transitions)
                used = used || expr_mentions_set(t.guard, g) || stmt_mentions_set(t.effect, g);
        if (!used)
            out.classes[static_cast<std::size_t>(g.cls)].fields[static_cast<std::size_t>(g.set_field)].ghost = true;
    }
    out.finalize();
    return out;
}

Configuration ground_configuration(const Model& grounded, Configuration cfg)
{
    cfg.derive_grounded(grounded);
    return cfg;
}

std::vector<LemmaSpec> collect_lemma_specs(const Model& original, const Model& grounded, const GroundingPlan& p,
                                           const std::vector<Constraint>& extra)
{
    std::vector<LemmaSpec> out;
    auto add = [&](LemmaSpec s) {
        if (!s.grounded)
            s.grounded = ground_formula(s.original, p);
        if (mentions_grounded(s.grounded, p))
            out.push_back(std::move(s));
    };
    auto before = all_contracts(original);
    auto after = all_contracts(grounded);
    for (std::size_t i = 0; i < before.size() && i < after.size(); ++i)
        add({contract_name(original, before[i]), before[i].cls, before[i].formula, after[i].formula});
    const auto& st = original.scheduler.transitions;
    for (std::size_t i = 0; i < st.size(); ++i)
        add({"guard_" + st[i].from + "-" + st[i].to, -1, st[i].guard, grounded.scheduler.transitions[i].guard});
    for (const auto& c : extra)
        add({c.label, -1, c.expr, nullptr});
    return out;
}

std::vector<VerificationTask> equivalence_lemmas(const Model& grounded, const GroundingPlan& p,
                                                 const std::vector<LemmaSpec>& specs, const GroundOptions& opts)
{
    // |c.s| == 0 => c.g == null, and |c.s| == 1 => {c.g} == c.s
    std::vector<ExprPtr> links;
    for (const auto& g : p.sets) {
        const auto& c = grounded.classes[static_cast<std::size_t>(g.cls)];
        ExprPtr x = build::var("c", Type::object(c.name));
        ExprPtr set = grounded.field_ref(x, g.cls, g.set_field);
        ExprPtr obj = grounded.field_ref(x, g.cls, g.grounded_field);
        ExprPtr y = build::var("y", Type::object(g.elem));
        ExprPtr single = build::conj(build::member(obj, set), build::forall("y", y->type, set, build::eq(y, obj)));
        links.push_back(build::forall(
            "c", x->type, build::all_set(c.name, g.cls),
            build::conj(build::implies(build::eq(build::card(set), build::int_lit(0)),
                                       build::eq(obj, build::null_lit(g.elem))),
                        build::implies(build::eq(build::card(set), build::int_lit(1)), single))));
    }
    ExprPtr linking = build::conj(links);

    std::vector<VerificationTask> out;
    for (const auto& s : specs) {
        ExprPtr gp = s.grounded && !opts.drop_null_guard ? s.grounded : ground_formula(s.original, p, opts);
        ExprPtr eq = build::iff(gp, s.original);
        std::string cls = "all";
        if (s.cls >= 0) {
            const auto& c = grounded.classes[static_cast<std::size_t>(s.cls)];
            cls = c.name;
            ExprPtr x = build::var("c", Type::object(c.name));
            eq = build::forall("c", x->type, build::all_set(c.name, s.cls), substitute_self(eq, x));
        }
        out.push_back(lemma_task(cls, s.name, build::implies(linking, eq)));
    }
    return out;
}

} // namespace sra

namespace sra {

std::string compare_runs(const Model& original, const Model& grounded, const Configuration& cfg,
                         std::uint64_t seed, int cycles)
{
    Configuration gcfg = ground_configuration(grounded, cfg);
    RunOptions opts;
    opts.cycles = cycles;
    RandomInputs in_a(seed);
    RandomInputs in_b(seed);
    RunResult a = run(original, cfg, OrderPolicy::seeded(seed), in_a, {}, opts, random_havoc(seed));
    RunResult b = run(grounded, gcfg, OrderPolicy::seeded(seed), in_b, {}, opts, random_havoc(seed));
    if (a.error != b.error)
        return "run errors differ: '" + a.error + "' vs '" + b.error + "'";
    std::size_t n = std::min(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& x = a.trace[i];
        const auto& y = b.trace[i];
        if (!(x.state == y.state) || x.label.kind != y.label.kind || x.label.order != y.label.order ||
            x.label.fired != y.label.fired)
            return "step " + std::to_string(i) + ": " + trace_step_json(original, cfg, x) + " vs " +
                   trace_step_json(grounded, gcfg, y);
    }
    if (a.trace.size() != b.trace.size())
        return "trace lengths differ: " + std::to_string(a.trace.size()) + " vs " + std::to_string(b.trace.size());
    return {};
}

} // namespace sra
