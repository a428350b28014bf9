#include "sra/core/rewrite.hpp"

namespace sra {

namespace {

bool is_binder(Op op)
{
    return op == Op::Forall || op == Op::Exists || op == Op::ScalarForall;
}

std::size_t body_index(const Expr& e)
{
    return e.op == Op::ScalarForall ? 0 : 1;
}

void free_vars_into(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out)
{
    if (!e)
        return;
    if (e->op == Op::Var) {
        if (!bound.count(e->name))
            out.insert(e->name);
        return;
    }
    if (is_binder(e->op)) {
        std::size_t bi = body_index(*e);
        for (std::size_t i = 0; i < bi; ++i)
            free_vars_into(e->args[i], bound, out);
        bool inserted = bound.insert(e->name).second;
        free_vars_into(e->args[bi], bound, out);
        if (inserted)
            bound.erase(e->name);
        return;
    }
    for (const auto& a : e->args)
        free_vars_into(a, bound, out);
}

struct Ctx {
    const Rewriter& r;
    std::map<std::string, ExprPtr> vars;
    std::set<std::string> danger; // free variables of the replacements
};

ExprPtr apply_rw(const ExprPtr& e, Ctx& ctx);

ExprPtr finish(const ExprPtr& node, Ctx& ctx)
{
    if (ctx.r.hook) {
        if (auto rep = ctx.r.hook(node))
            return rep;
    }
    return node;
}

ExprPtr apply_binder(const ExprPtr& e, Ctx& ctx)
{
    std::size_t bi = body_index(*e);
    std::vector<ExprPtr> args(e->args.size());
    for (std::size_t i = 0; i < bi; ++i)
        args[i] = apply_rw(e->args[i], ctx);

    std::string name = e->name;
    ExprPtr body = e->args[bi];
    if (ctx.danger.count(name)) {
        std::set<std::string> avoid = ctx.danger;
        collect_var_names(body, avoid);
        for (const auto& [k, v] : ctx.vars)
            avoid.insert(k);
        std::string fresh = fresh_name(name, avoid);
        body = substitute_var(body, name, build::var(fresh, e->binder_type));
        name = fresh;
    }

    auto saved = ctx.vars;
    ctx.vars.erase(name);
    args[bi] = apply_rw(body, ctx);
    ctx.vars = std::move(saved);

    auto out = std::make_shared<Expr>(*e);
    out->name = name;
    out->args = std::move(args);
    return finish(out, ctx);
}

ExprPtr apply_rw(const ExprPtr& e, Ctx& ctx)
{
    if (!e)
        return e;
    switch (e->op) {
    case Op::Var: {
        auto it = ctx.vars.find(e->name);
        if (it != ctx.vars.end())
            return it->second;
        return finish(e, ctx);
    }
    case Op::Self:
        if (ctx.r.self)
            return ctx.r.self;
        return finish(e, ctx);
    default: break;
    }
    if (is_binder(e->op))
        return apply_binder(e, ctx);
    if (e->args.empty())
        return finish(e, ctx);
    std::vector<ExprPtr> args;
    args.reserve(e->args.size());
    bool changed = false;
    for (const auto& a : e->args) {
        args.push_back(apply_rw(a, ctx));
        changed = changed || args.back() != a;
    }
    ExprPtr node = changed ? build::with_args(*e, std::move(args)) : e;
    return finish(node, ctx);
}

} // namespace

ExprPtr rewrite(const ExprPtr& e, const Rewriter& r)
{
    Ctx ctx{r, r.vars, {}};
    for (const auto& [k, v] : r.vars)
        for (const auto& n : free_vars(v))
            ctx.danger.insert(n);
    if (r.self)
        for (const auto& n : free_vars(r.self))
            ctx.danger.insert(n);
    return apply_rw(e, ctx);
}

ExprPtr substitute_var(const ExprPtr& e, const std::string& name, const ExprPtr& value)
{
    Rewriter r;
    r.vars[name] = value;
    return rewrite(e, r);
}

ExprPtr substitute_self(const ExprPtr& e, const ExprPtr& value)
{
    Rewriter r;
    r.self = value;
    return rewrite(e, r);
}

std::set<std::string> free_vars(const ExprPtr& e)
{
    std::set<std::string> bound;
    std::set<std::string> out;
    free_vars_into(e, bound, out);
    return out;
}

void collect_var_names(const ExprPtr& e, std::set<std::string>& out)
{
    for_each_node(e, [&](const Expr& n) {
        if (n.op == Op::Var || is_binder(n.op))
            out.insert(n.name);
    });
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid)
{
    if (!avoid.count(base))
        return base;
    for (int i = 1;; ++i) {
        std::string n = base + "_" + std::to_string(i);
        if (!avoid.count(n))
            return n;
    }
}

bool contains_op(const ExprPtr& e, Op op)
{
    bool found = false;
    for_each_node(e, [&](const Expr& n) { found = found || n.op == op; });
    return found;
}

} // namespace sra
