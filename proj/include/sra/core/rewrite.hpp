#pragma once

#include "sra/core/expr.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>

namespace sra {

// Capture-avoiding rewriting. `vars` replaces free bound-variable
// occurrences, `self` replaces the Self node, and `hook` is applied bottom-up
// to every rebuilt node (return nullptr to keep the node). Quantifier binders
// that would capture a free variable of any replacement are renamed.
struct Rewriter {
    std::map<std::string, ExprPtr> vars;
    ExprPtr self;
    std::function<ExprPtr(const ExprPtr&)> hook;
};

ExprPtr rewrite(const ExprPtr& e, const Rewriter& r);

ExprPtr substitute_var(const ExprPtr& e, const std::string& name, const ExprPtr& value);
ExprPtr substitute_self(const ExprPtr& e, const ExprPtr& value);

std::set<std::string> free_vars(const ExprPtr& e);
// Names of every bound and free variable in e.
void collect_var_names(const ExprPtr& e, std::set<std::string>& out);

// A name derived from `base` that is not in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

bool contains_op(const ExprPtr& e, Op op);

// Pre-order visit of every node.
template <typename F>
void for_each_node(const ExprPtr& e, F&& f)
{
    if (!e)
        return;
    f(*e);
    for (const auto& a : e->args)
        for_each_node(a, f);
}

} // namespace sra
