#include "sra/core/rewrite.hpp"
#include "sra/frontend/frontend.hpp"

#include <functional>
#include <set>

namespace sra {

namespace {

class Checker {
public:
    explicit Checker(const Model& m) : m_(m) {}

    std::vector<Diagnostic> run()
    {
        if (m_.classes.empty())
            d_.error("E015", "no class declarations", SourceSpan{m_.source_name, 0, 0, 1, 1});
        for (std::size_t c = 0; c < m_.classes.size(); ++c)
            check_class(static_cast<int>(c));
        check_scheduler();
        for (const auto& c : m_.constraints)
            check_constraint(c);
        return d_.all();
    }

private:
    const Model& m_;
    Diagnostics d_;

    const FieldDecl* field(int cls, int f) const
    {
        if (cls < 0 || f < 0)
            return nullptr;
        return &m_.classes[static_cast<std::size_t>(cls)].fields[static_cast<std::size_t>(f)];
    }

    static SourceSpan span_or(const SourceSpan& a, const SourceSpan& b) { return a.line ? a : b; }

    void no_old(const ExprPtr& e, const SourceSpan& fallback)
    {
        for_each_node(e, [&](const Expr& n) {
            if (n.op == Op::Old)
                d_.error("E013", "old() is only allowed in contracts", span_or(n.span, fallback));
        });
    }

    void no_ghost(const ExprPtr& e, const SourceSpan& fallback, const char* where)
    {
        for_each_node(e, [&](const Expr& n) {
            if (n.op != Op::Field)
                return;
            const auto* f = field(n.cls, n.field);
            if (f && f->kind == FieldKind::Set && f->ghost)
                d_.error("E019", "ghost set '" + f->name + "' used in " + where, span_or(n.span, fallback));
        });
    }

    void check_class(int ci)
    {
        const auto& c = m_.classes[static_cast<std::size_t>(ci)];
        if (c.location < 0) {
            d_.error("E021", "class " + c.name + " declares no 'var location' of an enum type", c.span);
        } else if (c.location_field().type.kind != TypeKind::Enum) {
            d_.error("E021", "location of class " + c.name + " must have an enum type", c.location_field().span);
        }
        for (const auto& f : c.fields) {
            if (f.kind == FieldKind::Var && !f.init)
                d_.warning("W014", "field '" + f.name + "' of class " + c.name + " has no initial value", f.span);
            if (f.init)
                no_old(f.init, f.span);
        }
        for (const auto& t : c.transitions) {
            check_guard(ci, t);
            check_effect(ci, t.effect, t.span);
        }
    }

    bool reads_event(const ExprPtr& e) const
    {
        bool found = false;
        for_each_node(e, [&](const Expr& n) {
            if (n.op == Op::Field) {
                const auto* f = field(n.cls, n.field);
                found = found || (f && f->kind == FieldKind::Event);
            }
        });
        return found;
    }

    bool own_event(int ci, const ExprPtr& e) const
    {
        if (e->op != Op::Field || e->args[0]->op != Op::Self || e->cls != ci)
            return false;
        const auto* f = field(e->cls, e->field);
        return f && f->kind == FieldKind::Event;
    }

    void check_guard(int ci, const Transition& t)
    {
        if (!t.guard)
            return;
        no_old(t.guard, t.span);
        no_ghost(t.guard, t.span, "a guard");
        std::vector<ExprPtr> conjuncts;
        if (t.guard->op == Op::And)
            conjuncts = t.guard->args;
        else
            conjuncts.push_back(t.guard);
        for (const auto& g : conjuncts) {
            if (own_event(ci, g))
                continue;
            if (reads_event(g))
                d_.error("E007",
                         "events may only appear in a guard as top-level conjuncts naming the instance's own events",
                         span_or(g->span, t.span));
        }
    }

    void check_target(int ci, int tc, int tf, const ExprPtr& value, bool havoc, const SourceSpan& sp)
    {
        const auto* f = field(tc, tf);
        if (!f)
            return;
        const auto& owner = m_.classes[static_cast<std::size_t>(tc)];
        if (tf == owner.location) {
            d_.error("E004", "location is not assignable; it changes only through transitions", sp);
            return;
        }
        switch (f->kind) {
        case FieldKind::Input:
            d_.error("E005", "input '" + f->name + "' is externally controlled and cannot be assigned", sp);
            return;
        case FieldKind::Event:
            if (havoc || !is_true(value))
                d_.error("E006", "event '" + f->name + "' may only be assigned true", sp);
            return;
        case FieldKind::Param:
        case FieldKind::Set:
        case FieldKind::Grounded:
            d_.error("E017", "'" + f->name + "' is immutable and cannot be assigned", sp);
            return;
        default: break;
        }
        (void)ci;
    }

    void check_effect_expr(const ExprPtr& e, const SourceSpan& sp)
    {
        if (!e)
            return;
        no_old(e, sp);
        no_ghost(e, sp, "an effect");
    }

    void check_effect(int ci, const StmtPtr& s, const SourceSpan& tsp)
    {
        for_each_stmt(s, [&](const Stmt& st) {
            SourceSpan sp = span_or(st.span, tsp);
            switch (st.kind) {
            case StmtKind::Assign:
            case StmtKind::Havoc:
                check_effect_expr(st.value, sp);
                if (st.cls != ci)
                    d_.error("E008", "only the instance's own fields can be assigned directly", sp);
                check_target(ci, st.cls, st.field, st.value, st.kind == StmtKind::Havoc, sp);
                break;
            case StmtKind::ForallAssign:
                check_effect_expr(st.range, sp);
                check_effect_expr(st.value, sp);
                if (st.cls == ci)
                    d_.error("E008",
                             "quantified assignment ranges over the declaring class; only other classes may be "
                             "targeted",
                             sp);
                if (!st.range || st.range->type.kind != TypeKind::Set)
                    d_.error("E012", "quantified assignment range must be a set", sp);
                check_target(ci, st.cls, st.field, st.value, false, sp);
                break;
            case StmtKind::FieldAssign: {
                check_effect_expr(st.value, sp);
                bool grounded = st.object && st.object->op == Op::Field && st.object->args[0]->op == Op::Self;
                if (grounded) {
                    const auto* f = field(st.object->cls, st.object->field);
                    grounded = f && f->kind == FieldKind::Grounded;
                }
                if (!grounded)
                    d_.error("E008", "field assignments through references require a grounded field", sp);
                if (st.cls == ci)
                    d_.error("E008", "assignment through a reference to the declaring class", sp);
                check_target(ci, st.cls, st.field, st.value, false, sp);
                break;
            }
            case StmtKind::If:
            case StmtKind::Assume:
            case StmtKind::Assert: check_effect_expr(st.cond, sp); break;
            default: break;
            }
        });
    }

    void check_scheduler_guard(const SchedTransition& t)
    {
        no_old(t.guard, t.span);
        for_each_node(t.guard, [&](const Expr& n) {
            SourceSpan sp = span_or(n.span, t.span);
            switch (n.op) {
            case Op::Field: {
                if (n.field == kExecutedField)
                    return;
                const auto* f = field(n.cls, n.field);
                if (f && (f->kind == FieldKind::Event || f->kind == FieldKind::Timer))
                    return;
                d_.error("E009",
                         "scheduler guards may reference only events, timers and executed flags, not '" + n.name +
                             "'",
                         sp);
                return;
            }
            case Op::Forall:
            case Op::Exists:
                if (n.args[0]->op != Op::AllSet)
                    d_.error("E009", "scheduler guards may only quantify over All-sets", sp);
                return;
            case Op::Phase: d_.error("E009", "scheduler guards may not read the phase", sp); return;
            case Op::Self: d_.error("E009", "scheduler guards have no 'self'", sp); return;
            default: return;
            }
        });
    }

    void check_scheduler()
    {
        const auto& s = m_.scheduler;
        const SourceSpan sp = s.span;
        if (s.phases.empty()) {
            d_.error("E016", "scheduler declares no phases", sp);
            return;
        }
        if (s.initial < 0)
            d_.error("E016", "scheduler declares no initial phase", sp);
        if (s.final_phase < 0)
            d_.error("E016", "scheduler declares no final phase", sp);
        if (s.initial >= 0 && s.initial == s.final_phase)
            d_.error("E016", "initial and final phase must differ", sp);
        for (const auto& t : s.transitions) {
            if (t.guard)
                check_scheduler_guard(t);
            if (t.from_index >= 0 && t.from_index == s.final_phase)
                d_.error("E016", "the final phase has only the implicit reset transition", t.span);
        }
        if (s.initial < 0)
            return;
        std::vector<bool> seen(s.phases.size(), false);
        std::vector<int> work{s.initial};
        seen[static_cast<std::size_t>(s.initial)] = true;
        while (!work.empty()) {
            int p = work.back();
            work.pop_back();
            for (const auto& t : s.transitions) {
                if (t.from_index == p && t.to_index >= 0 && !seen[static_cast<std::size_t>(t.to_index)]) {
                    seen[static_cast<std::size_t>(t.to_index)] = true;
                    work.push_back(t.to_index);
                }
            }
        }
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (!seen[i])
                d_.error("E016", "phase '" + s.phases[i] + "' is unreachable from the initial phase", sp);
    }

    void check_constraint(const Constraint& c)
    {
        no_old(c.expr, c.span);
        for_each_node(c.expr, [&](const Expr& n) {
            SourceSpan sp = span_or(n.span, c.span);
            if (n.op == Op::Phase) {
                d_.error("E010", "constraints may not read the phase", sp);
            } else if (n.op == Op::Field) {
                if (n.field == kExecutedField) {
                    d_.error("E010", "constraints may not read executed flags", sp);
                    return;
                }
                const auto* f = field(n.cls, n.field);
                if (f && f->is_mutable())
                    d_.error("E010", "constraints may mention only immutable symbols, not '" + f->name + "'", sp);
            }
        });
    }
};

} // namespace

std::vector<Diagnostic> check_model(const Model& m)
{
    return Checker(m).run();
}

} // namespace sra
