#include "sra/core/rewrite.hpp"
#include "sra/core/symbols.hpp"
#include "sra/vc/vcgen.hpp"

#include <set>

namespace sra {

const char* to_string(TaskKind k)
{
    switch (k) {
    case TaskKind::Establishment: return "establishment";
    case TaskKind::Stability: return "stability";
    case TaskKind::SelfLoopPreservation: return "selfloop";
    case TaskKind::Init: return "init";
    case TaskKind::PhaseNonFinal: return "phase";
    case TaskKind::PhaseFinal: return "phasefinal";
    case TaskKind::Reset: return "reset";
    case TaskKind::PropertyImplication: return "property";
    case TaskKind::LocalContract: return "local";
    case TaskKind::GroundingLemma: return "lemma";
    }
    return "task";
}

namespace {

const ClassDecl& class_of(const Model& m, int cls)
{
    return m.classes.at(static_cast<std::size_t>(cls));
}

const std::string& phase_name(const Model& m, int p)
{
    return m.scheduler.phases.at(static_cast<std::size_t>(p));
}

ExprPtr phase_is(const Model& m, int p)
{
    return build::eq(build::phase(), m.phase_literal(p));
}

ExprPtr inst_var(const Model& m, const std::string& name, int cls)
{
    return build::var(name, Type::object(class_of(m, cls).name));
}

// forall x in All_C : body(x)
template <typename F>
ExprPtr for_all(const Model& m, int cls, const std::string& name, F&& body)
{
    ExprPtr x = inst_var(m, name, cls);
    return build::forall(name, x->type, build::all_set(class_of(m, cls).name, cls), body(x));
}

ExprPtr unchanged_field(const Model& m, const ExprPtr& x, int cls, int field)
{
    ExprPtr post = m.field_ref(x, cls, field);
    return build::eq(post, build::old(post));
}

// Every instance of every class: the listed per-instance conjuncts.
template <typename F>
ExprPtr every_instance(const Model& m, F&& per_instance)
{
    std::vector<ExprPtr> parts;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        int ci = static_cast<int>(c);
        parts.push_back(for_all(m, ci, "x", [&](const ExprPtr& x) { return per_instance(ci, x); }));
    }
    return build::conj(parts);
}

VerificationTask task(TaskKind k, const std::string& cls, const std::string& phase, ExprPtr f)
{
    VerificationTask t;
    t.kind = k;
    t.cls = cls;
    t.phase = phase;
    t.formula = std::move(f);
    t.id = std::string(to_string(k)) + "_" + cls + "_" + phase;
    return t;
}

// Disjunction of the guards of every scheduler self-loop at `p`.
ExprPtr self_loop_guard(const Model& m, int p)
{
    std::vector<ExprPtr> gs;
    for (const auto& t : m.scheduler.transitions)
        if (t.from_index == p && t.self_loop())
            gs.push_back(t.guard);
    return build::disj(gs);
}

} // namespace

ExprPtr instantiate(const ExprPtr& class_formula, const ExprPtr& inst)
{
    return substitute_self(class_formula, inst);
}

ExprPtr local_condition(const Model& m, const GlobalSpec& spec, int phase, int cls)
{
    auto it = spec.gprime.find({phase, cls});
    if (it != spec.gprime.end())
        return it->second;
    return build::not_(build::executed(m.self_ref(cls), cls));
}

ExprPtr step_frame(const Model& m, int cls, int phase, const ExprPtr& self_var)
{
    std::set<FieldRef> footprint = write_footprint(m, cls, phase);
    std::vector<ExprPtr> parts;
    const auto& own = class_of(m, cls);
    parts.push_back(for_all(m, cls, "x", [&](const ExprPtr& x) {
        std::vector<ExprPtr> same;
        for (int f : own.mutable_fields)
            same.push_back(unchanged_field(m, x, cls, f));
        same.push_back(unchanged_field(m, x, cls, kExecutedField));
        return build::implies(build::ne(x, self_var), build::conj(same));
    }));
    for (std::size_t d = 0; d < m.classes.size(); ++d) {
        int di = static_cast<int>(d);
        if (di == cls)
            continue;
        std::vector<int> fields;
        for (int f : m.classes[d].mutable_fields)
            if (!footprint.count({di, f}))
                fields.push_back(f);
        fields.push_back(kExecutedField);
        parts.push_back(for_all(m, di, "x", [&](const ExprPtr& x) {
            std::vector<ExprPtr> same;
            for (int f : fields)
                same.push_back(unchanged_field(m, x, di, f));
            return build::conj(same);
        }));
    }
    return build::conj(parts);
}

std::vector<VerificationTask> build_checks(const Model& m, const GlobalSpec& spec)
{
    if (!spec.inv)
        throw VcError("global checks need an invariant");
    for (const auto& [key, g] : spec.gprime)
        if (contains_op(g, Op::Old))
            throw VcError("local condition for phase " + phase_name(m, key.first) + " uses old()");
    const auto& sched = m.scheduler;
    const ExprPtr& inv = spec.inv;
    std::vector<VerificationTask> out;

    for (int p : self_loop_phases(m)) {
        ExprPtr guard = self_loop_guard(m, p);
        const std::string& pn = phase_name(m, p);
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
            int ci = static_cast<int>(c);
            const std::string& cn = m.classes[c].name;
            ExprPtr g = local_condition(m, spec, p, ci);
            out.push_back(task(TaskKind::Establishment, cn, pn,
                               build::implies(build::conj({inv, phase_is(m, p), guard}),
                                              for_all(m, ci, "c", [&](const ExprPtr& x) { return instantiate(g, x); }))));
        }
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
            int ci = static_cast<int>(c);
            ExprPtr g = local_condition(m, spec, p, ci);
            for (std::size_t d = 0; d < m.classes.size(); ++d) {
                int di = static_cast<int>(d);
                ExprPtr td = exec_contract(m, di, p).formula;
                ExprPtr f = for_all(m, ci, "c", [&](const ExprPtr& cx) {
                    return for_all(m, di, "d", [&](const ExprPtr& dx) {
                        std::vector<ExprPtr> pre{build::old(build::conj({inv, phase_is(m, p), instantiate(g, cx)})),
                                                 instantiate(td, dx), build::executed(dx, di),
                                                 step_frame(m, di, p, dx), phase_is(m, p)};
                        if (ci == di)
                            pre.insert(pre.begin(), build::ne(cx, dx));
                        return build::implies(build::conj(pre), instantiate(g, cx));
                    });
                });
                out.push_back(task(TaskKind::Stability, m.classes[c].name + "-" + m.classes[d].name,
                                   phase_name(m, p), f));
            }
        }
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
            int ci = static_cast<int>(c);
            ExprPtr g = local_condition(m, spec, p, ci);
            ExprPtr tc = exec_contract(m, ci, p).formula;
            ExprPtr f = for_all(m, ci, "c", [&](const ExprPtr& cx) {
                return build::implies(build::conj({build::old(build::conj({inv, phase_is(m, p), instantiate(g, cx)})),
                                                   instantiate(tc, cx), build::executed(cx, ci),
                                                   step_frame(m, ci, p, cx), phase_is(m, p)}),
                                      inv);
            });
            out.push_back(task(TaskKind::SelfLoopPreservation, m.classes[c].name, phase_name(m, p), f));
        }
    }

    if (sched.initial >= 0) {
        ExprPtr inits = every_instance(m, [&](int ci, const ExprPtr& x) {
            return build::conj(instantiate(init_contract(m, ci).formula, x), build::not_(build::executed(x, ci)));
        });
        out.push_back(task(TaskKind::Init, "all", phase_name(m, sched.initial),
                           build::implies(build::conj(inits, phase_is(m, sched.initial)), inv)));
    }

    for (const auto& t : sched.transitions) {
        if (t.self_loop() || t.from_index < 0 || t.to_index < 0)
            continue;
        const bool final = t.to_index == sched.final_phase;
        ExprPtr step = every_instance(m, [&](int ci, const ExprPtr& x) {
            std::vector<ExprPtr> parts{build::not_(build::executed(x, ci))};
            if (final) {
                parts.push_back(instantiate(tick_contract(m, ci).formula, x));
            } else {
                for (int f : m.classes[static_cast<std::size_t>(ci)].mutable_fields)
                    parts.push_back(unchanged_field(m, x, ci, f));
            }
            return build::conj(parts);
        });
        ExprPtr f = build::implies(
            build::conj({build::old(build::conj({inv, phase_is(m, t.from_index), t.guard})), phase_is(m, t.to_index), step}),
            inv);
        out.push_back(task(final ? TaskKind::PhaseFinal : TaskKind::PhaseNonFinal, "all",
                           phase_name(m, t.from_index) + "-" + phase_name(m, t.to_index), f));
    }

    if (sched.final_phase >= 0 && sched.initial >= 0) {
        ExprPtr input_change = every_instance(m, [&](int ci, const ExprPtr& x) {
            std::vector<ExprPtr> parts;
            const auto& cls = m.classes[static_cast<std::size_t>(ci)];
            for (int f : cls.mutable_fields)
                if (cls.fields[static_cast<std::size_t>(f)].kind != FieldKind::Input)
                    parts.push_back(unchanged_field(m, x, ci, f));
            parts.push_back(unchanged_field(m, x, ci, kExecutedField));
            return build::conj(parts);
        });
        ExprPtr f = build::implies(build::conj({build::old(build::conj(inv, phase_is(m, sched.final_phase))),
                                                input_change, phase_is(m, sched.initial)}),
                                   inv);
        out.push_back(task(TaskKind::Reset, "all",
                           phase_name(m, sched.final_phase) + "-" + phase_name(m, sched.initial), f));
    }
    if (spec.prop) {
        int at = spec.prop_phase >= 0 ? spec.prop_phase : sched.final_phase;
        if (at < 0)
            throw VcError("property phase is undefined");
        out.push_back(task(TaskKind::PropertyImplication, "all", phase_name(m, at),
                           build::implies(build::conj(inv, phase_is(m, at)), spec.prop)));
    }
    return out;
}

} // namespace sra
