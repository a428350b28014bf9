#include "sra/core/model.hpp"

#include <stdexcept>

namespace sra {

const char* to_string(FieldKind k)
{
    switch (k) {
    case FieldKind::Var: return "var";
    case FieldKind::Input: return "input";
    case FieldKind::Event: return "event";
    case FieldKind::Timer: return "timer";
    case FieldKind::Param: return "param";
    case FieldKind::Set: return "set";
    case FieldKind::Grounded: return "grounded";
    }
    return "?";
}

int ClassDecl::find_field(const std::string& n) const
{
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i].name == n)
            return static_cast<int>(i);
    return -1;
}

int EnumDecl::find(const std::string& v) const
{
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == v)
            return static_cast<int>(i);
    return -1;
}

int SchedulerDecl::find_phase(const std::string& p) const
{
    for (std::size_t i = 0; i < phases.size(); ++i)
        if (phases[i] == p)
            return static_cast<int>(i);
    return -1;
}

int Model::class_index(const std::string& n) const
{
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].name == n)
            return static_cast<int>(i);
    return -1;
}

const EnumDecl* Model::find_enum(const std::string& n) const
{
    for (const auto& e : enums)
        if (e.name == n)
            return &e;
    return nullptr;
}

std::optional<std::pair<std::string, int>> Model::enum_literal(const std::string& lit) const
{
    for (const auto& e : enums) {
        int i = e.find(lit);
        if (i >= 0)
            return std::make_pair(e.name, i);
    }
    int p = scheduler.find_phase(lit);
    if (p >= 0)
        return std::make_pair(std::string(kPhaseEnum), p);
    return std::nullopt;
}

std::vector<std::string> Model::enum_values(const Type& t) const
{
    if (t.name == kPhaseEnum)
        return scheduler.phases;
    if (const auto* e = find_enum(t.name))
        return e->values;
    return {};
}

ExprPtr Model::field_ref(ExprPtr obj, int cls, int field) const
{
    if (field == kExecutedField)
        return build::executed(std::move(obj), cls);
    const auto& f = classes.at(static_cast<std::size_t>(cls)).fields.at(static_cast<std::size_t>(field));
    return build::field(std::move(obj), cls, field, f.name, f.type);
}

ExprPtr Model::self_ref(int cls) const
{
    return build::self(classes.at(static_cast<std::size_t>(cls)).name, cls);
}

ExprPtr Model::phase_literal(int phase) const
{
    return build::enum_lit(kPhaseEnum, scheduler.phases.at(static_cast<std::size_t>(phase)), phase);
}

ExprPtr Model::enum_value(const std::string& enum_name, int ordinal) const
{
    if (enum_name == kPhaseEnum)
        return phase_literal(ordinal);
    const auto* e = find_enum(enum_name);
    if (!e)
        throw std::logic_error("unknown enum " + enum_name);
    return build::enum_lit(enum_name, e->values.at(static_cast<std::size_t>(ordinal)), ordinal);
}

std::string Model::field_name(FieldRef f) const
{
    const auto& c = classes.at(static_cast<std::size_t>(f.cls));
    if (f.field == kExecutedField)
        return c.name + ".executed";
    return c.name + "." + c.fields.at(static_cast<std::size_t>(f.field)).name;
}

void Model::finalize()
{
    for (auto& c : classes) {
        c.mutable_fields.clear();
        c.location = -1;
        for (std::size_t i = 0; i < c.fields.size(); ++i) {
            auto& f = c.fields[i];
            if (f.is_mutable()) {
                f.slot = static_cast<int>(c.mutable_fields.size());
                c.mutable_fields.push_back(static_cast<int>(i));
            } else {
                f.slot = -1;
            }
            if (f.name == "location" && f.kind == FieldKind::Var)
                c.location = static_cast<int>(i);
        }
    }
}

namespace {

bool same_field(const FieldDecl& a, const FieldDecl& b)
{
    return a.name == b.name && a.kind == b.kind && a.type == b.type && a.ghost == b.ghost &&
           a.source_set == b.source_set && structurally_equal(a.init, b.init);
}

bool same_transition(const Transition& a, const Transition& b)
{
    return a.name == b.name && a.from == b.from && a.to == b.to && a.phase == b.phase &&
           a.decl_index == b.decl_index && a.events == b.events && structurally_equal(a.guard, b.guard) &&
           structurally_equal(a.effect, b.effect);
}

} // namespace

bool structurally_equal(const Model& a, const Model& b)
{
    if (a.enums.size() != b.enums.size() || a.classes.size() != b.classes.size() ||
        a.constraints.size() != b.constraints.size())
        return false;
    for (std::size_t i = 0; i < a.enums.size(); ++i)
        if (a.enums[i].name != b.enums[i].name || a.enums[i].values != b.enums[i].values)
            return false;
    for (std::size_t i = 0; i < a.classes.size(); ++i) {
        const auto& x = a.classes[i];
        const auto& y = b.classes[i];
        if (x.name != y.name || x.fields.size() != y.fields.size() || x.transitions.size() != y.transitions.size())
            return false;
        for (std::size_t j = 0; j < x.fields.size(); ++j)
            if (!same_field(x.fields[j], y.fields[j]))
                return false;
        for (std::size_t j = 0; j < x.transitions.size(); ++j)
            if (!same_transition(x.transitions[j], y.transitions[j]))
                return false;
    }
    const auto& s = a.scheduler;
    const auto& t = b.scheduler;
    if (s.phases != t.phases || s.initial != t.initial || s.final_phase != t.final_phase ||
        s.transitions.size() != t.transitions.size())
        return false;
    for (std::size_t i = 0; i < s.transitions.size(); ++i)
        if (s.transitions[i].from != t.transitions[i].from || s.transitions[i].to != t.transitions[i].to ||
            !structurally_equal(s.transitions[i].guard, t.transitions[i].guard))
            return false;
    for (std::size_t i = 0; i < a.constraints.size(); ++i)
        if (a.constraints[i].label != b.constraints[i].label ||
            !structurally_equal(a.constraints[i].expr, b.constraints[i].expr))
            return false;
    return true;
}

} // namespace sra
