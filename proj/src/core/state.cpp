#include "sra/core/state.hpp"

#include <algorithm>
#include <stdexcept>

namespace sra {

Value Value::of_set(std::vector<int> s)
{
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    Value v;
    v.kind = Kind::Set;
    v.set = std::move(s);
    return v;
}

Configuration Configuration::empty_for(const Model& m)
{
    Configuration c;
    c.instances.resize(m.classes.size());
    c.fixed.resize(m.classes.size());
    return c;
}

std::optional<ObjRef> Configuration::find(const std::string& name) const
{
    for (std::size_t c = 0; c < instances.size(); ++c)
        for (std::size_t i = 0; i < instances[c].size(); ++i)
            if (instances[c][i] == name)
                return ObjRef{static_cast<int>(c), static_cast<int>(i)};
    return std::nullopt;
}

const std::string& Configuration::name_of(ObjRef o) const
{
    static const std::string null_name = "null";
    if (o.is_null())
        return null_name;
    return instances.at(static_cast<std::size_t>(o.cls)).at(static_cast<std::size_t>(o.index));
}

std::size_t Configuration::total_instances() const
{
    std::size_t n = 0;
    for (const auto& v : instances)
        n += v.size();
    return n;
}

const Value& Configuration::get(ObjRef o, int field) const
{
    return fixed.at(static_cast<std::size_t>(o.cls))
        .at(static_cast<std::size_t>(o.index))
        .at(static_cast<std::size_t>(field));
}

void Configuration::set(ObjRef o, int field, Value v)
{
    auto& row = fixed.at(static_cast<std::size_t>(o.cls)).at(static_cast<std::size_t>(o.index));
    if (row.size() <= static_cast<std::size_t>(field))
        row.resize(static_cast<std::size_t>(field) + 1);
    row[static_cast<std::size_t>(field)] = std::move(v);
}

void Configuration::derive_grounded(const Model& m)
{
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const auto& cls = m.classes[c];
        fixed[c].resize(instances[c].size());
        for (auto& row : fixed[c])
            row.resize(cls.fields.size());
        for (std::size_t f = 0; f < cls.fields.size(); ++f) {
            const auto& fd = cls.fields[f];
            if (fd.kind != FieldKind::Grounded)
                continue;
            int elem = m.class_index(fd.type.name);
            for (auto& row : fixed[c]) {
                const auto& src = row[static_cast<std::size_t>(fd.source_set)].set;
                ObjRef o{elem, src.size() == 1 ? src.front() : -1};
                row[f] = Value::of_obj(o);
            }
        }
    }
}

GlobalState GlobalState::zero(const Model& m, const Configuration& cfg)
{
    GlobalState s;
    s.values.resize(m.classes.size());
    s.executed.resize(m.classes.size());
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        std::size_t n = cfg.instances[c].size();
        s.values[c].assign(n * m.classes[c].mutable_count(), 0);
        s.executed[c].assign(n, 0);
    }
    s.phase = m.scheduler.initial < 0 ? 0 : m.scheduler.initial;
    return s;
}

std::int64_t GlobalState::get(const Model& m, ObjRef o, int field) const
{
    if (field == kExecutedField)
        return is_executed(o) ? 1 : 0;
    const auto& cls = m.classes[static_cast<std::size_t>(o.cls)];
    int slot = cls.fields[static_cast<std::size_t>(field)].slot;
    if (slot < 0)
        throw std::logic_error("field " + cls.fields[static_cast<std::size_t>(field)].name + " is not mutable");
    return values[static_cast<std::size_t>(o.cls)]
                 [static_cast<std::size_t>(o.index) * cls.mutable_count() + static_cast<std::size_t>(slot)];
}

void GlobalState::set(const Model& m, ObjRef o, int field, std::int64_t v)
{
    if (field == kExecutedField) {
        set_executed(o, v != 0);
        return;
    }
    const auto& cls = m.classes[static_cast<std::size_t>(o.cls)];
    int slot = cls.fields[static_cast<std::size_t>(field)].slot;
    if (slot < 0)
        throw std::logic_error("field " + cls.fields[static_cast<std::size_t>(field)].name + " is not mutable");
    values[static_cast<std::size_t>(o.cls)]
          [static_cast<std::size_t>(o.index) * cls.mutable_count() + static_cast<std::size_t>(slot)] = v;
}

bool GlobalState::is_executed(ObjRef o) const
{
    return executed[static_cast<std::size_t>(o.cls)][static_cast<std::size_t>(o.index)] != 0;
}

void GlobalState::set_executed(ObjRef o, bool b)
{
    executed[static_cast<std::size_t>(o.cls)][static_cast<std::size_t>(o.index)] = b ? 1 : 0;
}

std::size_t GlobalStateHash::operator()(const GlobalState& s) const
{
    std::size_t h = static_cast<std::size_t>(s.phase) * 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::uint64_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& row : s.values)
        for (auto v : row)
            mix(static_cast<std::uint64_t>(v));
    for (const auto& row : s.executed)
        for (auto v : row)
            mix(v);
    return h;
}

std::string format_scalar(const Model& m, const Type& t, std::int64_t v)
{
    switch (t.kind) {
    case TypeKind::Bool: return v ? "true" : "false";
    case TypeKind::Timer: return v > 0 ? std::to_string(v) : "inactive";
    case TypeKind::Enum: {
        auto vals = m.enum_values(t);
        if (v >= 0 && static_cast<std::size_t>(v) < vals.size())
            return vals[static_cast<std::size_t>(v)];
        return t.name + "#" + std::to_string(v);
    }
    default: return std::to_string(v);
    }
}

} // namespace sra
