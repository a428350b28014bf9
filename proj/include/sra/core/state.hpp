#pragma once

#include "sra/core/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sra {

struct ObjRef {
    int cls = -1;
    int index = -1; // -1 is null

    bool is_null() const { return index < 0; }
    auto operator<=>(const ObjRef&) const = default;
};

// Runtime value. Scalars (Int, Bool as 0/1, enum ordinal, timer count with 0
// meaning inactive) use `scalar`; objects use `obj`; sets are sorted,
// duplicate-free instance indices of the element class.
struct Value {
    enum class Kind : std::uint8_t { Scalar, Object, Set } kind = Kind::Scalar;
    std::int64_t scalar = 0;
    ObjRef obj;
    std::vector<int> set;

    static Value of(std::int64_t v) { return {Kind::Scalar, v, {}, {}}; }
    static Value of_bool(bool b) { return of(b ? 1 : 0); }
    static Value of_obj(ObjRef o) { return {Kind::Object, 0, o, {}}; }
    static Value of_set(std::vector<int> s);

    bool truthy() const { return scalar != 0; }
    bool operator==(const Value&) const = default;
};

// Immutable part of one system instance: universes per class and the
// interpretation of set, parameter and grounded fields.
struct Configuration {
    std::vector<std::vector<std::string>> instances;   // per class
    std::vector<std::vector<std::vector<Value>>> fixed; // [class][instance][field]; mutable fields unused

    static Configuration empty_for(const Model& m);
    std::optional<ObjRef> find(const std::string& name) const;
    const std::string& name_of(ObjRef o) const;
    std::size_t total_instances() const;
    const Value& get(ObjRef o, int field) const;
    void set(ObjRef o, int field, Value v);
    // Recomputes grounded fields from their source sets (unique member or null).
    void derive_grounded(const Model& m);
};

// Mutable snapshot: per-instance values of every mutable field, executed
// flags and the scheduler phase.
struct GlobalState {
    std::vector<std::vector<std::int64_t>> values;  // [class][instance * mutable_count + slot]
    std::vector<std::vector<std::uint8_t>> executed; // [class][instance]
    int phase = 0;

    static GlobalState zero(const Model& m, const Configuration& cfg);
    std::int64_t get(const Model& m, ObjRef o, int field) const;
    void set(const Model& m, ObjRef o, int field, std::int64_t v);
    bool is_executed(ObjRef o) const;
    void set_executed(ObjRef o, bool b);
    bool operator==(const GlobalState&) const = default;
};

struct GlobalStateHash {
    std::size_t operator()(const GlobalState& s) const;
};

// Prints a scalar of type `t` in surface syntax.
std::string format_scalar(const Model& m, const Type& t, std::int64_t v);

} // namespace sra
