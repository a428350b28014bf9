#pragma once

#include <string>

namespace sra {

enum class TypeKind { Unknown, Int, Bool, Enum, Timer, Object, Set };

// Value type of an expression. Events are Bool-valued; the scheduler phase is
// the enum named kPhaseEnum. Object types may be nullable only for grounded
// fields.
struct Type {
    TypeKind kind = TypeKind::Unknown;
    std::string name; // enum name (Enum) or element class name (Object, Set)
    bool nullable = false;

    static Type integer() { return {TypeKind::Int, {}, false}; }
    static Type boolean() { return {TypeKind::Bool, {}, false}; }
    static Type timer() { return {TypeKind::Timer, {}, false}; }
    static Type enumeration(std::string n) { return {TypeKind::Enum, std::move(n), false}; }
    static Type object(std::string cls, bool nullable = false) { return {TypeKind::Object, std::move(cls), nullable}; }
    static Type set_of(std::string cls) { return {TypeKind::Set, std::move(cls), false}; }

    bool is(TypeKind k) const { return kind == k; }
    bool operator==(const Type&) const = default;
};

inline constexpr const char* kPhaseEnum = "PhaseEnum";

std::string to_string(const Type& t);

} // namespace sra
