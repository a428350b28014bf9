#pragma once

#include "sra/core/expr.hpp"
#include "sra/core/stmt.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sra {

enum class FieldKind : std::uint8_t { Var, Input, Event, Timer, Param, Set, Grounded };

const char* to_string(FieldKind k);

struct FieldDecl {
    std::string name;
    FieldKind kind = FieldKind::Var;
    Type type;
    ExprPtr init;          // declared initial value (Var only, optional)
    bool ghost = false;    // Set retained only for specifications after grounding
    int source_set = -1;   // Grounded: index of the set field it replaces
    int slot = -1;         // position in the per-instance mutable vector
    SourceSpan span;

    bool is_mutable() const
    {
        return kind == FieldKind::Var || kind == FieldKind::Input || kind == FieldKind::Event ||
               kind == FieldKind::Timer;
    }
    bool is_immutable() const { return !is_mutable(); }
};

struct Transition {
    std::string name;
    std::string from;
    int from_index = -1; // ordinal in the location enum
    ExprPtr guard;
    std::string to;
    int to_index = -1;
    StmtPtr effect;
    std::string phase;
    int phase_index = -1;
    int decl_index = 0;      // priority: lower fires first
    std::vector<int> events; // own event fields consumed by the guard
    SourceSpan span;
};

struct ClassDecl {
    std::string name;
    std::vector<FieldDecl> fields;
    int location = -1; // index of the `location` field
    std::vector<Transition> transitions;
    std::vector<int> mutable_fields; // field index per slot
    SourceSpan span;

    int find_field(const std::string& n) const;
    const FieldDecl& location_field() const { return fields.at(static_cast<std::size_t>(location)); }
    std::size_t mutable_count() const { return mutable_fields.size(); }
};

struct EnumDecl {
    std::string name;
    std::vector<std::string> values;
    SourceSpan span;

    int find(const std::string& v) const;
};

struct SchedTransition {
    std::string from;
    std::string to;
    int from_index = -1;
    int to_index = -1;
    ExprPtr guard;
    SourceSpan span;

    bool self_loop() const { return from_index == to_index; }
};

struct SchedulerDecl {
    std::vector<std::string> phases;
    int initial = -1;
    int final_phase = -1;
    std::vector<SchedTransition> transitions;
    SourceSpan span;

    int find_phase(const std::string& p) const;
};

struct Constraint {
    std::string label;
    ExprPtr expr;
    SourceSpan span;
};

struct FieldRef {
    int cls = -1;
    int field = -1; // kExecutedField for the executed flag

    auto operator<=>(const FieldRef&) const = default;
};

// A configurable SRA system: classes, scheduler and configuration
// constraints. Produced by the frontend; immutable afterwards.
struct Model {
    std::vector<EnumDecl> enums;
    std::vector<ClassDecl> classes;
    SchedulerDecl scheduler;
    std::vector<Constraint> constraints;
    std::string source_name;

    int class_index(const std::string& n) const;
    const EnumDecl* find_enum(const std::string& n) const;
    // Resolves an enum literal (including phase names) to its enum name and ordinal.
    std::optional<std::pair<std::string, int>> enum_literal(const std::string& lit) const;
    std::vector<std::string> enum_values(const Type& t) const;

    ExprPtr field_ref(ExprPtr obj, int cls, int field) const;
    ExprPtr self_ref(int cls) const;
    ExprPtr phase_literal(int phase) const;
    ExprPtr enum_value(const std::string& enum_name, int ordinal) const;
    std::string field_name(FieldRef f) const;

    // Recomputes mutable slots; called after construction or transformation.
    void finalize();
};

bool structurally_equal(const Model& a, const Model& b);

} // namespace sra
