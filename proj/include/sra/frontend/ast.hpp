#pragma once

#include "sra/core/model.hpp"

#include <string>
#include <vector>

namespace sra {

// Unresolved parser output. Expressions use Op::Name / Op::AllAny and Field
// nodes with cls = -1; types are kept as source text.
struct RawType {
    std::string name; // Int, Bool, Event, Timer, Set, or a declared name
    std::string elem; // Set element class
    bool nullable = false;
    SourceSpan span;
};

struct RawField {
    FieldKind kind = FieldKind::Var;
    std::string name;
    RawType type;
    bool has_type = false;
    ExprPtr init;
    bool ghost = false;
    std::string from; // grounded source set
    SourceSpan span;
};

struct RawTransition {
    std::string name;
    std::string from;
    SourceSpan from_span;
    ExprPtr guard;
    std::string to;
    SourceSpan to_span;
    StmtPtr effect;
    std::string phase;
    SourceSpan phase_span;
    SourceSpan span;
};

struct RawClass {
    std::string name;
    std::vector<RawField> fields;
    std::vector<RawTransition> transitions;
    SourceSpan span;
};

struct RawSchedTransition {
    std::string from;
    std::string to;
    ExprPtr guard;
    SourceSpan span;
};

struct RawScheduler {
    bool present = false;
    std::vector<std::string> phases;
    std::vector<SourceSpan> phase_spans;
    std::string initial;
    std::string final_phase;
    SourceSpan initial_span;
    SourceSpan final_span;
    std::vector<RawSchedTransition> transitions;
    SourceSpan span;
};

struct RawModel {
    std::vector<EnumDecl> enums;
    std::vector<RawClass> classes;
    RawScheduler scheduler;
    std::vector<Constraint> constraints;
};

struct RawGPrime {
    std::string phase;
    std::string cls;
    ExprPtr expr;
    SourceSpan span;
};

struct RawInvariantFile {
    std::vector<Constraint> items;
    std::vector<RawGPrime> gprime;
};

struct RawSetBinding {
    std::string object;
    std::string field;
    bool is_set = false;
    std::vector<std::string> elems;
    ExprPtr literal;
    SourceSpan span;
};

struct RawConfiguration {
    struct Universe {
        std::string cls;
        std::vector<std::string> names;
        std::vector<SourceSpan> spans;
        SourceSpan span;
    };
    std::vector<Universe> universes;
    std::vector<RawSetBinding> bindings;
};

} // namespace sra
