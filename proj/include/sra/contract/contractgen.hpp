#pragma once

#include "sra/core/model.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sra {

struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One symbolic-map entry. Scalar entries describe a field of the executing
// instance; function entries describe a field of every instance of another
// class as a function of the bound variable `var`. Values read the pre-state
// only (every state symbol sits under old()). A Havoc node stands for the
// unconstrained value; it may occur as an ite branch.
struct SymbolicEntry {
    FieldRef field;
    bool function = false;
    std::string var;
    Type var_type;
    ExprPtr value;
};

struct SymbolicMap {
    std::map<FieldRef, SymbolicEntry> entries;

    const SymbolicEntry* find(FieldRef f) const;
};

// Domain of the map for `effect`: own assigned fields map to their old value,
// fields written through quantified or reference assignments to
// \y. old(y.w).
SymbolicMap initial_map(const Model& m, int cls, const StmtPtr& effect);

// Forward symbolic execution of `s` starting from `map`. Rejects assume and
// assert.
SymbolicMap transform(const Model& m, int cls, const StmtPtr& s, SymbolicMap map);
SymbolicMap transform_effect(const Model& m, int cls, const StmtPtr& effect);

// Replaces reads of mapped fields by their map values and wraps every other
// state read in old().
ExprPtr subst(const Model& m, int cls, const ExprPtr& e, const SymbolicMap& map);

// post == value for every entry; entries that are (or branch to) the havoc
// marker contribute nothing for the havocked case.
ExprPtr effect_formula(const Model& m, int cls, const SymbolicMap& map);

// Guard of transition `t` conjoined with the negations of every earlier
// transition of the same phase and start location.
ExprPtr extended_guard(const Model& m, int cls, int t);

ExprPtr transition_formula(const Model& m, int cls, int t);

// Two-state frame: own mutable fields outside `written` keep their value,
// other-class fields of the phase footprint outside `written` keep their value
// for every instance.
ExprPtr unchanged(const Model& m, int cls, int phase, const std::set<FieldRef>& written);

ExprPtr stutter_formula(const Model& m, int cls, int phase);

struct Contract {
    enum class Kind : std::uint8_t { Init, Exec, Tick } kind = Kind::Exec;
    int cls = -1;
    int phase = -1;
    ExprPtr formula;
    // Exec: one disjunct per phase-matching transition (index into the class's
    // transitions), then the stutter disjunct with index -1.
    std::vector<std::pair<int, ExprPtr>> disjuncts;
};

Contract exec_contract(const Model& m, int cls, int phase);
Contract init_contract(const Model& m, int cls);
Contract tick_contract(const Model& m, int cls);

// Phases with a scheduler self-loop, in declaration order.
std::vector<int> self_loop_phases(const Model& m);

// Every contract of the model: init and tick per class, exec per class and
// self-loop phase.
std::vector<Contract> all_contracts(const Model& m);

std::string contract_name(const Model& m, const Contract& c);

} // namespace sra
