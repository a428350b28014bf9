#pragma once

#include "sra/core/model.hpp"

#include <set>
#include <string>

namespace sra {

enum class SymbolKind : std::uint8_t { Field, Executed, AllSet, Phase };

// A state or configuration symbol read by a formula. `pre` is set when the
// occurrence is under an old() marker.
struct Symbol {
    SymbolKind kind = SymbolKind::Field;
    int cls = -1;
    int field = -1;
    bool pre = false;

    auto operator<=>(const Symbol&) const = default;
};

std::set<Symbol> free_symbols(const ExprPtr& e);
std::string to_string(const Model& m, const Symbol& s);

// Fields assigned by `effect` (including other-class fields written through
// quantified or grounded assignments).
std::set<FieldRef> written_fields(const StmtPtr& effect);

// Fields possibly written when an instance of class `cls` executes in
// `phase`: effect targets of phase-matching transitions, the location and
// consumed events when such a transition exists, and the executed flag.
std::set<FieldRef> write_footprint(const Model& m, int cls, int phase);

// Event fields of `cls` that occur in `guard` as top-level conjuncts.
std::vector<int> guard_events(const Model& m, int cls, const ExprPtr& guard);

} // namespace sra
