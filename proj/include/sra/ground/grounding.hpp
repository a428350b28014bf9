#pragma once

#include "sra/core/state.hpp"
#include "sra/vc/vcgen.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sra {

struct GroundingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One set field bounded by a unit-cardinality constraint. The grounded field
// is appended to the owning class; its index is `grounded_field` in the
// grounded model.
struct GroundedSet {
    int cls = -1;
    int set_field = -1;
    int grounded_field = -1;
    std::string set_name;
    std::string grounded_name;
    std::string elem; // element class name
    bool nullable = false;
};

struct GroundingPlan {
    std::vector<GroundedSet> sets;
    // Upper bounds k >= 2 found in Γ; not grounded.
    std::vector<std::string> rejected;

    bool empty() const { return sets.empty(); }
    const GroundedSet* find(int cls, int set_field) const;
};

// Sets with `forall c in All_C : |c.s| == 1` (non-nullable) or `<= 1`
// (nullable) in Γ. A `<= 1` bound together with `>= 1` counts as `== 1`.
// Sets that already have a grounded field are skipped.
GroundingPlan plan(const Model& m);

struct GroundOptions {
    bool drop_null_guard = false; // mutation: omit every `g != null` test
};

// Rewrites quantifiers and set atoms over planned sets into references to the
// grounded field. The result reads fields of the grounded model.
ExprPtr ground_formula(const ExprPtr& e, const GroundingPlan& p, const GroundOptions& opts = {});

// Copy of `m` with the grounded fields added, guards and effects grounded, and
// fully replaced sets marked ghost. An empty plan returns `m` unchanged.
Model ground_statements(const Model& m, const GroundingPlan& p);

// Configuration of the original model extended with grounded values.
Configuration ground_configuration(const Model& grounded, Configuration cfg);

// A specification to compare before and after grounding. `cls >= 0` marks a
// class formula over `self`. A null `grounded` is computed by ground_formula.
struct LemmaSpec {
    std::string name;
    int cls = -1;
    ExprPtr original;
    ExprPtr grounded;
};

bool mentions_grounded(const ExprPtr& e, const GroundingPlan& p);

// Every contract and scheduler guard of the two models plus `extra` (Inv
// items, φ), restricted to those whose grounded form mentions a grounded field.
std::vector<LemmaSpec> collect_lemma_specs(const Model& original, const Model& grounded, const GroundingPlan& p,
                                           const std::vector<Constraint>& extra);

// One GroundingLemma per spec: linking assumptions imply grounded <=> original.
// Tasks are closed formulas over `grounded`.
std::vector<VerificationTask> equivalence_lemmas(const Model& grounded, const GroundingPlan& p,
                                                 const std::vector<LemmaSpec>& specs, const GroundOptions& opts = {});

} // namespace sra

namespace sra {

// Runs `original` on `cfg` and `grounded` on its grounded configuration with
// the same seeded order, random inputs and havoc values. Returns an empty
// string when the traces agree step by step, else the first difference.
std::string compare_runs(const Model& original, const Model& grounded, const Configuration& cfg,
                         std::uint64_t seed, int cycles);

} // namespace sra
