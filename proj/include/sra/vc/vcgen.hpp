#pragma once

#include "sra/contract/contractgen.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sra {

struct VcError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TaskKind : std::uint8_t {
    Establishment,
    Stability,
    SelfLoopPreservation,
    Init,
    PhaseNonFinal,
    PhaseFinal,
    Reset,
    PropertyImplication,
    LocalContract,
    GroundingLemma,
};

const char* to_string(TaskKind k);

// A closed two-state formula whose validity under Γ is one proof obligation.
// Instances the obligation talks about are universally quantified inside the
// formula; old() selects the pre-state.
struct VerificationTask {
    std::string id; // also the file stem: <kind>_<class>_<phase>
    TaskKind kind = TaskKind::Init;
    ExprPtr formula;
    std::string cls;   // class name(s), "all" when not class-specific
    std::string phase; // phase name, edge "p-q", or init/tick for local tasks
    std::string smt;   // filled by encode_tasks
};

// Inv, φ and the per-(phase, class) local conditions g'. Missing g' entries
// default to !self.executed. φ is checked at `prop_phase`, the final phase
// when negative.
struct GlobalSpec {
    ExprPtr inv;
    ExprPtr prop;
    std::map<std::pair<int, int>, ExprPtr> gprime;
    int prop_phase = -1;
};

ExprPtr local_condition(const Model& m, const GlobalSpec& spec, int phase, int cls);

// Frame of one exec(p) step of the instance bound to variable `self_var` of
// class `cls`: every other instance of `cls` keeps its mutable fields and
// executed flag, and instances of other classes keep every mutable field
// outside the write footprint of (cls, p) and their executed flags.
ExprPtr step_frame(const Model& m, int cls, int phase, const ExprPtr& self_var);

// T_C(p) with `self` replaced by `inst`.
ExprPtr instantiate(const ExprPtr& class_formula, const ExprPtr& inst);

std::vector<VerificationTask> build_checks(const Model& m, const GlobalSpec& spec);

// Per class: exec(p) for every self-loop phase, init and tick. Each task
// states that the statement-level semantics of the method (weakest
// precondition of the contract over the method body) implies the generated
// contract. `contracts` overrides contract generation (for mutation tests).
using ContractSource = std::function<Contract(const Model&, const Contract& generated)>;
std::vector<VerificationTask> build_local_contract_tasks(const Model& m, const ContractSource& contracts = {});

// Weakest precondition of `post` (a two-state formula over the executing
// instance `self`) for statement `s`. Reads inside old() are left alone; the
// result reads the state before `s` outside old().
ExprPtr wp(const Model& m, int cls, const StmtPtr& s, const ExprPtr& post);

// Method bodies as statements over the executing instance: the transition
// chain of exec(p) followed by executed := true, init() and tick().
StmtPtr exec_body(const Model& m, int cls, int phase);
StmtPtr init_body(const Model& m, int cls);
StmtPtr tick_body(const Model& m, int cls);

// --- SMT-LIB ------------------------------------------------------------------

struct SmtOptions {
    int card_bound = 4; // largest k expanded in |s| op k
};

// Preamble: sorts, datatypes, symbol declarations, well-formedness axioms
// and Γ.
std::string encode_model(const Model& m, const SmtOptions& opts = {});
// Term for a closed formula; throws VcError for unsupported constructs.
std::string encode_formula(const Model& m, const ExprPtr& f, const SmtOptions& opts = {});
// Full query: preamble, (assert (not F)), (check-sat).
std::string encode_task(const Model& m, const VerificationTask& t, const SmtOptions& opts = {});
void encode_tasks(const Model& m, std::vector<VerificationTask>& tasks, const SmtOptions& opts = {});
void write_tasks(const std::vector<VerificationTask>& tasks, const std::string& dir);

// --- discharge ----------------------------------------------------------------

enum class Verdict : std::uint8_t { Valid, Invalid, Unknown, Timeout };

const char* to_string(Verdict v);

struct VcResult {
    std::string task;
    Verdict verdict = Verdict::Unknown;
    double seconds = 0;
    std::string solver;
    std::string model_summary; // Invalid: universes of the counter-model
    std::string model;         // raw model text
    std::string detail;        // Unknown: reason or stderr
    std::optional<long long> rlimit;
};

struct SolverOptions {
    std::string command; // empty: $SRA_SMT_CMD, else "z3 -in"
    double timeout_s = 60;
    int jobs = 1;
};

std::string resolve_solver_command(const SolverOptions& o);

VcResult discharge_one(const VerificationTask& t, const SolverOptions& o);
std::vector<VcResult> discharge(const std::vector<VerificationTask>& tasks, const SolverOptions& o);

// --- report -------------------------------------------------------------------

enum class Overall : std::uint8_t { Proven, RefutedObligation, Inconclusive };

const char* to_string(Overall o);

struct VcReport {
    Overall overall = Overall::Proven;
    std::vector<VerificationTask> tasks;
    std::vector<VcResult> results;
    double total_seconds = 0;
    std::optional<long long> total_rlimit;

    std::string text() const;
    std::string json() const;
    int exit_code() const; // 0 Proven, 1 refuted, 3 inconclusive
};

VcReport make_report(const std::vector<VerificationTask>& tasks, std::vector<VcResult> results);

} // namespace sra
