#pragma once

#include "sra/core/state.hpp"
#include "sra/sim/eval.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sra {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Supplies values for havoc statements.
using HavocSource = std::function<std::int64_t(const Type&)>;

// Havoc values drawn uniformly: Bool and Enum over their domain, Int and Timer
// from [lo, hi] (timers clamp negatives to inactive).
HavocSource random_havoc(std::uint64_t seed, std::int64_t lo = -3, std::int64_t hi = 3);

// --- inputs ---------------------------------------------------------------

class InputProvider {
public:
    virtual ~InputProvider() = default;
    // Writes input fields for scheduling cycle `cycle` (0 for the first).
    virtual void provide(const Model& m, const Configuration& cfg, GlobalState& s, int cycle) = 0;
};

// Per-cycle assignments `{instance: {field: value}}`. Inputs not mentioned keep
// their previous values; cycles beyond the script repeat nothing.
class ScriptedInputs : public InputProvider {
public:
    struct Assignment {
        std::string instance;
        std::string field;
        std::string value; // surface literal: true, false, integer or enum literal
    };
    explicit ScriptedInputs(std::vector<std::vector<Assignment>> cycles) : cycles_(std::move(cycles)) {}
    // JSON: {"cycles": [{"inst": {"field": value}}]}.
    static ScriptedInputs from_json(const std::string& text);
    // Rejects assignments to unknown instances or non-input fields.
    void validate(const Model& m, const Configuration& cfg) const;
    void provide(const Model& m, const Configuration& cfg, GlobalState& s, int cycle) override;

private:
    std::vector<std::vector<Assignment>> cycles_;
};

// Independent uniform draws per input field and cycle.
class RandomInputs : public InputProvider {
public:
    explicit RandomInputs(std::uint64_t seed, std::int64_t lo = -3, std::int64_t hi = 3)
        : rng_(seed), lo_(lo), hi_(hi)
    {
    }
    void provide(const Model& m, const Configuration& cfg, GlobalState& s, int cycle) override;

private:
    std::mt19937_64 rng_;
    std::int64_t lo_;
    std::int64_t hi_;
};

// Leaves inputs unchanged.
class NoInputs : public InputProvider {
public:
    void provide(const Model&, const Configuration&, GlobalState&, int) override {}
};

// --- ordering ---------------------------------------------------------------

struct OrderPolicy {
    enum class Kind : std::uint8_t { Seeded, Fixed, Exhaustive } kind = Kind::Fixed;
    std::uint64_t seed = 0;
    // Fixed: explicit order per phase index; phases without an entry use
    // declaration order (classes in order, then instances).
    std::map<int, std::vector<ObjRef>> fixed;

    static OrderPolicy seeded(std::uint64_t seed) { return {Kind::Seeded, seed, {}}; }
    static OrderPolicy declaration() { return {Kind::Fixed, 0, {}}; }
    static OrderPolicy exhaustive() { return {Kind::Exhaustive, 0, {}}; }
    // Parses "seeded:N", "exhaustive", "declaration" or
    // "fixed:Phase=a,b,c;Phase2=c,b,a".
    static OrderPolicy parse(const std::string& text, const Model& m, const Configuration& cfg);
};

// All instances in declaration order.
std::vector<ObjRef> all_instances(const Configuration& cfg);

// --- steps ------------------------------------------------------------------

struct StepLabel {
    enum class Kind : std::uint8_t { Init, SelfLoop, PhaseChange, Reset } kind = Kind::Init;
    int from = -1;
    int to = -1;
    std::vector<ObjRef> order; // SelfLoop: execution order
    std::vector<int> fired;    // SelfLoop: fired transition per order entry, -1 = stutter
};

struct TraceStep {
    int step = 0;
    StepLabel label;
    GlobalState state;
};

using Trace = std::vector<TraceStep>;

struct ExecResult {
    GlobalState state;
    int fired = -1; // index into the class's transitions, -1 for stutter
};

// Initial state: declared initial values, timers inactive, events and
// executed flags false, phase l0, inputs from the provider (cycle 0).
GlobalState init_state(const Model& m, const Configuration& cfg, InputProvider& inputs);

// Index of the first enabled phase-matching transition of `inst`, or -1.
int enabled_transition(const Model& m, const Configuration& cfg, const GlobalState& s, ObjRef inst, int phase);

// One local exec: fires the first enabled transition (declaration order) or
// stutters. Does not touch executed flags.
ExecResult exec_local(const Model& m, const Configuration& cfg, const GlobalState& s, ObjRef inst, int phase,
                      const HavocSource& havoc = {});

// Executes statement `st` for instance `self`, reading and writing `s`.
void exec_stmt(const Model& m, const Configuration& cfg, GlobalState& s, ObjRef self, const StmtPtr& st,
               const HavocSource& havoc);

// tick(): decrements every active timer of `inst`.
void tick(const Model& m, GlobalState& s, ObjRef inst);

// Non-self-loop scheduler step to phase `to`: clears executed flags and ticks
// every timer when `to` is the final phase.
void change_phase(const Model& m, const Configuration& cfg, GlobalState& s, int to);

// Index of the first enabled scheduler transition from the current phase, or
// -1. The implicit reset from lf is not included.
int enabled_scheduler_transition(const Model& m, const Configuration& cfg, const GlobalState& s);

// Engine holding ordering and havoc state for a sequence of steps.
class Simulator {
public:
    Simulator(const Model& m, const Configuration& cfg, OrderPolicy order, InputProvider& inputs,
              HavocSource havoc = {});

    GlobalState init();
    // Applies one scheduler step; throws SimError on deadlock.
    TraceStep step(const GlobalState& s);
    int cycle() const { return cycle_; }

private:
    const Model& m_;
    const Configuration& cfg_;
    OrderPolicy order_;
    InputProvider& inputs_;
    HavocSource havoc_;
    std::mt19937_64 rng_;
    int cycle_ = 0;
    int steps_ = 0;

    std::vector<ObjRef> order_for(int phase);
};

// Result of a run: trace plus the first monitor violation (at an lf-state) or
// an engine error.
struct RunResult {
    Trace trace;
    bool violated = false;
    int violation_step = -1;
    int violated_monitor = -1;
    std::string error;

    bool passed() const { return !violated && error.empty(); }
};

struct RunOptions {
    int cycles = 1;
    int max_steps_per_cycle = 10000;
};

RunResult run(const Model& m, const Configuration& cfg, const OrderPolicy& order, InputProvider& inputs,
              const std::vector<ExprPtr>& monitors, const RunOptions& opts = {}, const HavocSource& havoc = {});

// Every post-state of a self-loop in `phase` over all instance orders.
// Throws SimError when the universe exceeds `cap` instances.
std::vector<GlobalState> self_loop_successors(const Model& m, const Configuration& cfg, const GlobalState& s,
                                              int phase, std::size_t cap = 6);

// Line-delimited JSON, one object per step:
// {"step", "label", "phase", "state": {instance: {field: value}}}.
std::string trace_step_json(const Model& m, const Configuration& cfg, const TraceStep& t);
std::string trace_jsonl(const Model& m, const Configuration& cfg, const Trace& trace);

// Readable value of a field of an instance in a state.
std::string format_field(const Model& m, const Configuration& cfg, const GlobalState& s, ObjRef o, int field);

} // namespace sra
