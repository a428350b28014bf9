#pragma once

#include "sra/contract/contractgen.hpp"
#include "sra/sim/simulator.hpp"

#include <cstdint>
#include <optional>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace sra {

// --- random configurations ---------------------------------------------------

struct RandomConfigOptions {
    int min_instances = 1;
    int max_instances = 4; // per class
    std::int64_t param_lo = 0;
    std::int64_t param_hi = 4;
    int max_tries = 100; // restarts of the local search
};

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configuration satisfying every constraint. Proposals are drawn at random
// and improved by min-conflict flips of set memberships and parameters; a
// proposal is accepted only when all constraints hold. Throws OracleError
// after `max_tries` rejected proposals.
Configuration random_configuration(const Model& m, std::mt19937_64& rng, const RandomConfigOptions& opts = {});

// A uniformly random mutable state: field values, executed flags and a phase
// drawn from `phases` (all phases when empty).
GlobalState random_state(const Model& m, const Configuration& cfg, std::mt19937_64& rng,
                         const std::vector<int>& phases = {});

// --- contract oracle ------------------------------------------------------------

struct ContractSampleFailure {
    std::uint64_t seed = 0; // sample seed; with the run seed, replays the sample
    std::string contract;
    std::string reason;
};

struct ContractOracleReport {
    int samples = 0;
    int sound = 0;   // contract held on the concrete pre/post pair
    int precise = 0; // Exec: exactly the fired disjunct held; Init/Tick: same as sound
    std::vector<ContractSampleFailure> failures;

    double soundness() const { return samples ? static_cast<double>(sound) / samples : 1.0; }
    double precision() const { return samples ? static_cast<double>(precise) / samples : 1.0; }
    bool passed() const { return failures.empty() && sound == samples && precise == samples; }
};

using ExecContractFn = std::function<Contract(const Model&, int cls, int phase)>;

// Draws a pool of Γ-satisfying configurations from `seed`, then per sample a
// configuration from the pool and a reachable or random state, runs
// exec/init/tick concretely and evaluates the generated contract. A sample is
// precise when exactly the fired disjunct holds and every single-field
// perturbation of the post-state within the contract's vocabulary is
// rejected (fields a havoc may have produced are not perturbed).
ContractOracleReport contract_vs_simulator(const Model& m, int samples, std::uint64_t seed,
                                           const ExecContractFn& exec = exec_contract,
                                           const RandomConfigOptions& cfg_opts = {});

// --- effect transformation oracle ---------------------------------------------

struct EffectOracleReport {
    int effects = 0;
    int checks = 0;
    std::vector<std::string> mismatches;

    bool passed() const { return mismatches.empty(); }
};

// Compares every symbolic-map entry of `effect` against concrete execution on
// `prestates` random pre-states over `cfg`. Entries whose value reaches the
// havoc marker are skipped; fields outside the map must keep their value.
void check_effect(const Model& m, const Configuration& cfg, int cls, const StmtPtr& effect, int prestates,
                  std::mt19937_64& rng, EffectOracleReport& report);

// Random well-typed effect for class `cls` of nesting depth <= `depth` using
// assignment, havoc, conditional, quantified assignment and sequence.
StmtPtr random_effect(const Model& m, int cls, int depth, std::mt19937_64& rng);

// All corpus effects of `m` plus `random_effects` generated ones, each on
// `prestates` pre-states.
EffectOracleReport effect_transformation_oracle(const Model& m, int random_effects, int prestates, std::uint64_t seed,
                                                int depth = 4);

// --- bounded reachability ------------------------------------------------------

struct ReachOptions {
    int cycles = 3;
    std::size_t exhaustive_cap = 8; // instances; every self-loop order is explored
    std::size_t max_states = 2000000;
    // Input valuations at init and per reset: all combinations (Int inputs
    // range over -1..1) when at most this many, otherwise `input_samples`
    // random valuations.
    std::size_t max_input_combinations = 4096;
    int input_samples = 64;
    std::uint64_t seed = 0;
};

struct ReachViolation {
    std::string what; // "invariant", "property" or "deadlock"
    Trace trace;      // from an initial state to the violating state
};

struct ReachReport {
    std::size_t states = 0;
    std::size_t lf_states = 0;
    std::optional<ReachViolation> violation;
    std::string error;

    bool passed() const { return !violation && error.empty(); }
};

// Explores every run of up to `cycles` scheduling cycles, checking `inv` at
// every state and `prop` at every lf-state.
ReachReport bounded_reachability_check(const Model& m, const Configuration& cfg, const ExprPtr& inv,
                                       const ExprPtr& prop, const ReachOptions& opts = {});

} // namespace sra
