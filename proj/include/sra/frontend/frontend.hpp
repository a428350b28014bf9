#pragma once

#include "sra/core/model.hpp"
#include "sra/core/state.hpp"
#include "sra/frontend/diagnostics.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sra {

template <typename T>
struct Parsed {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.has_value(); }
    std::string messages() const
    {
        std::string out;
        for (const auto& d : diagnostics)
            out += format(d) + "\n";
        return out;
    }
};

// Where an expression occurs; decides which symbols are visible.
enum class ExprMode : std::uint8_t {
    Guard,          // class transition guard (class context)
    Effect,         // right-hand sides and conditions in effects (class context)
    Initializer,    // declared initial values (constants only)
    SchedulerGuard, // scheduler transitions
    Constraint,     // configuration constraints
    Invariant,      // invariants and properties (closed, may read phase)
    LocalCondition, // g' (class context, pre-state)
    TwoState,       // contracts and VC formulas (old() permitted)
};

// Parses, resolves and checks a model. Fails if any error diagnostic is
// produced; warnings are returned alongside a successful model.
Parsed<Model> parse_model(std::string_view src, const std::string& file = "<input>");

// Language restrictions over a resolved model. All violations are reported.
std::vector<Diagnostic> check_model(const Model& m);

// Resolves one expression against `m`. `cls` selects the class context for
// Guard, Effect and LocalCondition modes.
Parsed<ExprPtr> parse_expression(std::string_view src, const Model& m, ExprMode mode, int cls = -1);

struct InvariantSpec {
    std::vector<Constraint> items;
    std::map<std::pair<int, int>, ExprPtr> gprime; // (phase, class) -> condition over self

    ExprPtr conjunction() const;
};

// `.srainv` text: `[label:] formula;` items and `gprime Phase Class : expr;`.
Parsed<InvariantSpec> parse_invariant_file(std::string_view src, const Model& m, const std::string& file = "<input>");
// Conjunction of the items of an invariant file.
Parsed<ExprPtr> parse_invariant(std::string_view src, const Model& m, const std::string& file = "<input>");

struct GammaResult {
    std::string label;
    bool holds = false;
};

struct ConfigReport {
    Configuration config;
    std::vector<GammaResult> gamma;

    bool satisfies_gamma() const;
};

Parsed<ConfigReport> parse_configuration(std::string_view src, const Model& m, const std::string& file = "<input>");

// Evaluates every constraint on a configuration (frontend's own evaluator over
// immutable symbols).
std::vector<GammaResult> evaluate_gamma(const Model& m, const Configuration& cfg);

std::string read_text_file(const std::string& path);

} // namespace sra
