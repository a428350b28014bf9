#include "sra/core/printer.hpp"
#include "sra/frontend/frontend.hpp"
#include "sra/ground/grounding.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/sim/simulator.hpp"
#include "sra/vc/vcgen.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace sra;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kInconclusive = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Failure of the checked artifact: diagnostics already printed.
struct Rejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string model;
    bool json = false;
    std::string out;
    std::string solver;
    double timeout = 60;
    int jobs = 1;
    std::string invariant;
    std::string property;
    std::string property_phase;
    std::string gprime;
    std::string config;
    int cycles = 1;
    std::optional<std::uint64_t> seed;
    std::string order;
    std::string inputs;
    std::vector<std::string> monitors;
    std::string harness = "all";
    int samples = 1000;
    int effects = 200;
    int prestates = 100;
    bool with_local = false;
    bool discharge_lemmas = false;
    bool write_smt = false;
};

Model load_model(const std::string& path)
{
    auto p = parse_model(read_text_file(path), path);
    std::cerr << p.messages();
    if (!p.ok())
        throw Rejected("model rejected");
    return *p.value;
}

InvariantSpec load_spec(const Model& m, const std::string& path)
{
    auto p = parse_invariant_file(read_text_file(path), m, path);
    std::cerr << p.messages();
    if (!p.ok())
        throw Rejected("specification rejected");
    return *p.value;
}

Configuration load_config(const Model& m, const std::string& path, bool require_gamma = true)
{
    auto p = parse_configuration(read_text_file(path), m, path);
    std::cerr << p.messages();
    if (!p.ok())
        throw Rejected("configuration rejected");
    if (require_gamma && !p.value->satisfies_gamma()) {
        for (const auto& g : p.value->gamma)
            if (!g.holds)
                std::cerr << path << ": constraint '" << g.label << "' does not hold\n";
        throw Rejected("configuration violates the constraints");
    }
    return p.value->config;
}

void emit(const Options& o, const std::string& text)
{
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f)
        throw std::runtime_error("cannot write " + o.out);
    f << text;
}

SolverOptions solver_options(const Options& o)
{
    SolverOptions s;
    s.command = o.solver;
    s.timeout_s = o.timeout;
    s.jobs = o.jobs;
    return s;
}

int report(const Options& o, std::vector<VerificationTask>& tasks, const Model& m, const std::string& smt_dir)
{
    encode_tasks(m, tasks);
    if (!smt_dir.empty())
        write_tasks(tasks, smt_dir);
    VcReport r = make_report(tasks, discharge(tasks, solver_options(o)));
    std::cout << (o.json ? r.json() + "\n" : r.text());
    return r.exit_code();
}

// --- subcommands ------------------------------------------------------------------

int cmd_check(const Options& o)
{
    Model m = load_model(o.model);
    nlohmann::ordered_json j;
    j["model"] = o.model;
    j["classes"] = m.classes.size();
    j["phases"] = m.scheduler.phases;
    bool ok = true;
    if (!o.config.empty()) {
        auto p = parse_configuration(read_text_file(o.config), m, o.config);
        std::cerr << p.messages();
        if (!p.ok())
            throw Rejected("configuration rejected");
        auto& arr = j["constraints"] = nlohmann::ordered_json::object();
        for (const auto& g : p.value->gamma) {
            arr[g.label] = g.holds;
            ok = ok && g.holds;
        }
    }
    if (o.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << o.model << ": ok (" << m.classes.size() << " classes, " << m.scheduler.phases.size()
                  << " phases)\n";
        if (j.contains("constraints"))
            for (const auto& [label, holds] : j["constraints"].items())
                std::cout << "  " << label << ": " << (holds.get<bool>() ? "holds" : "violated") << "\n";
    }
    return ok ? kOk : kViolation;
}

int cmd_simulate(const Options& o)
{
    Model m = load_model(o.model);
    if (o.config.empty())
        throw UsageError("simulate requires --config");
    Configuration cfg = load_config(m, o.config);
    std::unique_ptr<InputProvider> inputs;
    if (!o.inputs.empty()) {
        auto s = std::make_unique<ScriptedInputs>(ScriptedInputs::from_json(read_text_file(o.inputs)));
        s->validate(m, cfg);
        inputs = std::move(s);
    } else if (o.seed) {
        inputs = std::make_unique<RandomInputs>(*o.seed);
    } else {
        inputs = std::make_unique<NoInputs>();
    }
    OrderPolicy order = !o.order.empty() ? OrderPolicy::parse(o.order, m, cfg)
                        : o.seed        ? OrderPolicy::seeded(*o.seed)
                                        : OrderPolicy::declaration();
    if (order.kind == OrderPolicy::Kind::Exhaustive)
        throw UsageError("simulate runs one trace; use the oracle subcommand for exhaustive orders");
    std::vector<ExprPtr> monitors;
    std::vector<std::string> labels;
    for (const auto& path : o.monitors)
        for (const auto& item : load_spec(m, path).items) {
            monitors.push_back(item.expr);
            labels.push_back(item.label);
        }
    RunOptions ro;
    ro.cycles = o.cycles;
    RunResult r = run(m, cfg, order, *inputs, monitors, ro, o.seed ? random_havoc(*o.seed) : HavocSource{});
    emit(o, trace_jsonl(m, cfg, r.trace));
    if (!r.error.empty()) {
        std::cerr << "error: " << r.error << "\n";
        return kUsage;
    }
    if (r.violated) {
        std::cerr << "monitor '" << labels.at(static_cast<std::size_t>(r.violated_monitor)) << "' violated at step "
                  << r.violation_step << "\n";
        return kViolation;
    }
    return kOk;
}

int cmd_contracts(const Options& o)
{
    Model m = load_model(o.model);
    std::ostringstream out;
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : all_contracts(m)) {
        std::string name = contract_name(m, c);
        if (o.json)
            j.push_back({{"name", name}, {"formula", print(c.formula)}});
        else
            out << name << ":\n  " << print(c.formula) << "\n";
    }
    emit(o, o.json ? j.dump(2) + "\n" : out.str());
    return kOk;
}

int cmd_ground(const Options& o)
{
    Model m = load_model(o.model);
    GroundingPlan p = plan(m);
    for (const auto& r : p.rejected)
        std::cerr << "warning: " << r << "\n";
    Model g = ground_statements(m, p);
    std::vector<Constraint> extra;
    if (!o.invariant.empty())
        for (auto& c : load_spec(m, o.invariant).items)
            extra.push_back(c);
    if (!o.property.empty())
        for (auto& c : load_spec(m, o.property).items)
            extra.push_back(c);
    auto tasks = equivalence_lemmas(g, p, collect_lemma_specs(m, g, p, extra));
    encode_tasks(g, tasks);

    std::string dir = o.out.empty() ? "." : o.out;
    fs::create_directories(dir);
    std::string model_path = (fs::path(dir) / (fs::path(o.model).stem().string() + ".grounded.sra")).string();
    std::ofstream(model_path) << print_model(g);
    write_tasks(tasks, dir);

    for (const auto& s : p.sets)
        std::cout << m.classes[static_cast<std::size_t>(s.cls)].name << "." << s.set_name << " -> " << s.grounded_name
                  << (s.nullable ? " (nullable)" : "") << "\n";
    std::cout << "grounded model: " << model_path << "\n" << tasks.size() << " lemma tasks in " << dir << "\n";
    if (!o.discharge_lemmas || tasks.empty())
        return kOk;
    VcReport r = make_report(tasks, discharge(tasks, solver_options(o)));
    std::cout << (o.json ? r.json() + "\n" : r.text());
    return r.exit_code();
}

int cmd_verify_local(const Options& o)
{
    Model m = load_model(o.model);
    auto tasks = build_local_contract_tasks(m);
    return report(o, tasks, m, o.write_smt ? o.out : "");
}

int cmd_verify_global(const Options& o)
{
    if (o.invariant.empty() || o.property.empty())
        throw UsageError("verify-global requires --invariant and --property");
    Model m = load_model(o.model);
    InvariantSpec inv = load_spec(m, o.invariant);
    GlobalSpec spec;
    spec.inv = inv.conjunction();
    spec.gprime = inv.gprime;
    spec.prop = load_spec(m, o.property).conjunction();
    if (!o.gprime.empty())
        for (const auto& [k, v] : load_spec(m, o.gprime).gprime)
            spec.gprime[k] = v;
    if (!o.property_phase.empty()) {
        spec.prop_phase = m.scheduler.find_phase(o.property_phase);
        if (spec.prop_phase < 0)
            throw UsageError("unknown phase '" + o.property_phase + "'");
    }
    if (!o.config.empty() && o.config != "none")
        std::cerr << "note: --config is ignored; verification covers every configuration satisfying the constraints\n";
    auto tasks = build_checks(m, spec);
    if (o.with_local) {
        auto local = build_local_contract_tasks(m);
        tasks.insert(tasks.end(), local.begin(), local.end());
    }
    return report(o, tasks, m, o.write_smt ? o.out : "");
}

int cmd_oracle(const Options& o)
{
    Model m = load_model(o.model);
    const std::uint64_t seed = o.seed.value_or(1);
    const std::set<std::string> known{"all", "contracts", "effects", "reach"};
    if (!known.count(o.harness))
        throw UsageError("unknown harness '" + o.harness + "'");
    auto wants = [&](const char* h) { return o.harness == "all" || o.harness == h; };
    nlohmann::ordered_json j;
    bool ok = true;
    std::ostringstream text;
    if (wants("contracts")) {
        auto r = contract_vs_simulator(m, o.samples, seed);
        ok = ok && r.passed();
        j["contracts"] = {{"samples", r.samples}, {"soundness", r.soundness()}, {"precision", r.precision()},
                          {"failures", r.failures.size()}};
        text << "contracts: " << r.samples << " samples, sound " << r.soundness() * 100 << "%, precise "
             << r.precision() * 100 << "%\n";
        for (const auto& f : r.failures)
            text << "  seed " << f.seed << " " << f.contract << ": " << f.reason << "\n";
    }
    if (wants("effects")) {
        auto r = effect_transformation_oracle(m, o.effects, o.prestates, seed);
        ok = ok && r.passed();
        j["effects"] = {{"effects", r.effects}, {"checks", r.checks}, {"mismatches", r.mismatches}};
        text << "effects: " << r.effects << " effects, " << r.checks << " checks, " << r.mismatches.size()
             << " mismatches\n";
        for (const auto& s : r.mismatches)
            text << "  " << s << "\n";
    }
    if (wants("reach")) {
        if (o.config.empty() || o.invariant.empty()) {
            if (o.harness == "reach")
                throw UsageError("the reach harness requires --config and --invariant");
        } else {
            Model& mm = m;
            Configuration cfg = load_config(mm, o.config);
            ExprPtr inv = load_spec(mm, o.invariant).conjunction();
            ExprPtr prop = o.property.empty() ? build::true_() : load_spec(mm, o.property).conjunction();
            ReachOptions ro;
            ro.cycles = o.cycles;
            ro.seed = seed;
            auto r = bounded_reachability_check(mm, cfg, inv, prop, ro);
            ok = ok && r.passed();
            j["reach"] = {{"states", r.states}, {"lf_states", r.lf_states},
                          {"violation", r.violation ? r.violation->what : ""}, {"error", r.error}};
            text << "reach: " << r.states << " states, " << r.lf_states << " lf-states, "
                 << (r.violation ? r.violation->what + " violated" : r.error.empty() ? "no violation" : r.error)
                 << "\n";
            if (r.violation)
                text << trace_jsonl(mm, cfg, r.violation->trace);
        }
    }
    j["passed"] = ok;
    emit(o, o.json ? j.dump(2) + "\n" : text.str());
    return ok ? kOk : kViolation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Scheduler-restricted asynchronous systems: check, simulate and verify"};
    app.require_subcommand(1, 1);
    Options o;

    auto model_arg = [&](CLI::App* c) { c->add_option("model", o.model, "model file (.sra)")->required(); };
    auto json_flag = [&](CLI::App* c) { c->add_flag("--json", o.json, "machine-readable output"); };
    auto solver_flags = [&](CLI::App* c) {
        c->add_option("--solver", o.solver, "solver command reading SMT-LIB on stdin (default: $SRA_SMT_CMD or z3 -in)");
        c->add_option("--timeout", o.timeout, "seconds per task")->check(CLI::PositiveNumber);
        c->add_option("--jobs", o.jobs, "parallel solver processes")->check(CLI::PositiveNumber);
    };

    auto* check = app.add_subcommand("check", "parse and type-check a model");
    model_arg(check);
    check->add_option("--config", o.config, "also evaluate the constraints on a configuration");
    json_flag(check);

    auto* simulate = app.add_subcommand("simulate", "run the model on a configuration");
    model_arg(simulate);
    simulate->add_option("--config", o.config, "configuration file (.sracfg)")->required();
    simulate->add_option("--cycles", o.cycles, "scheduling cycles")->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", o.seed, "seed for order, random inputs and havoc");
    simulate->add_option("--order", o.order, "seeded:N | declaration | fixed:Phase=a,b;...");
    simulate->add_option("--inputs", o.inputs, "scripted inputs (JSON)");
    simulate->add_option("--monitor", o.monitors, "monitor file(s) checked at the final phase");
    simulate->add_option("--out", o.out, "write the trace here instead of stdout");

    auto* contracts = app.add_subcommand("contracts", "print the generated local contracts");
    model_arg(contracts);
    contracts->add_option("--out", o.out, "output file");
    json_flag(contracts);

    auto* ground = app.add_subcommand("ground", "ground unit-cardinality sets and emit equivalence lemmas");
    model_arg(ground);
    ground->add_option("--out", o.out, "output directory");
    ground->add_option("--invariant", o.invariant, "invariant file whose items get lemmas");
    ground->add_option("--property", o.property, "property file whose items get lemmas");
    ground->add_flag("--discharge", o.discharge_lemmas, "discharge the lemmas");
    solver_flags(ground);
    json_flag(ground);

    auto* vlocal = app.add_subcommand("verify-local", "check the generated contracts against the method bodies");
    model_arg(vlocal);
    vlocal->add_option("--out", o.out, "directory for the SMT-LIB task files")->each([&](const std::string&) {
        o.write_smt = true;
    });
    solver_flags(vlocal);
    json_flag(vlocal);

    auto* vglobal = app.add_subcommand("verify-global", "discharge the global entailment checks");
    model_arg(vglobal);
    vglobal->add_option("--invariant", o.invariant, "inductive invariant (.srainv)");
    vglobal->add_option("--property", o.property, "property (.srainv)");
    vglobal->add_option("--gprime", o.gprime, "file with gprime lines overriding the invariant file");
    vglobal->add_option("--property-phase", o.property_phase, "phase at which the property is checked");
    vglobal->add_option("--config", o.config, "accepted for symmetry; verification is configuration-independent");
    vglobal->add_flag("--with-local", o.with_local, "include the local contract tasks");
    vglobal->add_option("--out", o.out, "directory for the SMT-LIB task files")->each([&](const std::string&) {
        o.write_smt = true;
    });
    solver_flags(vglobal);
    json_flag(vglobal);

    auto* oracle = app.add_subcommand("oracle", "run the differential harnesses");
    model_arg(oracle);
    oracle->add_option("--harness", o.harness, "all | contracts | effects | reach");
    oracle->add_option("--samples", o.samples, "contract oracle samples")->check(CLI::NonNegativeNumber);
    oracle->add_option("--effects", o.effects, "random effects for the effect oracle")->check(CLI::NonNegativeNumber);
    oracle->add_option("--prestates", o.prestates, "pre-states per effect")->check(CLI::NonNegativeNumber);
    oracle->add_option("--seed", o.seed, "seed");
    oracle->add_option("--config", o.config, "configuration for the reach harness");
    oracle->add_option("--invariant", o.invariant, "invariant for the reach harness");
    oracle->add_option("--property", o.property, "property for the reach harness");
    oracle->add_option("--cycles", o.cycles, "cycle bound for the reach harness")->check(CLI::NonNegativeNumber);
    oracle->add_option("--out", o.out, "output file");
    json_flag(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*check)
            return cmd_check(o);
        if (*simulate)
            return cmd_simulate(o);
        if (*contracts)
            return cmd_contracts(o);
        if (*ground)
            return cmd_ground(o);
        if (*vlocal)
            return cmd_verify_local(o);
        if (*vglobal)
            return cmd_verify_global(o);
        if (*oracle)
            return cmd_oracle(o);
    } catch (const Rejected& e) {
        std::cerr << e.what() << "\n";
        return kViolation;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
