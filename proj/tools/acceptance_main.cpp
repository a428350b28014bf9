#include "sra/core/printer.hpp"
#include "sra/frontend/frontend.hpp"
#include "sra/ground/grounding.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/sim/simulator.hpp"
#include "sra/vc/vcgen.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace sra;
namespace fs = std::filesystem;

namespace {

std::string corpus_dir;

struct Verdict_ {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string path(const std::string& name)
{
    return (fs::path(corpus_dir) / name).string();
}

Model model(const std::string& name)
{
    auto p = parse_model(read_text_file(path(name)), name);
    if (!p.ok())
        throw std::runtime_error(p.messages());
    return *p.value;
}

Configuration config(const Model& m, const std::string& name)
{
    auto p = parse_configuration(read_text_file(path(name)), m, name);
    if (!p.ok())
        throw std::runtime_error(p.messages());
    return p.value->config;
}

InvariantSpec spec(const Model& m, const std::string& name)
{
    auto p = parse_invariant_file(read_text_file(path(name)), m, name);
    if (!p.ok())
        throw std::runtime_error(p.messages());
    return *p.value;
}

// Collects failed expectations of one criterion.
struct Expect {
    std::vector<std::string> failed;

    void that(bool ok, const std::string& what)
    {
        if (!ok)
            failed.push_back(what);
    }
    Verdict_ verdict(std::string detail) const
    {
        if (failed.empty())
            return {true, std::move(detail)};
        std::string d;
        for (std::size_t i = 0; i < failed.size() && i < 5; ++i)
            d += (i ? "; " : "") + failed[i];
        if (failed.size() > 5)
            d += "; ... " + std::to_string(failed.size() - 5) + " more";
        return {false, d};
    }
};

struct Robot {
    Model m = model("robot.sra");
    Configuration cfg = config(m, "robot.sracfg");

    std::string get(const GlobalState& s, const std::string& inst, const std::string& field) const
    {
        ObjRef o = *cfg.find(inst);
        const auto& c = m.classes[static_cast<std::size_t>(o.cls)];
        return format_field(m, cfg, s, o, field == "location" ? c.location : c.find_field(field));
    }
    int phase(const std::string& p) const { return m.scheduler.find_phase(p); }
};

const std::vector<std::string> kSensors{"sL", "sR1", "sR2"};

Verdict_ scenario_fidelity()
{
    auto t0 = Clock::now();
    Robot r;
    auto in = ScriptedInputs::from_json(read_text_file(path("scenario.json")));
    auto order = OrderPolicy::parse("fixed:Sense=sL,sR1,sR2,c1;Act=c1,sL,sR1,sR2", r.m, r.cfg);
    auto res = run(r.m, r.cfg, order, in, {});
    Expect e;
    e.that(res.error.empty(), "run error: " + res.error);
    if (res.trace.size() != 7)
        return {false, "expected 7 steps, got " + std::to_string(res.trace.size())};
    const auto& t = res.trace;
    e.that(r.get(t[1].state, "sL", "location") == "NoGo", "sL NoGo after Sense");
    e.that(r.get(t[1].state, "sR1", "location") == "Go", "sR1 Go after Sense");
    e.that(r.get(t[1].state, "sR2", "location") == "Go", "sR2 Go after Sense");
    e.that(t[2].state.phase == r.phase("Act"), "Sense -> Act");
    e.that(r.get(t[3].state, "c1", "location") == "Moving", "controller Moving after Act");
    e.that(r.get(t[3].state, "c1", "direction") == "Right", "direction Right after Act");
    for (const auto& s : kSensors) {
        e.that(r.get(t[3].state, s, "processed") == "false", s + " event consumed in Act");
        e.that(r.get(t[3].state, s, "location") == "Ready", s + " Ready after Act");
    }
    e.that(t[4].state.phase == r.phase("Reset"), "Act -> Reset");
    e.that(t[6].state.phase == r.phase("End"), "Reset -> End");
    e.that(r.get(t[6].state, "c1", "location") == "Idle", "controller Idle at cycle end");
    e.that(r.get(t[6].state, "c1", "direction") == "Right", "direction Right at cycle end");
    double secs = since(t0);
    e.that(secs < 1.0, "took " + std::to_string(secs) + " s");
    return e.verdict("7 steps, all facts match");
}

SolverOptions solver(int jobs)
{
    SolverOptions o;
    o.jobs = jobs;
    o.timeout_s = 60;
    return o;
}

GlobalSpec robot_global(const Model& m)
{
    InvariantSpec inv = spec(m, "robot.srainv");
    GlobalSpec g;
    g.inv = inv.conjunction();
    g.gprime = inv.gprime;
    g.prop = spec(m, "prop.srainv").conjunction();
    return g;
}

Verdict_ parameterized_proof(int jobs)
{
    auto t0 = Clock::now();
    Model m = model("robot.sra");
    auto tasks = build_checks(m, robot_global(m));
    encode_tasks(m, tasks);
    VcReport r = make_report(tasks, discharge(tasks, solver(jobs)));
    Expect e;
    double slowest = 0;
    for (const auto& res : r.results) {
        e.that(res.verdict == Verdict::Valid, res.task + " " + to_string(res.verdict) + " " + res.detail);
        e.that(res.seconds < 60, res.task + " took " + std::to_string(res.seconds) + " s");
        slowest = std::max(slowest, res.seconds);
    }
    double total = since(t0);
    e.that(total < 600, "pipeline took " + std::to_string(total) + " s");
    std::ostringstream d;
    d << std::fixed << std::setprecision(2) << tasks.size() << " tasks Valid, slowest " << slowest << " s, total "
      << total << " s";
    return e.verdict(d.str());
}

Verdict_ agreement(int configs, int jobs)
{
    Model m = model("robot.sra");
    ExprPtr inv = spec(m, "robot.srainv").conjunction();
    ExprPtr prop = spec(m, "prop.srainv").conjunction();
    std::mt19937_64 rng(2024);
    RandomConfigOptions co;
    co.max_instances = 4;
    Expect e;
    std::size_t states = 0;
    std::size_t largest = 0;
    for (int i = 0; i < configs; ++i) {
        Configuration cfg = random_configuration(m, rng, co);
        largest = std::max(largest, cfg.total_instances());
        ReachOptions ro;
        ro.cycles = 3;
        ro.seed = static_cast<std::uint64_t>(i);
        auto r = bounded_reachability_check(m, cfg, inv, prop, ro);
        states += r.states;
        e.that(r.passed(), "configuration " + std::to_string(i) + ": " +
                               (r.violation ? r.violation->what + " violated" : r.error));
    }

    Model weak = model("robot-weak-actleft.sra");
    Configuration wcfg = config(weak, "robot.sracfg");
    auto wr = bounded_reachability_check(weak, wcfg, nullptr, spec(weak, "prop.srainv").conjunction());
    e.that(wr.violation.has_value(), "mutant: simulator found no violation");
    auto tasks = build_checks(weak, robot_global(weak));
    encode_tasks(weak, tasks);
    auto results = discharge(tasks, solver(jobs));
    int invalid = 0;
    for (const auto& r : results)
        invalid += r.verdict == Verdict::Invalid;
    e.that(invalid >= 1, "mutant: no Invalid task");
    return e.verdict(std::to_string(configs) + " configurations (up to " + std::to_string(largest) +
                     " instances), " + std::to_string(states) + " states, no violation; mutant violated and " +
                     std::to_string(invalid) + " task(s) Invalid");
}

std::vector<std::string> corpus_models()
{
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(corpus_dir))
        if (e.path().extension() == ".sra")
            out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

Verdict_ contract_oracle()
{
    auto t0 = Clock::now();
    Expect e;
    std::ostringstream d;
    for (const auto& name : corpus_models()) {
        Model m = model(name);
        auto r = contract_vs_simulator(m, 1000, 7);
        e.that(r.samples == 1000 && r.soundness() == 1.0 && r.precision() == 1.0,
               name + ": sound " + std::to_string(r.soundness()) + ", precise " + std::to_string(r.precision()));
        d << name << " ";
    }
    double secs = since(t0);
    e.that(secs < 30, "took " + std::to_string(secs) + " s");
    d << std::fixed << std::setprecision(2) << "1000 samples each, 100% sound and precise, " << secs << " s";
    return e.verdict(d.str());
}

Verdict_ effect_oracle()
{
    Expect e;
    int effects = 0;
    int checks = 0;
    for (const auto& name : corpus_models()) {
        Model m = model(name);
        auto r = effect_transformation_oracle(m, 200, 100, 31, 4);
        effects += r.effects;
        checks += r.checks;
        for (const auto& s : r.mismatches)
            e.that(false, name + ": " + s);
    }
    return e.verdict(std::to_string(effects) + " effects, " + std::to_string(checks) + " checks, 0 mismatches");
}

Verdict_ grounding(int jobs)
{
    Model m = model("robot-single.sra");
    GroundingPlan p = plan(m);
    Model g = ground_statements(m, p);
    Configuration cfg = config(m, "robot.sracfg");
    Expect e;
    e.that(p.sets.size() == 1, "expected one grounded set");
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::string diff = compare_runs(m, g, cfg, seed, 3);
        e.that(diff.empty(), "seed " + std::to_string(seed) + ": " + diff);
    }
    std::vector<Constraint> extra = spec(m, "robot.srainv").items;
    for (const auto& c : spec(m, "prop.srainv").items)
        extra.push_back(c);
    auto tasks = equivalence_lemmas(g, p, collect_lemma_specs(m, g, p, extra));
    encode_tasks(g, tasks);
    SolverOptions so = solver(jobs);
    so.timeout_s = 10;
    double slowest = 0;
    for (const auto& r : discharge(tasks, so)) {
        e.that(r.verdict == Verdict::Valid, r.task + " " + to_string(r.verdict));
        e.that(r.seconds < 10, r.task + " took " + std::to_string(r.seconds) + " s");
        slowest = std::max(slowest, r.seconds);
    }
    e.that(!tasks.empty(), "no lemmas generated");
    std::ostringstream d;
    d << std::fixed << std::setprecision(2) << "20 seeds trace-identical, " << tasks.size()
      << " lemmas Valid, slowest " << slowest << " s";
    return e.verdict(d.str());
}

Verdict_ frontend_robustness()
{
    Expect e;
    int mutants = 0;
    for (const auto& entry : fs::directory_iterator(path("mutants"))) {
        if (entry.path().extension() != ".sra")
            continue;
        ++mutants;
        std::string file = entry.path().filename().string();
        std::string src = read_text_file(entry.path().string());
        const std::string tag = "// expect: ";
        if (src.rfind(tag, 0) != 0) {
            e.that(false, file + ": no expected code");
            continue;
        }
        std::string expected = src.substr(tag.size(), 4);
        auto p = parse_model(src, file);
        e.that(!p.ok(), file + " accepted");
        e.that(!p.diagnostics.empty() && p.diagnostics.front().code == expected,
               file + ": expected " + expected + ", got " + (p.diagnostics.empty() ? "none" : p.diagnostics.front().code));
    }
    e.that(mutants >= 10, "only " + std::to_string(mutants) + " mutants");
    auto models = corpus_models();
    for (const auto& name : models) {
        Model m = model(name);
        std::string text = print_model(m);
        auto again = parse_model(text, name);
        e.that(again.ok() && structurally_equal(m, *again.value) && print_model(*again.value) == text,
               name + " does not round-trip");
    }
    return e.verdict(std::to_string(mutants) + " mutants rejected with expected codes, " +
                     std::to_string(models.size()) + " models round-trip");
}

Verdict_ order_sensitivity()
{
    Robot r;
    auto in = ScriptedInputs::from_json(read_text_file(path("scenario.json")));
    auto order = OrderPolicy::parse("fixed:Act=sL,sR1,sR2,c1", r.m, r.cfg);
    auto res = run(r.m, r.cfg, order, in, {});
    Expect e;
    e.that(res.error.empty(), "run error: " + res.error);
    if (res.trace.size() < 6)
        return {false, "trace too short"};
    const auto& first = res.trace[3];
    const auto& second = res.trace[4];
    e.that(first.label.kind == StepLabel::Kind::SelfLoop && first.state.phase == r.phase("Act"), "first Act self-loop");
    e.that(first.label.fired == std::vector<int>{-1, -1, -1, 0}, "sensors stutter, controller fires");
    for (const auto& s : kSensors)
        e.that(r.get(first.state, s, "processed") == "true", s + " event persists after first Act");
    e.that(second.label.kind == StepLabel::Kind::SelfLoop && second.state.phase == r.phase("Act"),
           "additional Act self-loop");
    for (const auto& s : kSensors) {
        e.that(r.get(second.state, s, "location") == "Ready", s + " Ready after second Act");
        e.that(r.get(second.state, s, "processed") == "false", s + " event consumed in second Act");
    }
    e.that(res.trace[5].state.phase == r.phase("Reset"), "Act -> Reset after the additional Act");
    return e.verdict("sensors stutter, events persist, one additional Act before Act -> Reset");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Runs the acceptance criteria and prints one line per criterion"};
    corpus_dir = SRA_CORPUS_DIR;
    int jobs = 4;
    int configs = 20;
    app.add_option("--corpus", corpus_dir, "corpus directory");
    app.add_option("--jobs", jobs, "parallel solver processes")->check(CLI::PositiveNumber);
    app.add_option("--configs", configs, "random configurations for the agreement check")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict_()> run;
    };
    std::vector<Criterion> criteria{
        {1, "scenario fidelity", scenario_fidelity},
        {2, "parameterized proof", [&] { return parameterized_proof(jobs); }},
        {3, "agreement with reachability", [&] { return agreement(configs, jobs); }},
        {4, "contract oracle", contract_oracle},
        {5, "effect transformation oracle", effect_oracle},
        {6, "grounding equivalence", [&] { return grounding(jobs); }},
        {7, "frontend robustness", frontend_robustness},
        {8, "order sensitivity", order_sensitivity},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = Clock::now();
        Verdict_ v;
        try {
            v = c.run();
        } catch (const std::exception& ex) {
            v = {false, std::string("exception: ") + ex.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << c.id << " " << c.name << " (" << std::fixed
                  << std::setprecision(2) << since(t0) << " s): " << v.detail << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failed ? 1 : 0;
}
