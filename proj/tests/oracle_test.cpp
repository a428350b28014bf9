#include "sra/core/printer.hpp"
#include "sra/oracle/oracles.hpp"
#include "test_util.hpp"

#include <chrono>

using namespace sra;
using namespace sra::test;

namespace {

const char* const kModels[] = {"robot.sra", "robot-single.sra", "robot-optional.sra", "traffic.sra"};

std::string failures(const ContractOracleReport& r)
{
    std::string out;
    for (const auto& f : r.failures)
        out += "seed " + std::to_string(f.seed) + " " + f.contract + ": " + f.reason + "\n";
    return out;
}

// Contract without frame conditions: the guard, effect and location parts of
// each disjunct only.
Contract frameless(const Model& m, int cls, int phase)
{
    Contract k;
    k.kind = Contract::Kind::Exec;
    k.cls = cls;
    k.phase = phase;
    const auto& c = m.classes[static_cast<std::size_t>(cls)];
    auto loc = [&](int ordinal) {
        return build::eq(m.field_ref(m.self_ref(cls), cls, c.location),
                         m.enum_value(c.location_field().type.name, ordinal));
    };
    std::vector<ExprPtr> ds;
    std::vector<ExprPtr> none;
    for (std::size_t t = 0; t < c.transitions.size(); ++t) {
        const auto& tr = c.transitions[t];
        if (tr.phase_index != phase)
            continue;
        none.push_back(build::not_(build::old(build::conj(loc(tr.from_index), tr.guard))));
        ExprPtr d = build::conj({build::old(build::conj(loc(tr.from_index), extended_guard(m, cls, static_cast<int>(t)))),
                                 effect_formula(m, cls, transform_effect(m, cls, tr.effect)), loc(tr.to_index),
                                 build::executed(m.self_ref(cls), cls)});
        k.disjuncts.emplace_back(static_cast<int>(t), d);
        ds.push_back(d);
    }
    none.push_back(build::executed(m.self_ref(cls), cls));
    k.disjuncts.emplace_back(-1, build::conj(none));
    ds.push_back(k.disjuncts.back().second);
    k.formula = build::disj(ds);
    return k;
}

} // namespace

TEST(Oracle, RandomConfigurationsSatisfyGamma)
{
    for (const char* name : kModels) {
        Model m = load_model(name);
        std::mt19937_64 rng(7);
        for (int i = 0; i < 20; ++i) {
            Configuration cfg = random_configuration(m, rng);
            for (const auto& g : evaluate_gamma(m, cfg))
                EXPECT_TRUE(g.holds) << name << " " << g.label;
            for (const auto& inst : cfg.instances) {
                EXPECT_GE(inst.size(), 1u);
                EXPECT_LE(inst.size(), 4u);
            }
        }
    }
}

TEST(Oracle, RandomConfigurationsVary)
{
    Model m = load_model("robot.sra");
    std::mt19937_64 rng(3);
    std::set<std::size_t> sizes;
    for (int i = 0; i < 20; ++i)
        sizes.insert(random_configuration(m, rng).total_instances());
    EXPECT_GE(sizes.size(), 3u);
}

TEST(Oracle, UnsatisfiableConstraintsReported)
{
    auto p = parse_model(R"(
enum L { A }
class K {
  var location : L = A
  param n : Int
}
scheduler {
  phases P, Q;
  initial P;
  final Q;
  trans P -> Q when true;
}
constraints {
  impossible: forall k in All_K : k.n > 10 && k.n < 5;
}
)",
                         "impossible.sra");
    ASSERT_TRUE(p.ok()) << p.messages();
    std::mt19937_64 rng(1);
    RandomConfigOptions o;
    o.max_tries = 3;
    EXPECT_THROW(random_configuration(*p.value, rng, o), OracleError);
}

TEST(Oracle, ContractSoundAndPreciseOnCorpus)
{
    for (const char* name : kModels) {
        Model m = load_model(name);
        auto r = contract_vs_simulator(m, 300, 11);
        EXPECT_EQ(r.samples, 300) << name;
        EXPECT_TRUE(r.passed()) << name << "\n" << failures(r);
    }
}

TEST(Oracle, ZeroSamplesVacuouslyPass)
{
    Model m = load_model("robot.sra");
    auto r = contract_vs_simulator(m, 0, 1);
    EXPECT_EQ(r.samples, 0);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.soundness(), 1.0);
}

TEST(Oracle, FramelessContractIsSoundButImprecise)
{
    Model m = load_model("robot.sra");
    auto r = contract_vs_simulator(m, 300, 5, frameless);
    EXPECT_EQ(r.sound, r.samples) << failures(r);
    EXPECT_LT(r.precise, r.samples);
}

TEST(Oracle, BrokenContractIsCaught)
{
    Model m = load_model("robot.sra");
    // Drops the first transition disjunct of every exec contract.
    auto broken = [](const Model& mm, int cls, int phase) {
        Contract k = exec_contract(mm, cls, phase);
        if (k.disjuncts.size() > 1)
            k.disjuncts.erase(k.disjuncts.begin());
        std::vector<ExprPtr> ds;
        for (const auto& d : k.disjuncts)
            ds.push_back(d.second);
        k.formula = build::disj(ds);
        return k;
    };
    auto r = contract_vs_simulator(m, 300, 5, broken);
    EXPECT_LT(r.sound, r.samples);
    EXPECT_FALSE(r.failures.empty());
}

TEST(Oracle, SamplesReplayFromSeed)
{
    Model m = load_model("robot.sra");
    auto a = contract_vs_simulator(m, 50, 99);
    auto b = contract_vs_simulator(m, 50, 99);
    EXPECT_EQ(a.sound, b.sound);
    EXPECT_EQ(a.precise, b.precise);
}

TEST(Oracle, EffectTransformationMatchesExecution)
{
    for (const char* name : kModels) {
        Model m = load_model(name);
        auto r = effect_transformation_oracle(m, 60, 50, 21);
        EXPECT_GT(r.effects, 60);
        std::string msgs;
        for (const auto& s : r.mismatches)
            msgs += s + "\n";
        EXPECT_TRUE(r.passed()) << name << "\n" << msgs;
    }
}

TEST(Oracle, RandomEffectsAreWellFormed)
{
    Model m = load_model("traffic.sra");
    std::mt19937_64 rng(4);
    int havocs = 0;
    int loops = 0;
    for (int i = 0; i < 200; ++i) {
        int cls = i % static_cast<int>(m.classes.size());
        StmtPtr s = random_effect(m, cls, 4, rng);
        for_each_stmt(s, [&](const Stmt& st) {
            havocs += st.kind == StmtKind::Havoc;
            loops += st.kind == StmtKind::ForallAssign;
        });
        // Printed effects re-parse inside a transition of the same class.
        std::string printed = print(s);
        EXPECT_FALSE(printed.empty());
    }
    EXPECT_GT(havocs, 0);
    EXPECT_GT(loops, 0);
}

TEST(Oracle, ReachabilityRobotHolds)
{
    Model m = load_model("robot.sra");
    Configuration cfg = load_config(m, "robot.sracfg");
    ExprPtr inv = load_invariant(m, "robot.srainv").conjunction();
    ExprPtr prop = load_invariant(m, "prop.srainv").conjunction();
    auto r = bounded_reachability_check(m, cfg, inv, prop);
    EXPECT_TRUE(r.passed()) << r.error << (r.violation ? r.violation->what : "");
    EXPECT_GT(r.lf_states, 0u);
}

TEST(Oracle, ReachabilityFindsWeakenedGuardViolation)
{
    Model m = load_model("robot-weak-actleft.sra");
    Configuration cfg = load_config(m, "robot.sracfg");
    ExprPtr prop = load_invariant(m, "prop.srainv").conjunction();
    auto r = bounded_reachability_check(m, cfg, nullptr, prop);
    ASSERT_TRUE(r.violation.has_value());
    EXPECT_EQ(r.violation->what, "property");
    const auto& trace = r.violation->trace;
    ASSERT_FALSE(trace.empty());
    EXPECT_EQ(trace.front().label.kind, StepLabel::Kind::Init);
    EXPECT_EQ(trace.back().state.phase, m.scheduler.final_phase);
    EXPECT_FALSE(holds(prop, m, cfg, trace.back().state));
}

TEST(Oracle, ReachabilityOnRandomConfigurations)
{
    Model m = load_model("robot.sra");
    ExprPtr inv = load_invariant(m, "robot.srainv").conjunction();
    ExprPtr prop = load_invariant(m, "prop.srainv").conjunction();
    std::mt19937_64 rng(17);
    RandomConfigOptions o;
    o.max_instances = 3;
    for (int i = 0; i < 5; ++i) {
        Configuration cfg = random_configuration(m, rng, o);
        auto r = bounded_reachability_check(m, cfg, inv, prop);
        EXPECT_TRUE(r.passed()) << r.error;
    }
}
