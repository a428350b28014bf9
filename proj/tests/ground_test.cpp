#include "sra/core/printer.hpp"
#include "sra/ground/grounding.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/sim/eval.hpp"
#include "test_util.hpp"

#include <random>

using namespace sra;
using namespace sra::test;

namespace {

std::string corpus_text(const std::string& name)
{
    return read_text_file(corpus(name));
}

Model model_from(const std::string& text)
{
    auto p = parse_model(text, "variant.sra");
    if (!p.ok())
        throw std::runtime_error(p.messages());
    return *p.value;
}

std::string replaced(std::string text, const std::string& from, const std::string& to)
{
    auto at = text.find(from);
    if (at == std::string::npos)
        throw std::runtime_error("pattern not found: " + from);
    return text.replace(at, from.size(), to);
}

// actLeft marks only the left sensors as processed.
std::string left_effect_variant(const std::string& base)
{
    return replaced(base, "direction := Left; forall s in allSensors", "direction := Left; forall s in leftSensors");
}

// Formulas over the robot sets; each exercises one grounding rule.
const char* kFormulas[] = {
    "forall c in All_Controller : exists s in c.leftSensors : s.obstacle",
    "forall c in All_Controller : forall s in c.leftSensors : s.location == Go",
    "exists c in All_Controller : forall s in c.leftSensors : !s.processed",
    "forall c in All_Controller : forall s in All_Sensor : s in c.leftSensors => !s.obstacle",
    "forall c in All_Controller : |c.leftSensors| == 1",
    "forall c in All_Controller : |c.leftSensors| >= 1 || c.direction == Stop",
    "forall c in All_Controller : 0 < |c.leftSensors|",
    "forall c in All_Controller : c.leftSensors !! c.rightSensors",
    "forall c in All_Controller : c.leftSensors subset c.allSensors",
    "forall c in All_Controller : c.allSensors subset c.leftSensors union c.rightSensors",
    "forall c in All_Controller : c.leftSensors union c.rightSensors == c.allSensors",
    "forall c in All_Controller : forall s in c.leftSensors union c.rightSensors : s.obstacle || !s.processed",
    "forall c1 in All_Controller : forall c2 in All_Controller : c1 != c2 => c1.leftSensors !! c2.leftSensors",
    "forall c in All_Controller : exists s in c.leftSensors : exists t in c.rightSensors : s.obstacle == t.obstacle",
};

// Evaluates every formula before and after grounding on random
// Γ-satisfying configurations and states; returns the sizes of the grounded
// set seen.
std::set<std::size_t> check_agreement(const Model& m, int configs, std::uint64_t seed)
{
    GroundingPlan p = plan(m);
    Model g = ground_statements(m, p);
    const int cls = m.class_index("Controller");
    const int left = m.classes[static_cast<std::size_t>(cls)].find_field("leftSensors");
    std::set<std::size_t> sizes;
    std::mt19937_64 rng(seed);
    RandomConfigOptions opts;
    opts.max_instances = 3;
    for (int i = 0; i < configs; ++i) {
        Configuration cfg = random_configuration(m, rng, opts);
        Configuration gcfg = ground_configuration(g, cfg);
        for (std::size_t c = 0; c < cfg.instances[static_cast<std::size_t>(cls)].size(); ++c)
            sizes.insert(cfg.get({cls, static_cast<int>(c)}, left).set.size());
        for (int k = 0; k < 5; ++k) {
            GlobalState s = random_state(m, cfg, rng);
            for (const char* src : kFormulas) {
                ExprPtr e = parse_or_throw(m, src, ExprMode::Invariant);
                ExprPtr ge = ground_formula(e, p);
                EXPECT_EQ(holds(e, m, cfg, s), holds(ge, g, gcfg, s)) << src << "\n  grounded: " << print(ge);
            }
        }
    }
    return sizes;
}

std::vector<Constraint> robot_specs(const Model& m)
{
    std::vector<Constraint> out = load_invariant(m, "robot.srainv").items;
    for (auto& c : load_invariant(m, "prop.srainv").items)
        out.push_back(c);
    return out;
}

} // namespace

TEST(GroundingPlan, RobotHasNoUnitBounds)
{
    Model m = load_model("robot.sra");
    GroundingPlan p = plan(m);
    EXPECT_TRUE(p.empty());
    EXPECT_TRUE(p.rejected.empty());
}

TEST(GroundingPlan, ExactlyOneIsNonNullable)
{
    Model m = load_model("robot-single.sra");
    GroundingPlan p = plan(m);
    ASSERT_EQ(p.sets.size(), 1u);
    const auto& g = p.sets[0];
    EXPECT_EQ(g.set_name, "leftSensors");
    EXPECT_EQ(g.grounded_name, "leftSensor");
    EXPECT_EQ(g.elem, "Sensor");
    EXPECT_FALSE(g.nullable);
    EXPECT_EQ(g.grounded_field, static_cast<int>(m.classes[static_cast<std::size_t>(g.cls)].fields.size()));
}

TEST(GroundingPlan, AtMostOneIsNullable)
{
    GroundingPlan p = plan(load_model("robot-optional.sra"));
    ASSERT_EQ(p.sets.size(), 1u);
    EXPECT_TRUE(p.sets[0].nullable);
}

TEST(GroundingPlan, UpperAndLowerBoundCombine)
{
    std::string text = replaced(corpus_text("robot-optional.sra"), "atMostOneLeft:",
                                "hasLeft: forall c in All_Controller : |c.leftSensors| >= 1;\n  atMostOneLeft:");
    GroundingPlan p = plan(model_from(text));
    ASSERT_EQ(p.sets.size(), 1u);
    EXPECT_FALSE(p.sets[0].nullable);
}

TEST(GroundingPlan, LargerBoundsAreRejected)
{
    std::string text = replaced(corpus_text("robot-optional.sra"), "|c.leftSensors| <= 1", "|c.leftSensors| <= 2");
    GroundingPlan p = plan(model_from(text));
    EXPECT_TRUE(p.empty());
    ASSERT_EQ(p.rejected.size(), 1u);
    EXPECT_NE(p.rejected[0].find("Controller.leftSensors"), std::string::npos);
    EXPECT_NE(p.rejected[0].find("k <= 1"), std::string::npos);
}

TEST(GroundFormula, Examples)
{
    Model single = load_model("robot-single.sra");
    Model optional = load_model("robot-optional.sra");
    const char* src = "forall c in All_Controller : exists s in c.leftSensors : s.obstacle";
    EXPECT_EQ(print(ground_formula(parse_or_throw(single, src, ExprMode::Invariant), plan(single))),
              "forall c in All_Controller : c.leftSensor.obstacle");
    EXPECT_EQ(print(ground_formula(parse_or_throw(optional, src, ExprMode::Invariant), plan(optional))),
              "forall c in All_Controller : c.leftSensor != null && c.leftSensor.obstacle");

    ExprPtr plain = parse_or_throw(single, "forall c in All_Controller : forall s in c.rightSensors : s.obstacle",
                                   ExprMode::Invariant);
    EXPECT_EQ(ground_formula(plain, plan(single)), plain);
}

TEST(GroundFormula, CardinalityAtomsFold)
{
    Model single = load_model("robot-single.sra");
    Model optional = load_model("robot-optional.sra");
    auto ground = [](const Model& m, const char* src) {
        return print(ground_formula(parse_or_throw(m, src, ExprMode::Invariant), plan(m)));
    };
    EXPECT_EQ(ground(single, "forall c in All_Controller : |c.leftSensors| == 1"), "forall c in All_Controller : true");
    EXPECT_EQ(ground(optional, "forall c in All_Controller : |c.leftSensors| >= 1"),
              "forall c in All_Controller : c.leftSensor != null");
    EXPECT_EQ(ground(optional, "forall c in All_Controller : |c.leftSensors| < 1"),
              "forall c in All_Controller : c.leftSensor == null");
}

TEST(GroundFormula, AgreesWithSetSemanticsOnUnitSets)
{
    auto sizes = check_agreement(load_model("robot-single.sra"), 20, 11);
    EXPECT_EQ(sizes, std::set<std::size_t>{1});
}

TEST(GroundFormula, AgreesWithSetSemanticsOnOptionalSets)
{
    auto sizes = check_agreement(load_model("robot-optional.sra"), 40, 12);
    EXPECT_EQ(sizes, (std::set<std::size_t>{0, 1}));
}

TEST(GroundStatements, EmptyPlanKeepsModel)
{
    Model m = load_model("robot.sra");
    EXPECT_TRUE(structurally_equal(ground_statements(m, plan(m)), m));
}

TEST(GroundStatements, GroundedModelRoundTrips)
{
    for (const char* name : {"robot-single.sra", "robot-optional.sra"}) {
        Model m = load_model(name);
        Model g = ground_statements(m, plan(m));
        const auto& ctrl = g.classes[static_cast<std::size_t>(g.class_index("Controller"))];
        EXPECT_TRUE(ctrl.fields[static_cast<std::size_t>(ctrl.find_field("leftSensors"))].ghost) << name;
        EXPECT_TRUE(check_model(g).empty()) << name;
        std::string text = print_model(g);
        auto again = parse_model(text, name);
        ASSERT_TRUE(again.ok()) << again.messages() << text;
        EXPECT_TRUE(structurally_equal(g, *again.value)) << text;
        EXPECT_EQ(print_model(*again.value), text);
    }
}

TEST(GroundStatements, QuantifiedAssignmentBecomesFieldAssignment)
{
    Model single = model_from(left_effect_variant(corpus_text("robot-single.sra")));
    Model g = ground_statements(single, plan(single));
    const auto& ctrl = g.classes[static_cast<std::size_t>(g.class_index("Controller"))];
    std::string effect = print(ctrl.transitions[1].effect);
    EXPECT_NE(effect.find("leftSensor.processed := true"), std::string::npos) << effect;
    EXPECT_EQ(effect.find("forall"), std::string::npos) << effect;

    Model optional = model_from(left_effect_variant(corpus_text("robot-optional.sra")));
    Model go = ground_statements(optional, plan(optional));
    const auto& octrl = go.classes[static_cast<std::size_t>(go.class_index("Controller"))];
    std::string guarded = print(octrl.transitions[1].effect);
    EXPECT_NE(guarded.find("if leftSensor != null then { leftSensor.processed := true; }"), std::string::npos) << guarded;
    EXPECT_TRUE(check_model(go).empty());
}

TEST(GroundStatements, TracesIdenticalOverSeeds)
{
    Model m = load_model("robot-single.sra");
    Model g = ground_statements(m, plan(m));
    Configuration cfg = load_config(m, "robot.sracfg");
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
        EXPECT_EQ(compare_runs(m, g, cfg, seed, 3), "") << "seed " << seed;
}

TEST(GroundStatements, TracesIdenticalOnRandomConfigurations)
{
    std::vector<std::string> texts{corpus_text("robot-single.sra"), corpus_text("robot-optional.sra"),
                                   left_effect_variant(corpus_text("robot-single.sra")),
                                   left_effect_variant(corpus_text("robot-optional.sra"))};
    std::mt19937_64 rng(5);
    RandomConfigOptions opts;
    opts.max_instances = 3;
    for (const auto& text : texts) {
        Model m = model_from(text);
        Model g = ground_statements(m, plan(m));
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            Configuration cfg = random_configuration(m, rng, opts);
            EXPECT_EQ(compare_runs(m, g, cfg, seed, 3), "") << "seed " << seed << "\n" << text;
        }
    }
}

TEST(EquivalenceLemmas, EveryGroundedFormulaHasALemma)
{
    Model m = load_model("robot-single.sra");
    GroundingPlan p = plan(m);
    Model g = ground_statements(m, p);
    auto specs = collect_lemma_specs(m, g, p, robot_specs(m));
    std::set<std::string> names;
    for (const auto& s : specs) {
        names.insert(s.name);
        EXPECT_TRUE(mentions_grounded(s.grounded, p)) << s.name;
    }
    for (const auto& c : all_contracts(g))
        if (mentions_grounded(c.formula, p))
            EXPECT_TRUE(names.count(contract_name(g, c))) << contract_name(g, c);
    for (const auto& c : robot_specs(m))
        EXPECT_EQ(names.count(c.label), mentions_grounded(ground_formula(c.expr, p), p) ? 1u : 0u) << c.label;
    EXPECT_TRUE(names.count("T_Controller(Act)"));
    EXPECT_TRUE(names.count("prop"));
    EXPECT_TRUE(names.count("leftClear"));
    auto tasks = equivalence_lemmas(g, p, specs);
    ASSERT_EQ(tasks.size(), specs.size());
    for (const auto& t : tasks)
        EXPECT_EQ(t.kind, TaskKind::GroundingLemma);
}

TEST(EquivalenceLemmas, RobotSingleLemmasValid)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot-single.sra");
    GroundingPlan p = plan(m);
    Model g = ground_statements(m, p);
    auto tasks = equivalence_lemmas(g, p, collect_lemma_specs(m, g, p, robot_specs(m)));
    ASSERT_FALSE(tasks.empty());
    encode_tasks(g, tasks);
    SolverOptions so;
    so.timeout_s = 10;
    so.jobs = 4;
    auto results = discharge(tasks, so);
    for (const auto& r : results) {
        EXPECT_EQ(r.verdict, Verdict::Valid) << r.task << " " << r.detail;
        EXPECT_LT(r.seconds, 10.0) << r.task;
    }
}

TEST(EquivalenceLemmas, OptionalLemmasValidAndNullGuardMatters)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot-optional.sra");
    GroundingPlan p = plan(m);
    Model g = ground_statements(m, p);
    std::vector<LemmaSpec> specs{{"prop", -1, load_invariant(m, "prop.srainv").conjunction(), nullptr}};
    SolverOptions so;
    so.timeout_s = 10;
    auto good = equivalence_lemmas(g, p, specs);
    encode_tasks(g, good);
    EXPECT_EQ(discharge_one(good[0], so).verdict, Verdict::Valid);

    GroundOptions mutant;
    mutant.drop_null_guard = true;
    auto bad = equivalence_lemmas(g, p, specs, mutant);
    encode_tasks(g, bad);
    EXPECT_EQ(discharge_one(bad[0], so).verdict, Verdict::Invalid);
}

TEST(EquivalenceLemmas, UngroundedSpecIsTrivial)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot-single.sra");
    GroundingPlan p = plan(m);
    Model g = ground_statements(m, p);
    ExprPtr e = parse_or_throw(m, "forall c in All_Controller : forall s in c.rightSensors : !s.processed",
                               ExprMode::Invariant);
    auto tasks = equivalence_lemmas(g, p, {{"rightOnly", -1, e, nullptr}});
    encode_tasks(g, tasks);
    EXPECT_EQ(tasks[0].id, "lemma_all_rightOnly");
    EXPECT_EQ(discharge_one(tasks[0], {}).verdict, Verdict::Valid);
}

TEST(EquivalenceLemmas, GroundedRobotSingleVerifies)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot-single.sra");
    GroundingPlan p = plan(m);
    Model g = ground_statements(m, p);
    InvariantSpec inv = load_invariant(g, "robot.srainv");
    GlobalSpec spec;
    spec.inv = ground_formula(inv.conjunction(), p);
    spec.prop = ground_formula(load_invariant(g, "prop.srainv").conjunction(), p);
    spec.gprime = inv.gprime;
    auto tasks = build_checks(g, spec);
    auto local = build_local_contract_tasks(g);
    tasks.insert(tasks.end(), local.begin(), local.end());
    encode_tasks(g, tasks);
    SolverOptions so;
    so.jobs = 8;
    VcReport r = make_report(tasks, discharge(tasks, so));
    EXPECT_EQ(r.overall, Overall::Proven) << r.text();
}
