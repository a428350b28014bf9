#include "sra/core/printer.hpp"
#include "sra/core/rewrite.hpp"
#include "sra/oracle/oracles.hpp"
#include "sra/vc/vcgen.hpp"
#include "test_util.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace sra;
using namespace sra::test;

namespace {

GlobalSpec robot_spec(const Model& m)
{
    InvariantSpec inv = load_invariant(m, "robot.srainv");
    GlobalSpec g;
    g.inv = inv.conjunction();
    g.prop = load_invariant(m, "prop.srainv").conjunction();
    g.gprime = inv.gprime;
    return g;
}

VerificationTask closed_task(const std::string& id, ExprPtr f)
{
    VerificationTask t;
    t.id = id;
    t.formula = std::move(f);
    return t;
}

std::string tail_assert(const std::string& smt)
{
    auto end = smt.rfind("(check-sat)");
    auto begin = smt.rfind("(assert ", end);
    return smt.substr(begin, end - begin);
}

// Replaces the event-reset conjuncts (!e) of every exec disjunct by e == old(e).
Contract keep_events(const Model& m, const Contract& k)
{
    if (k.kind != Contract::Kind::Exec)
        return k;
    Contract out = k;
    std::vector<ExprPtr> ds;
    for (auto& [t, d] : out.disjuncts) {
        if (t >= 0 && d->op == Op::And) {
            std::vector<ExprPtr> parts;
            for (const auto& p : d->args) {
                const auto& c = m.classes[static_cast<std::size_t>(k.cls)];
                bool reset = p->op == Op::Not && p->args[0]->op == Op::Field && p->args[0]->field >= 0 &&
                             c.fields[static_cast<std::size_t>(p->args[0]->field)].kind == FieldKind::Event;
                parts.push_back(reset ? build::eq(p->args[0], build::old(p->args[0])) : p);
            }
            d = build::conj(parts);
        }
        ds.push_back(d);
    }
    out.formula = build::disj(ds);
    return out;
}

} // namespace

// --- encoding ---------------------------------------------------------------

TEST(Vc, RobotPreambleDeclaresSortsAndSets)
{
    Model m = load_model("robot.sra");
    std::string pre = encode_model(m);
    for (const char* s : {"(declare-sort Sensor 0)", "(declare-sort Controller 0)", "(declare-fun All_Sensor (Sensor) Bool)",
                          "(declare-fun Controller.leftSensors (Controller Sensor) Bool)",
                          "(declare-fun Controller.rightSensors (Controller Sensor) Bool)",
                          "(declare-fun Controller.allSensors (Controller Sensor) Bool)",
                          "(declare-fun pre.Controller.direction (Controller) Direction)",
                          "(declare-fun post.Sensor.executed (Sensor) Bool)",
                          "(declare-datatype Direction ((Direction.Forward) (Direction.Stop) (Direction.Left) (Direction.Right)))",
                          "(declare-datatype TimerVal ((timer.inactive) (timer.active (timer.count Int))))"})
        EXPECT_NE(pre.find(s), std::string::npos) << s;
    for (const char* label : {"disjointSides", "noSharing", "hasLeft", "hasRight", "allIsUnion"})
        EXPECT_NE(pre.find(std::string("; constraint ") + label), std::string::npos) << label;
}

TEST(Vc, AtLeastOneExpandsToWitness)
{
    Model m = load_model("robot.sra");
    std::string pre = encode_model(m);
    EXPECT_NE(pre.find("(assert (forall ((c!0 Controller)) (=> (All_Controller c!0) (exists ((w!1 Sensor)) (and "
                       "(Controller.leftSensors c!0 w!1))))))"),
              std::string::npos);
}

TEST(Vc, NoConstraintsNoAxioms)
{
    auto p = parse_model(R"(
enum L { A }
class K {
  var location : L = A
}
scheduler {
  phases P, Q;
  initial P;
  final Q;
  trans P -> Q when true;
}
)",
                         "plain.sra");
    ASSERT_TRUE(p.ok()) << p.messages();
    EXPECT_EQ(encode_model(*p.value).find("; constraint"), std::string::npos);
}

TEST(Vc, CardinalityAboveBoundRejected)
{
    Model m = load_model("robot.sra");
    ExprPtr f = parse_or_throw(m, "forall c in All_Controller : |c.leftSensors| >= 5", ExprMode::Invariant);
    EXPECT_THROW(encode_formula(m, f), VcError);
    SmtOptions wide;
    wide.card_bound = 5;
    EXPECT_NO_THROW(encode_formula(m, f, wide));
}

// |s| op k against the size of s, on pinned finite universes.
TEST(Vc, CardinalityExpansionMatchesCounting)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot.sra");
    const std::pair<const char*, bool (*)(int, int)> ops[] = {
        {">=", [](int n, int k) { return n >= k; }}, {">", [](int n, int k) { return n > k; }},
        {"<=", [](int n, int k) { return n <= k; }}, {"<", [](int n, int k) { return n < k; }},
        {"==", [](int n, int k) { return n == k; }}, {"!=", [](int n, int k) { return n != k; }}};
    std::string queries;
    std::vector<bool> expected;
    for (int n = 0; n <= 3; ++n) {
        for (const auto& [op, truth] : ops) {
            for (int k = 0; k <= 3; ++k) {
                ExprPtr f = parse_or_throw(
                    m, "forall c in All_Controller : |c.leftSensors| " + std::string(op) + " " + std::to_string(k),
                    ExprMode::Invariant);
                std::string q = "(push)\n(declare-const c Controller)\n(assert (All_Controller c))\n"
                                "(assert (forall ((x Controller)) (= x c)))\n";
                q += "(declare-const s0 Sensor)(declare-const s1 Sensor)(declare-const s2 Sensor)"
                     "(declare-const s3 Sensor)\n(assert (distinct s0 s1 s2 s3))\n"
                     "(assert (forall ((y Sensor)) (or (= y s0) (= y s1) (= y s2) (= y s3))))\n";
                q += "(assert (forall ((y Sensor)) (= (Controller.leftSensors c y) (or false";
                for (int i = 0; i < n; ++i)
                    q += " (= y s" + std::to_string(i) + ")";
                q += "))))\n(assert " + encode_formula(m, f) + ")\n(check-sat)\n(pop)\n";
                queries += q;
                expected.push_back(truth(n, k));
            }
        }
    }
    std::string script = "(set-logic ALL)\n";
    script += "(declare-sort Sensor 0)(declare-sort Controller 0)(declare-fun All_Controller (Controller) Bool)"
              "(declare-fun All_Sensor (Sensor) Bool)(declare-fun Controller.leftSensors (Controller Sensor) Bool)\n";
    VerificationTask t = closed_task("card", build::true_());
    t.smt = script + queries;
    // discharge_one reads only the first answer; run the batch directly instead.
    std::string path = (std::filesystem::temp_directory_path() / "sra_card.smt2").string();
    {
        std::ofstream(path) << t.smt;
    }
    std::string cmd = "z3 " + path;
    FILE* pipe = popen(cmd.c_str(), "r");
    ASSERT_NE(pipe, nullptr);
    std::vector<std::string> answers;
    char line[256];
    while (fgets(line, sizeof line, pipe)) {
        std::string a(line);
        a.erase(a.find_last_not_of("\r\n") + 1);
        answers.push_back(a);
    }
    pclose(pipe);
    ASSERT_EQ(answers.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        EXPECT_EQ(answers[i], expected[i] ? "sat" : "unsat") << "query " << i;
}

TEST(Vc, NegationDiscipline)
{
    Model m = load_model("robot.sra");
    auto tasks = build_checks(m, robot_spec(m));
    auto local = build_local_contract_tasks(m);
    tasks.insert(tasks.end(), local.begin(), local.end());
    encode_tasks(m, tasks);
    for (const auto& t : tasks) {
        EXPECT_EQ(tail_assert(t.smt), "(assert (not " + encode_formula(m, t.formula) + "))\n") << t.id;
        EXPECT_EQ(t.smt.find("; " + t.id + "\n"), 0u);
        // Balanced parentheses: the text re-parses as a sequence of s-expressions.
        int depth = 0;
        for (char ch : t.smt) {
            depth += ch == '(';
            depth -= ch == ')';
            ASSERT_GE(depth, 0) << t.id;
        }
        EXPECT_EQ(depth, 0) << t.id;
    }
}

// --- task construction ------------------------------------------------------

TEST(Vc, RobotTaskInventory)
{
    Model m = load_model("robot.sra");
    auto tasks = build_checks(m, robot_spec(m));
    std::map<TaskKind, int> count;
    std::set<std::string> ids;
    for (const auto& t : tasks) {
        ++count[t.kind];
        EXPECT_TRUE(ids.insert(t.id).second) << t.id;
        EXPECT_TRUE(free_vars(t.formula).empty()) << t.id;
        EXPECT_FALSE(contains_op(t.formula, Op::Self)) << t.id;
    }
    // Three self-loop phases, two classes.
    EXPECT_EQ(count[TaskKind::Establishment], 6);
    EXPECT_EQ(count[TaskKind::Stability], 12);
    EXPECT_EQ(count[TaskKind::SelfLoopPreservation], 6);
    EXPECT_EQ(count[TaskKind::Init], 1);
    EXPECT_EQ(count[TaskKind::PhaseNonFinal], 2);
    EXPECT_EQ(count[TaskKind::PhaseFinal], 1);
    EXPECT_EQ(count[TaskKind::Reset], 1);
    EXPECT_EQ(count[TaskKind::PropertyImplication], 1);
    EXPECT_TRUE(ids.count("stability_Sensor-Controller_Sense"));
    EXPECT_TRUE(ids.count("phasefinal_all_Reset-End"));
    EXPECT_TRUE(ids.count("reset_all_End-Sense"));
}

TEST(Vc, EstablishmentUsesDefaultLocalCondition)
{
    Model m = load_model("robot.sra");
    auto tasks = build_checks(m, robot_spec(m));
    auto it = std::find_if(tasks.begin(), tasks.end(), [](const auto& t) { return t.id == "establishment_Sensor_Sense"; });
    ASSERT_NE(it, tasks.end());
    std::string s = print(it->formula);
    EXPECT_NE(s.find("forall c in All_Sensor : !c.executed"), std::string::npos) << s;
    EXPECT_NE(s.find("(forall x in All_Sensor : !x.executed) && (forall x in All_Controller : !x.executed)"),
              std::string::npos)
        << s;
}

TEST(Vc, ResetFramesEveryNonInputField)
{
    Model m = load_model("robot.sra");
    auto tasks = build_checks(m, robot_spec(m));
    auto it = std::find_if(tasks.begin(), tasks.end(), [](const auto& t) { return t.kind == TaskKind::Reset; });
    ASSERT_NE(it, tasks.end());
    std::string s = print(it->formula);
    EXPECT_NE(s.find("x.location == old(x.location)"), std::string::npos);
    EXPECT_NE(s.find("x.processed == old(x.processed)"), std::string::npos);
    EXPECT_EQ(s.find("x.obstacle == old(x.obstacle)"), std::string::npos);
}

TEST(Vc, LocalConditionWithOldRejected)
{
    Model m = load_model("robot.sra");
    GlobalSpec g = robot_spec(m);
    int sensor = m.class_index("Sensor");
    g.gprime[{m.scheduler.find_phase("Sense"), sensor}] =
        build::old(build::executed(m.self_ref(sensor), sensor));
    EXPECT_THROW(build_checks(m, g), VcError);
}

TEST(Vc, PropertyAtOtherPhase)
{
    Model m = load_model("robot.sra");
    GlobalSpec g = robot_spec(m);
    g.prop_phase = m.scheduler.find_phase("Reset");
    auto tasks = build_checks(m, g);
    EXPECT_EQ(tasks.back().id, "property_all_Reset");
}

TEST(Vc, WeakestPreconditionRules)
{
    auto p = parse_model(R"(
enum L { A }
class Peer {
  var location : L = A
  var mark : Int = 0
}
class K {
  var location : L = A
  var x : Int = 0
  set peers : Set<Peer>
  transition t = (A, true, A, { x := x + 1; forall p in peers { p.mark := x; } }, P)
  transition h = (A, true, A, { x := *; }, P)
}
scheduler {
  phases P, Q;
  initial P;
  final Q;
  trans P -> P when forall k in All : !k.executed;
  trans P -> Q when forall k in All : k.executed;
}
)",
                         "wp.sra");
    ASSERT_TRUE(p.ok()) << p.messages();
    const Model& m = *p.value;
    int k = m.class_index("K");
    const auto& tr = m.classes[static_cast<std::size_t>(k)].transitions;
    ExprPtr post = parse_or_throw(m, "x > old(x) && (forall q in peers : q.mark == x)", ExprMode::TwoState, k);
    EXPECT_EQ(print(wp(m, k, tr[0].effect, post)),
              "x + 1 > old(x) && (forall q in peers : (if q in peers then x + 1 else q.mark) == x + 1)");
    ExprPtr w = wp(m, k, tr[1].effect, parse_or_throw(m, "x == 0", ExprMode::TwoState, k));
    EXPECT_EQ(w->op, Op::ScalarForall);
}

// --- properties -------------------------------------------------------------

// The frame of an exec step holds on every concrete single-instance exec.
TEST(Vc, FrameAdequacy)
{
    for (const char* name : {"robot.sra", "traffic.sra"}) {
        Model m = load_model(name);
        std::mt19937_64 rng(5);
        for (int round = 0; round < 20; ++round) {
            Configuration cfg = random_configuration(m, rng);
            for (int p : self_loop_phases(m)) {
                GlobalState pre = random_state(m, cfg, rng, {p});
                for (ObjRef inst : all_instances(cfg)) {
                    ExprPtr frame = step_frame(m, inst.cls, p, m.self_ref(inst.cls));
                    ExecResult r = exec_local(m, cfg, pre, inst, p, random_havoc(rng()));
                    r.state.set_executed(inst, true);
                    EXPECT_TRUE(holds(frame, m, cfg, r.state, &pre, inst)) << name << " " << cfg.name_of(inst);
                }
            }
        }
    }
}

// Every task of the robot pipeline holds on concrete pre/post pairs drawn
// from reachable states of small configurations.
TEST(Vc, FiniteStructureSoundness)
{
    Model m = load_model("robot.sra");
    GlobalSpec g = robot_spec(m);
    auto tasks = build_checks(m, g);
    auto local = build_local_contract_tasks(m);
    tasks.insert(tasks.end(), local.begin(), local.end());
    if (have_solver()) {
        encode_tasks(m, tasks);
        SolverOptions o;
        o.jobs = 4;
        auto results = discharge(tasks, o);
        for (const auto& r : results)
            ASSERT_EQ(r.verdict, Verdict::Valid) << r.task;
    }
    std::mt19937_64 rng(23);
    RandomConfigOptions co;
    co.max_instances = 3;
    std::size_t pairs = 0;
    for (int round = 0; round < 8; ++round) {
        Configuration cfg = random_configuration(m, rng, co);
        RandomInputs inputs(rng());
        Simulator sim(m, cfg, OrderPolicy::seeded(rng()), inputs);
        GlobalState s = sim.init();
        std::vector<std::pair<GlobalState, GlobalState>> checks;
        while (sim.cycle() < 3) {
            auto loops = self_loop_phases(m);
            if (std::find(loops.begin(), loops.end(), s.phase) != loops.end()) {
                for (ObjRef inst : all_instances(cfg)) {
                    if (s.is_executed(inst))
                        continue;
                    ExecResult r = exec_local(m, cfg, s, inst, s.phase);
                    r.state.set_executed(inst, true);
                    checks.emplace_back(s, r.state);
                }
            }
            GlobalState next = sim.step(s).state;
            checks.emplace_back(s, next);
            s = std::move(next);
        }
        for (const auto& [pre, post] : checks) {
            for (const auto& t : tasks)
                ASSERT_TRUE(holds(t.formula, m, cfg, post, &pre)) << t.id << " round " << round;
            ++pairs;
        }
    }
    EXPECT_GT(pairs, 100u);
}

// --- solver -----------------------------------------------------------------

TEST(Vc, TautologyValidContradictionInvalid)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot.sra");
    std::vector<VerificationTask> ts{closed_task("taut", build::true_()), closed_task("contra", build::false_())};
    encode_tasks(m, ts);
    auto rs = discharge(ts, {});
    EXPECT_EQ(rs[0].verdict, Verdict::Valid);
    EXPECT_EQ(rs[1].verdict, Verdict::Invalid);
    EXPECT_TRUE(rs[0].rlimit.has_value());
    EXPECT_EQ(rs[0].solver, "z3 -in");
}

TEST(Vc, SolverFailureIsUnknown)
{
    VerificationTask t = closed_task("t", build::true_());
    t.smt = "(check-sat)\n";
    SolverOptions o;
    o.command = "echo boom >&2; exit 3";
    auto r = discharge_one(t, o);
    EXPECT_EQ(r.verdict, Verdict::Unknown);
    EXPECT_NE(r.detail.find("boom"), std::string::npos);
}

TEST(Vc, SlowSolverTimesOut)
{
    VerificationTask t = closed_task("t", build::true_());
    t.smt = "(check-sat)\n";
    SolverOptions o;
    o.command = "sleep 10";
    o.timeout_s = 0.3;
    auto r = discharge_one(t, o);
    EXPECT_EQ(r.verdict, Verdict::Timeout);
    EXPECT_LT(r.seconds, 5.0);
}

TEST(Vc, SolverFromEnvironment)
{
    setenv("SRA_SMT_CMD", "my-solver --in", 1);
    EXPECT_EQ(resolve_solver_command({}), "my-solver --in");
    SolverOptions o;
    o.command = "explicit";
    EXPECT_EQ(resolve_solver_command(o), "explicit");
    unsetenv("SRA_SMT_CMD");
    EXPECT_EQ(resolve_solver_command({}), "z3 -in");
}

TEST(Vc, RobotPipelineProven)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot.sra");
    auto tasks = build_checks(m, robot_spec(m));
    encode_tasks(m, tasks);
    SolverOptions o;
    o.jobs = 4;
    VcReport r = make_report(tasks, discharge(tasks, o));
    EXPECT_EQ(r.overall, Overall::Proven) << r.text();
    EXPECT_EQ(r.exit_code(), 0);
    for (const auto& res : r.results)
        EXPECT_LT(res.seconds, 60.0) << res.task;
    EXPECT_TRUE(r.total_rlimit.has_value());
}

TEST(Vc, WeakenedGuardRefuted)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot-weak-actleft.sra");
    auto tasks = build_checks(m, robot_spec(m));
    encode_tasks(m, tasks);
    SolverOptions o;
    o.jobs = 4;
    VcReport r = make_report(tasks, discharge(tasks, o));
    EXPECT_EQ(r.overall, Overall::RefutedObligation);
    EXPECT_EQ(r.exit_code(), 1);
    int invalid = 0;
    for (const auto& res : r.results) {
        if (res.verdict != Verdict::Invalid)
            continue;
        ++invalid;
        EXPECT_NE(res.model_summary.find("Controller = {"), std::string::npos) << res.model_summary;
        EXPECT_NE(res.model_summary.find(".direction: "), std::string::npos) << res.model_summary;
    }
    EXPECT_GE(invalid, 1);
}

TEST(Vc, LocalContractsValidOnCorpus)
{
    REQUIRE_SOLVER();
    for (const char* name : {"robot.sra", "robot-single.sra", "robot-optional.sra", "traffic.sra"}) {
        Model m = load_model(name);
        auto tasks = build_local_contract_tasks(m);
        EXPECT_EQ(tasks.size(), m.classes.size() * (2 + self_loop_phases(m).size())) << name;
        encode_tasks(m, tasks);
        SolverOptions o;
        o.jobs = 4;
        VcReport r = make_report(tasks, discharge(tasks, o));
        EXPECT_EQ(r.overall, Overall::Proven) << name << "\n" << r.text();
    }
}

TEST(Vc, CorruptedEventResetInvalid)
{
    REQUIRE_SOLVER();
    Model m = load_model("robot.sra");
    auto tasks = build_local_contract_tasks(m, keep_events);
    encode_tasks(m, tasks);
    SolverOptions o;
    o.jobs = 4;
    VcReport r = make_report(tasks, discharge(tasks, o));
    std::map<std::string, Verdict> v;
    for (const auto& res : r.results)
        v[res.task] = res.verdict;
    EXPECT_EQ(v["local_Sensor_Act"], Verdict::Invalid);
    EXPECT_EQ(v["local_Sensor_Sense"], Verdict::Valid);
    EXPECT_EQ(r.overall, Overall::RefutedObligation);
}

// --- report -----------------------------------------------------------------

TEST(Vc, ReportVerdicts)
{
    std::vector<VerificationTask> ts{closed_task("a", build::true_()), closed_task("b", build::true_())};
    auto with = [&](Verdict second) {
        std::vector<VcResult> rs(2);
        rs[0].task = "a";
        rs[0].verdict = Verdict::Valid;
        rs[0].rlimit = 10;
        rs[1].task = "b";
        rs[1].verdict = second;
        rs[1].rlimit = 5;
        return make_report(ts, rs);
    };
    EXPECT_EQ(with(Verdict::Valid).overall, Overall::Proven);
    EXPECT_EQ(with(Verdict::Valid).total_rlimit, 15);
    EXPECT_EQ(with(Verdict::Timeout).overall, Overall::Inconclusive);
    EXPECT_EQ(with(Verdict::Timeout).exit_code(), 3);
    EXPECT_EQ(with(Verdict::Unknown).overall, Overall::Inconclusive);
    EXPECT_EQ(with(Verdict::Invalid).overall, Overall::RefutedObligation);
    EXPECT_EQ(with(Verdict::Invalid).exit_code(), 1);
    EXPECT_NE(with(Verdict::Timeout).text().find("Timeout   b"), std::string::npos);
    auto j = nlohmann::json::parse(with(Verdict::Invalid).json());
    EXPECT_EQ(j["overall"], "Refuted-obligation");
    EXPECT_EQ(j["tasks"].size(), 2u);
    EXPECT_EQ(j["tasks"][1]["verdict"], "Invalid");
}

TEST(Vc, TaskFilesNamedById)
{
    Model m = load_model("robot.sra");
    auto tasks = build_local_contract_tasks(m);
    encode_tasks(m, tasks);
    auto dir = std::filesystem::temp_directory_path() / "sra_vc_files";
    std::filesystem::remove_all(dir);
    write_tasks(tasks, dir.string());
    for (const auto& t : tasks)
        EXPECT_TRUE(std::filesystem::exists(dir / (t.id + ".smt2"))) << t.id;
    EXPECT_TRUE(std::filesystem::exists(dir / "local_Sensor_Act.smt2"));
}
