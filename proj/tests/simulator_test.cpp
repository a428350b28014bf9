#include "sra/core/symbols.hpp"
#include "sra/sim/simulator.hpp"
#include "test_util.hpp"

#include <random>

using namespace sra;
using namespace sra::test;

namespace {

struct Robot {
    Model m = load_model("robot.sra");
    Configuration cfg = load_config(m, "robot.sracfg");
    int sensor = m.class_index("Sensor");
    int ctrl = m.class_index("Controller");

    ObjRef obj(const std::string& n) const { return *cfg.find(n); }
    int field(int cls, const std::string& f) const { return m.classes[static_cast<std::size_t>(cls)].find_field(f); }
    std::string loc(const GlobalState& s, const std::string& n) const
    {
        ObjRef o = obj(n);
        return format_field(m, cfg, s, o, m.classes[static_cast<std::size_t>(o.cls)].location);
    }
    std::string get(const GlobalState& s, const std::string& n, const std::string& f) const
    {
        ObjRef o = obj(n);
        return format_field(m, cfg, s, o, field(o.cls, f));
    }
    int phase(const std::string& p) const { return m.scheduler.find_phase(p); }
};

ScriptedInputs scenario_inputs()
{
    return ScriptedInputs::from_json(read_text_file(corpus("scenario.json")));
}

ScriptedInputs obstacles(bool l, bool r1, bool r2)
{
    return ScriptedInputs({{{"sL", "obstacle", l ? "true" : "false"},
                            {"sR1", "obstacle", r1 ? "true" : "false"},
                            {"sR2", "obstacle", r2 ? "true" : "false"}}});
}

} // namespace

TEST(Simulator, InitState)
{
    Robot r;
    auto in = scenario_inputs();
    GlobalState s = init_state(r.m, r.cfg, in);
    EXPECT_EQ(s.phase, r.phase("Sense"));
    EXPECT_EQ(r.loc(s, "c1"), "Idle");
    EXPECT_EQ(r.get(s, "c1", "direction"), "Stop");
    for (auto n : {"sL", "sR1", "sR2"}) {
        EXPECT_EQ(r.loc(s, n), "Ready");
        EXPECT_EQ(r.get(s, n, "processed"), "false");
        EXPECT_FALSE(s.is_executed(r.obj(n)));
    }
    EXPECT_EQ(r.get(s, "sL", "obstacle"), "true");
    EXPECT_EQ(r.get(s, "sR1", "obstacle"), "false");

    NoInputs none;
    GlobalState z = init_state(r.m, r.cfg, none);
    EXPECT_EQ(r.get(z, "sL", "obstacle"), "false");
    EXPECT_EQ(r.loc(z, "c1"), "Idle");
}

TEST(Simulator, InitRequiresInitialValues)
{
    std::string src = read_text_file(corpus("robot.sra"));
    std::string from = "var direction : Direction = Stop";
    src.replace(src.find(from), from.size(), "var direction : Direction");
    auto p = parse_model(src);
    ASSERT_TRUE(p.ok());
    auto cfg = parse_configuration(read_text_file(corpus("robot.sracfg")), *p.value);
    ASSERT_TRUE(cfg.ok());
    NoInputs none;
    EXPECT_THROW(init_state(*p.value, cfg.value->config, none), SimError);
}

TEST(Simulator, ExecLocal)
{
    Robot r;
    auto in = scenario_inputs();
    GlobalState s = init_state(r.m, r.cfg, in);
    int sense = r.phase("Sense");
    int act = r.phase("Act");

    auto sl = exec_local(r.m, r.cfg, s, r.obj("sL"), sense);
    EXPECT_EQ(r.loc(sl.state, "sL"), "NoGo");
    EXPECT_EQ(r.m.classes[static_cast<std::size_t>(r.sensor)].transitions[static_cast<std::size_t>(sl.fired)].name,
              "senseNoGo");

    auto c = exec_local(r.m, r.cfg, s, r.obj("c1"), sense);
    EXPECT_EQ(c.fired, -1);
    EXPECT_EQ(c.state, s);

    GlobalState go = s;
    go.set(r.m, r.obj("sR1"), r.m.classes[static_cast<std::size_t>(r.sensor)].location, 1);
    go.phase = act;
    auto stay = exec_local(r.m, r.cfg, go, r.obj("sR1"), act);
    EXPECT_EQ(stay.fired, -1);

    GlobalState a = s;
    a.phase = act;
    a.set(r.m, r.obj("sL"), r.m.classes[static_cast<std::size_t>(r.sensor)].location, 2);
    a.set(r.m, r.obj("sR1"), r.m.classes[static_cast<std::size_t>(r.sensor)].location, 1);
    a.set(r.m, r.obj("sR2"), r.m.classes[static_cast<std::size_t>(r.sensor)].location, 1);
    auto moved = exec_local(r.m, r.cfg, a, r.obj("c1"), act);
    EXPECT_EQ(r.loc(moved.state, "c1"), "Moving");
    EXPECT_EQ(r.get(moved.state, "c1", "direction"), "Right");
    for (auto n : {"sL", "sR1", "sR2"})
        EXPECT_EQ(r.get(moved.state, n, "processed"), "true");
    EXPECT_FALSE(moved.state.is_executed(r.obj("c1")));
}

TEST(Simulator, SchedulerSteps)
{
    Robot r;
    auto in = scenario_inputs();
    Simulator sim(r.m, r.cfg, OrderPolicy::declaration(), in);
    GlobalState s = sim.init();
    EXPECT_EQ(enabled_scheduler_transition(r.m, r.cfg, s), 0);

    GlobalState act = s;
    act.phase = r.phase("Act");
    for (ObjRef o : all_instances(r.cfg))
        act.set_executed(o, true);
    act.set(r.m, r.obj("sR2"), r.field(r.sensor, "processed"), 1);
    EXPECT_EQ(enabled_scheduler_transition(r.m, r.cfg, act), 2);
    act.set(r.m, r.obj("sR2"), r.field(r.sensor, "processed"), 0);
    EXPECT_EQ(enabled_scheduler_transition(r.m, r.cfg, act), 3);
    auto next = sim.step(act);
    EXPECT_EQ(next.label.kind, StepLabel::Kind::PhaseChange);
    EXPECT_EQ(next.state.phase, r.phase("Reset"));
    for (ObjRef o : all_instances(r.cfg))
        EXPECT_FALSE(next.state.is_executed(o));

    GlobalState stuck = s;
    stuck.set_executed(r.obj("sL"), true);
    EXPECT_THROW(sim.step(stuck), SimError);
}

TEST(Simulator, ScenarioFidelity)
{
    Robot r;
    auto in = scenario_inputs();
    auto order = OrderPolicy::parse("fixed:Sense=sL,sR1,sR2,c1;Act=c1,sL,sR1,sR2", r.m, r.cfg);
    auto prop = parse_invariant(read_text_file(corpus("prop.srainv")), r.m);
    ASSERT_TRUE(prop.ok());
    auto res = run(r.m, r.cfg, order, in, {*prop.value});
    ASSERT_TRUE(res.passed()) << res.error;
    ASSERT_EQ(res.trace.size(), 7u);
    const auto& t = res.trace;
    EXPECT_EQ(t[1].label.kind, StepLabel::Kind::SelfLoop);
    EXPECT_EQ(r.loc(t[1].state, "sL"), "NoGo");
    EXPECT_EQ(r.loc(t[1].state, "sR1"), "Go");
    EXPECT_EQ(r.loc(t[1].state, "sR2"), "Go");
    EXPECT_EQ(r.loc(t[1].state, "c1"), "Idle");
    EXPECT_EQ(t[1].label.fired.back(), -1);
    EXPECT_EQ(t[2].label.kind, StepLabel::Kind::PhaseChange);
    EXPECT_EQ(t[2].state.phase, r.phase("Act"));
    EXPECT_EQ(t[3].label.kind, StepLabel::Kind::SelfLoop);
    EXPECT_EQ(r.loc(t[3].state, "c1"), "Moving");
    EXPECT_EQ(r.get(t[3].state, "c1", "direction"), "Right");
    for (auto n : {"sL", "sR1", "sR2"}) {
        EXPECT_EQ(r.loc(t[3].state, n), "Ready");
        EXPECT_EQ(r.get(t[3].state, n, "processed"), "false");
    }
    EXPECT_EQ(t[4].state.phase, r.phase("Reset"));
    EXPECT_EQ(r.loc(t[5].state, "c1"), "Idle");
    EXPECT_EQ(t[6].state.phase, r.phase("End"));
    EXPECT_EQ(r.loc(t[6].state, "c1"), "Idle");
    EXPECT_EQ(r.get(t[6].state, "c1", "direction"), "Right");
}

TEST(Simulator, ReversedActOrderIteratesAct)
{
    Robot r;
    auto in = scenario_inputs();
    auto order = OrderPolicy::parse("fixed:Act=sL,sR1,sR2,c1", r.m, r.cfg);
    auto res = run(r.m, r.cfg, order, in, {});
    ASSERT_TRUE(res.passed()) << res.error;
    ASSERT_EQ(res.trace.size(), 8u);
    const auto& first = res.trace[3];
    EXPECT_EQ(first.label.kind, StepLabel::Kind::SelfLoop);
    EXPECT_EQ(first.label.fired, (std::vector<int>{-1, -1, -1, 0}));
    for (auto n : {"sL", "sR1", "sR2"})
        EXPECT_EQ(r.get(first.state, n, "processed"), "true");
    const auto& second = res.trace[4];
    EXPECT_EQ(second.label.kind, StepLabel::Kind::SelfLoop);
    EXPECT_EQ(second.state.phase, r.phase("Act"));
    for (auto n : {"sL", "sR1", "sR2"}) {
        EXPECT_EQ(r.loc(second.state, n), "Ready");
        EXPECT_EQ(r.get(second.state, n, "processed"), "false");
    }
    EXPECT_EQ(res.trace[5].state.phase, r.phase("Reset"));
}

TEST(Simulator, ZeroCyclesIsInitOnly)
{
    Robot r;
    auto in = scenario_inputs();
    RunOptions opts;
    opts.cycles = 0;
    auto res = run(r.m, r.cfg, OrderPolicy::declaration(), in, {build::false_()}, opts);
    EXPECT_TRUE(res.passed());
    EXPECT_EQ(res.trace.size(), 1u);
}

TEST(Simulator, WeakenedActLeftViolatesProp)
{
    Model m = load_model("robot-weak-actleft.sra");
    Configuration cfg = load_config(m, "robot.sracfg");
    auto prop = parse_invariant(read_text_file(corpus("prop.srainv")), m);
    ASSERT_TRUE(prop.ok());
    auto in = obstacles(true, true, false);
    auto res = run(m, cfg, OrderPolicy::declaration(), in, {*prop.value});
    EXPECT_TRUE(res.error.empty()) << res.error;
    EXPECT_TRUE(res.violated);

    Model good = load_model("robot.sra");
    auto in2 = obstacles(true, true, false);
    auto ok = run(good, cfg, OrderPolicy::declaration(), in2, {*prop.value});
    EXPECT_TRUE(ok.passed());
}

TEST(Simulator, TimersTickAtFinalPhase)
{
    Model m = load_model("traffic.sra");
    Configuration cfg = load_config(m, "traffic.sracfg");
    int light = m.class_index("Light");
    int hold = m.classes[static_cast<std::size_t>(light)].find_field("hold");
    NoInputs none;
    GlobalState s = init_state(m, cfg, none);
    ObjRef north{light, 0};
    s.set(m, north, hold, 3);
    tick(m, s, north);
    EXPECT_EQ(s.get(m, north, hold), 2);
    s.set(m, north, hold, 1);
    tick(m, s, north);
    EXPECT_EQ(s.get(m, north, hold), 0);
    tick(m, s, north);
    EXPECT_EQ(s.get(m, north, hold), 0);

    RandomInputs rnd(7);
    RunOptions opts;
    opts.cycles = 6;
    auto res = run(m, cfg, OrderPolicy::seeded(3), rnd, {}, opts, random_havoc(11));
    ASSERT_TRUE(res.passed()) << res.error;
    bool green = false;
    for (const auto& t : res.trace)
        green = green || t.state.get(m, north, m.classes[static_cast<std::size_t>(light)].location) == 1;
    EXPECT_TRUE(green);
}

// Runs random robot cycles and checks the per-step invariants of the engine.
TEST(Simulator, StepProperties)
{
    for (const char* file : {"robot.sra", "traffic.sra"}) {
        SCOPED_TRACE(file);
        Model m = load_model(file);
        Configuration cfg = load_config(m, std::string(file) == "robot.sra" ? "robot.sracfg" : "traffic.sracfg");
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            RandomInputs in(seed);
            RunOptions opts;
            opts.cycles = 4;
            auto res = run(m, cfg, OrderPolicy::seeded(seed), in, {}, opts, random_havoc(seed));
            ASSERT_TRUE(res.passed()) << res.error;
            for (std::size_t i = 1; i < res.trace.size(); ++i) {
                const auto& prev = res.trace[i - 1].state;
                const auto& step = res.trace[i];
                auto all = all_instances(cfg);
                for (ObjRef o : all) {
                    const auto& cls = m.classes[static_cast<std::size_t>(o.cls)];
                    for (std::size_t f = 0; f < cls.fields.size(); ++f) {
                        const auto& fd = cls.fields[f];
                        if (fd.kind != FieldKind::Input || step.label.kind == StepLabel::Kind::Reset)
                            continue;
                        EXPECT_EQ(prev.get(m, o, static_cast<int>(f)), step.state.get(m, o, static_cast<int>(f)))
                            << "input changed inside a cycle";
                    }
                    if (step.label.kind == StepLabel::Kind::PhaseChange)
                        EXPECT_FALSE(step.state.is_executed(o));
                }
                if (step.label.kind != StepLabel::Kind::SelfLoop)
                    continue;
                // Replays the sweep one instance at a time to check footprints and events.
                GlobalState cur = prev;
                for (std::size_t k = 0; k < step.label.order.size(); ++k) {
                    ObjRef o = step.label.order[k];
                    auto r = exec_local(m, cfg, cur, o, prev.phase, random_havoc(seed));
                    EXPECT_EQ(r.fired, step.label.fired[k]);
                    r.state.set_executed(o, true);
                    auto fp = write_footprint(m, o.cls, prev.phase);
                    for (ObjRef p : all) {
                        const auto& cls = m.classes[static_cast<std::size_t>(p.cls)];
                        for (std::size_t f = 0; f < cls.fields.size(); ++f) {
                            if (!cls.fields[f].is_mutable())
                                continue;
                            auto before = cur.get(m, p, static_cast<int>(f));
                            auto after = r.state.get(m, p, static_cast<int>(f));
                            if (before == after)
                                continue;
                            EXPECT_TRUE(fp.count({p.cls, static_cast<int>(f)}))
                                << cls.name << "." << cls.fields[f].name << " outside footprint";
                            if (cls.fields[f].kind == FieldKind::Event && after == 0)
                                EXPECT_TRUE(p == o) << "event cleared by another instance";
                        }
                    }
                    cur = r.state;
                }
            }
        }
    }
}

TEST(Simulator, OrderIndependenceOnWriteDisjointPhases)
{
    Robot r;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        RandomInputs in(seed);
        GlobalState s = init_state(r.m, r.cfg, in);
        auto sense = self_loop_successors(r.m, r.cfg, s, r.phase("Sense"));
        EXPECT_EQ(sense.size(), 1u);
        GlobalState reset = sense.front();
        reset.phase = r.phase("Reset");
        for (auto& row : reset.executed)
            std::fill(row.begin(), row.end(), 0);
        EXPECT_EQ(self_loop_successors(r.m, r.cfg, reset, r.phase("Reset")).size(), 1u);
    }
    // Act writes other instances' events, so order matters there.
    auto in = scenario_inputs();
    GlobalState s = init_state(r.m, r.cfg, in);
    GlobalState act = self_loop_successors(r.m, r.cfg, s, r.phase("Sense")).front();
    act.phase = r.phase("Act");
    for (auto& row : act.executed)
        std::fill(row.begin(), row.end(), 0);
    EXPECT_GT(self_loop_successors(r.m, r.cfg, act, r.phase("Act")).size(), 1u);
}

TEST(Simulator, GammaAgreesWithFrontend)
{
    Robot r;
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Configuration cfg = r.cfg;
        for (int f : {r.field(r.ctrl, "leftSensors"), r.field(r.ctrl, "rightSensors"), r.field(r.ctrl, "allSensors")}) {
            std::vector<int> members;
            for (int i = 0; i < 3; ++i)
                if (rng() % 2)
                    members.push_back(i);
            cfg.set({r.ctrl, 0}, f, Value::of_set(members));
        }
        auto report = evaluate_gamma(r.m, cfg);
        NoInputs none;
        GlobalState s = GlobalState::zero(r.m, cfg);
        for (std::size_t i = 0; i < r.m.constraints.size(); ++i)
            EXPECT_EQ(report[i].holds, holds(r.m.constraints[i].expr, r.m, cfg, s));
    }
}

TEST(Simulator, TraceJson)
{
    Robot r;
    auto in = scenario_inputs();
    auto res = run(r.m, r.cfg, OrderPolicy::declaration(), in, {});
    ASSERT_TRUE(res.passed());
    std::string line = trace_step_json(r.m, r.cfg, res.trace[1]);
    EXPECT_EQ(line.rfind("{\"step\":1,\"label\":{\"kind\":\"self-loop\",\"phase\":\"Sense\"", 0), 0u) << line;
    EXPECT_NE(line.find("\"sL\":{\"location\":\"NoGo\",\"obstacle\":true,\"processed\":false,\"executed\":true}"),
              std::string::npos)
        << line;
}
