#include "sra/contract/contractgen.hpp"
#include "sra/core/printer.hpp"
#include "sra/sim/simulator.hpp"
#include "test_util.hpp"

using namespace sra;
using namespace sra::test;

namespace {

const char* const kCounter = R"(
enum Loc { A, B }

class Peer {
  var location : Loc = A
  var mark : Int = 0
}

class Counter {
  var location : Loc = A
  var x : Int = 0
  var y : Int = 0
  timer t
  set peers : Set<Peer>

  transition twice = (A, true, A, { x := x + 1; x := x * 2; }, Run)
  transition branch = (B, true, B, { if x > 0 then { x := 1; } else { y := 2; } }, Run)
  transition loop = (A, x > 5, B, { forall p in peers { p.mark := p.mark + x; } x := 0; }, Other)
  transition guess = (B, x > 5, A, { x := *; y := x; }, Other)
  transition noop = (B, false, A, { }, Other)
}

scheduler {
  phases Run, Other, End;
  initial Run;
  final End;
  trans Run -> Run when forall c in All : !c.executed;
  trans Run -> Other when forall c in All : c.executed;
  trans Other -> Other when forall c in All : !c.executed;
  trans Other -> End when forall c in All : c.executed;
}
)";

struct Fixture {
    Model m;
    int counter;
    int peer;

    Fixture()
    {
        auto p = parse_model(kCounter, "counter.sra");
        if (!p.ok())
            throw std::runtime_error(p.messages());
        m = *p.value;
        counter = m.class_index("Counter");
        peer = m.class_index("Peer");
    }

    int transition(const std::string& name) const
    {
        const auto& ts = m.classes[static_cast<std::size_t>(counter)].transitions;
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i].name == name)
                return static_cast<int>(i);
        throw std::runtime_error("no transition " + name);
    }

    SymbolicMap map_of(const std::string& name) const
    {
        const auto& t = m.classes[static_cast<std::size_t>(counter)].transitions[static_cast<std::size_t>(transition(name))];
        return transform_effect(m, counter, t.effect);
    }

    std::string entry(const SymbolicMap& map, int cls, const std::string& field) const
    {
        int f = m.classes[static_cast<std::size_t>(cls)].find_field(field);
        const auto* e = map.find({cls, f});
        return e ? print(e->value) : "<none>";
    }
};

} // namespace

TEST(Contract, SequentialAssignmentsCompose)
{
    Fixture fx;
    auto map = fx.map_of("twice");
    EXPECT_EQ(map.entries.size(), 1u);
    EXPECT_EQ(fx.entry(map, fx.counter, "x"), "(old(x) + 1) * 2");
}

TEST(Contract, ConditionalMergesEntries)
{
    Fixture fx;
    auto map = fx.map_of("branch");
    EXPECT_EQ(fx.entry(map, fx.counter, "x"), "if old(x) > 0 then 1 else old(x)");
    EXPECT_EQ(fx.entry(map, fx.counter, "y"), "if old(x) > 0 then old(y) else 2");
}

TEST(Contract, QuantifiedAssignmentBecomesFunctionEntry)
{
    Fixture fx;
    auto map = fx.map_of("loop");
    int mark = fx.m.classes[static_cast<std::size_t>(fx.peer)].find_field("mark");
    const auto* e = map.find({fx.peer, mark});
    ASSERT_NE(e, nullptr);
    EXPECT_TRUE(e->function);
    EXPECT_EQ(print(e->value), "if " + e->var + " in peers then old(" + e->var + ".mark) + old(x) else old(" +
                                   e->var + ".mark)");
    EXPECT_EQ(fx.entry(map, fx.counter, "x"), "0");
}

TEST(Contract, HavocPropagatesAsMarker)
{
    Fixture fx;
    auto map = fx.map_of("guess");
    EXPECT_EQ(fx.entry(map, fx.counter, "x"), "*");
    EXPECT_EQ(fx.entry(map, fx.counter, "y"), "*");
    // Havocked entries leave the post-state unconstrained.
    EXPECT_TRUE(is_true(effect_formula(fx.m, fx.counter, map)));
}

TEST(Contract, ExtendedGuardNegatesEarlierTransitions)
{
    Fixture fx;
    EXPECT_EQ(print(extended_guard(fx.m, fx.counter, fx.transition("loop"))), "x > 5");
    EXPECT_EQ(print(extended_guard(fx.m, fx.counter, fx.transition("noop"))), "false");
}

TEST(Contract, ExecContractShape)
{
    Model m = load_model("robot.sra");
    int sensor = m.class_index("Sensor");
    int ctrl = m.class_index("Controller");
    int sense = m.scheduler.find_phase("Sense");
    int act = m.scheduler.find_phase("Act");

    auto ctrl_sense = exec_contract(m, ctrl, sense);
    ASSERT_EQ(ctrl_sense.disjuncts.size(), 1u);
    EXPECT_EQ(ctrl_sense.disjuncts[0].first, -1);
    EXPECT_EQ(print(ctrl_sense.formula), "location == old(location) && direction == old(direction) && executed");

    auto ctrl_act = exec_contract(m, ctrl, act);
    ASSERT_EQ(ctrl_act.disjuncts.size(), 5u);
    EXPECT_EQ(ctrl_act.disjuncts.back().first, -1);
    // Every Act disjunct of the controller frames or updates the sensors' events.
    for (const auto& [t, d] : ctrl_act.disjuncts)
        EXPECT_NE(print(d).find("All_Sensor"), std::string::npos) << t;

    auto sensor_sense = exec_contract(m, sensor, sense);
    ASSERT_EQ(sensor_sense.disjuncts.size(), 3u);
    EXPECT_EQ(print(sensor_sense.disjuncts[0].second),
              "old(location == Ready && !obstacle) && location == Go && executed && obstacle == old(obstacle) && "
              "processed == old(processed)");
}

TEST(Contract, ConsumedEventsAreReset)
{
    Model m = load_model("robot.sra");
    int sensor = m.class_index("Sensor");
    auto k = exec_contract(m, sensor, m.scheduler.find_phase("Act"));
    EXPECT_EQ(print(k.disjuncts[0].second),
              "old(location == Go && processed) && location == Ready && executed && !processed && obstacle == "
              "old(obstacle)");
}

TEST(Contract, InitAndTick)
{
    Model m = load_model("robot.sra");
    EXPECT_EQ(print(init_contract(m, m.class_index("Controller")).formula),
              "location == Idle && direction == Stop && !executed");
    EXPECT_EQ(print(tick_contract(m, m.class_index("Sensor")).formula),
              "location == old(location) && obstacle == old(obstacle) && processed == old(processed)");
}

TEST(Contract, TickDecrementsTimers)
{
    Fixture fx;
    Contract k = tick_contract(fx.m, fx.counter);
    Configuration cfg = Configuration::empty_for(fx.m);
    cfg.instances[static_cast<std::size_t>(fx.counter)] = {"c"};
    cfg.instances[static_cast<std::size_t>(fx.peer)] = {};
    cfg.derive_grounded(fx.m);
    cfg.set({fx.counter, 0}, fx.m.classes[static_cast<std::size_t>(fx.counter)].find_field("peers"), Value::of_set({}));
    ObjRef c{fx.counter, 0};
    int t = fx.m.classes[static_cast<std::size_t>(fx.counter)].find_field("t");

    auto check = [&](std::int64_t before, std::int64_t after) {
        GlobalState pre = GlobalState::zero(fx.m, cfg);
        pre.set(fx.m, c, t, before);
        GlobalState post = pre;
        post.set(fx.m, c, t, after);
        return holds(k.formula, fx.m, cfg, post, &pre, c);
    };
    EXPECT_TRUE(check(3, 2));
    EXPECT_FALSE(check(3, 3));
    EXPECT_TRUE(check(1, 0));
    EXPECT_FALSE(check(1, 1));
    EXPECT_TRUE(check(0, 0));
    EXPECT_FALSE(check(0, 1));

    GlobalState s = GlobalState::zero(fx.m, cfg);
    s.set(fx.m, c, t, 3);
    GlobalState pre = s;
    tick(fx.m, s, c);
    EXPECT_EQ(s.get(fx.m, c, t), 2);
    EXPECT_TRUE(holds(k.formula, fx.m, cfg, s, &pre, c));
}

TEST(Contract, AllContractsNamed)
{
    Model m = load_model("robot.sra");
    std::vector<std::string> names;
    for (const auto& k : all_contracts(m))
        names.push_back(contract_name(m, k));
    std::vector<std::string> expected{"I_Sensor",     "T_Sensor(Sense)",     "T_Sensor(Act)",
                                      "T_Sensor(Reset)", "K_Sensor",         "I_Controller",
                                      "T_Controller(Sense)", "T_Controller(Act)", "T_Controller(Reset)",
                                      "K_Controller"};
    EXPECT_EQ(names, expected);
}

TEST(Contract, AssumeRejected)
{
    auto p = parse_model(R"(
enum L { A }
class K {
  var location : L = A
  var x : Int = 0
  transition t = (A, true, A, { assume x > 0; }, P)
}
scheduler {
  phases P, Q;
  initial P;
  final Q;
  trans P -> P when forall k in All : !k.executed;
  trans P -> Q when forall k in All : k.executed;
}
)",
                         "assume.sra");
    ASSERT_TRUE(p.ok()) << p.messages();
    EXPECT_THROW(exec_contract(*p.value, 0, 0), ContractError);
}
