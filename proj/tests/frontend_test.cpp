#include "sra/core/printer.hpp"
#include "sra/core/symbols.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <filesystem>

using namespace sra;
using namespace sra::test;

namespace {

std::set<std::string> symbol_names(const Model& m, const ExprPtr& e)
{
    std::set<std::string> out;
    for (const auto& s : free_symbols(e))
        out.insert(to_string(m, s));
    return out;
}

std::set<std::string> footprint_names(const Model& m, const std::string& cls, const std::string& phase)
{
    std::set<std::string> out;
    for (const auto& f : write_footprint(m, m.class_index(cls), m.scheduler.find_phase(phase)))
        out.insert(m.field_name(f));
    return out;
}

} // namespace

TEST(Frontend, RobotModelShape)
{
    Model m = load_model("robot.sra");
    ASSERT_EQ(m.classes.size(), 2u);
    EXPECT_EQ(m.classes[0].name, "Sensor");
    EXPECT_EQ(m.classes[1].name, "Controller");
    EXPECT_EQ(m.scheduler.phases, (std::vector<std::string>{"Sense", "Act", "Reset", "End"}));
    EXPECT_EQ(m.scheduler.transitions.size(), 6u);
    EXPECT_EQ(m.constraints.size(), 5u);
    EXPECT_EQ(m.classes[1].transitions.size(), 5u);
    // executed declarations are sugar for the built-in flag
    EXPECT_LT(m.classes[0].find_field("executed"), 0);
}

TEST(Frontend, EmptyFileHasNoClasses)
{
    auto p = parse_model("", "empty.sra");
    EXPECT_FALSE(p.ok());
    bool found = false;
    for (const auto& d : p.diagnostics)
        found = found || d.code == "E015";
    EXPECT_TRUE(found) << p.messages();
}

TEST(Frontend, FreeSymbols)
{
    Model m = load_model("robot.sra");
    int sensor = m.class_index("Sensor");
    int ctrl = m.class_index("Controller");
    EXPECT_TRUE(free_symbols(build::true_()).empty());
    EXPECT_EQ(symbol_names(m, m.classes[static_cast<std::size_t>(sensor)].transitions[1].guard),
              (std::set<std::string>{"Sensor.obstacle"}));
    auto e = parse_or_throw(m, "forall s in rightSensors : s.location == Go", ExprMode::Guard, ctrl);
    EXPECT_EQ(symbol_names(m, e), (std::set<std::string>{"Controller.rightSensors", "Sensor.location"}));
    auto two = parse_or_throw(m, "forall c in All_Controller : c.direction == old(c.direction)", ExprMode::TwoState);
    EXPECT_EQ(symbol_names(m, two),
              (std::set<std::string>{"All_Controller", "Controller.direction", "old(Controller.direction)"}));
}

TEST(Frontend, WriteFootprint)
{
    Model m = load_model("robot.sra");
    EXPECT_EQ(footprint_names(m, "Sensor", "Sense"), (std::set<std::string>{"Sensor.location", "Sensor.executed"}));
    EXPECT_EQ(footprint_names(m, "Controller", "Act"),
              (std::set<std::string>{"Controller.location", "Controller.direction", "Controller.executed",
                                     "Sensor.processed"}));
    EXPECT_EQ(footprint_names(m, "Controller", "Sense"), (std::set<std::string>{"Controller.executed"}));
    EXPECT_EQ(footprint_names(m, "Sensor", "Act"),
              (std::set<std::string>{"Sensor.location", "Sensor.processed", "Sensor.executed"}));
}

TEST(Frontend, RoundTripRobot)
{
    Model m = load_model("robot.sra");
    std::string text = print_model(m);
    auto again = parse_model(text, "printed.sra");
    ASSERT_TRUE(again.ok()) << again.messages() << "\n" << text;
    EXPECT_TRUE(structurally_equal(m, *again.value)) << text;
    EXPECT_EQ(print_model(*again.value), text);
}

TEST(Frontend, ConfigurationGamma)
{
    Model m = load_model("robot.sra");
    auto p = parse_configuration(read_text_file(corpus("robot.sracfg")), m, "robot.sracfg");
    ASSERT_TRUE(p.ok()) << p.messages();
    EXPECT_TRUE(p.value->satisfies_gamma());
    EXPECT_EQ(p.value->config.instances[static_cast<std::size_t>(m.class_index("Sensor"))].size(), 3u);

    auto empty_left = parse_configuration("Controller: c1; Sensor: sL, sR1, sR2;"
                                          "c1.leftSensors = { }; c1.rightSensors = { sR1, sR2 };"
                                          "c1.allSensors = { sL, sR1, sR2 };",
                                          m);
    ASSERT_TRUE(empty_left.ok()) << empty_left.messages();
    for (const auto& g : empty_left.value->gamma)
        EXPECT_EQ(g.holds, g.label != "hasLeft" && g.label != "allIsUnion") << g.label;

    auto shared = parse_configuration("Controller: c1; Sensor: sL, sR1, sR2;"
                                      "c1.leftSensors = { sL }; c1.rightSensors = { sL, sR1, sR2 };"
                                      "c1.allSensors = { sL, sR1, sR2 };",
                                      m);
    ASSERT_TRUE(shared.ok()) << shared.messages();
    EXPECT_FALSE(shared.value->gamma[0].holds);
    EXPECT_TRUE(shared.value->gamma[1].holds);
}

TEST(Frontend, ConfigurationErrors)
{
    Model m = load_model("robot.sra");
    auto code_of = [&](const std::string& src) {
        auto p = parse_configuration(src, m);
        return p.diagnostics.empty() ? std::string() : p.diagnostics.front().code;
    };
    EXPECT_EQ(code_of("Robot: r1;"), "E003");
    EXPECT_EQ(code_of("Sensor: a, a;"), "E002");
    EXPECT_EQ(code_of("Controller: c1; Sensor: s; c1.leftSensors = { c1 };"), "E011");
    EXPECT_EQ(code_of("Controller: c1; c1.direction = Left;"), "E017");
}

TEST(Frontend, Invariants)
{
    Model m = load_model("robot.sra");
    auto prop = parse_invariant(read_text_file(corpus("prop.srainv")), m);
    ASSERT_TRUE(prop.ok()) << prop.messages();
    auto names = symbol_names(m, *prop.value);
    EXPECT_TRUE(names.count("All_Controller"));
    EXPECT_TRUE(names.count("Controller.leftSensors"));
    EXPECT_TRUE(names.count("Sensor.obstacle"));
    EXPECT_TRUE(names.count("Controller.direction"));

    auto t = parse_invariant("true;", m);
    ASSERT_TRUE(t.ok());
    EXPECT_TRUE(is_true(*t.value));

    auto bad = parse_invariant("forall c in All_Controller : old(c.direction) == c.direction;", m);
    EXPECT_FALSE(bad.ok());
    EXPECT_EQ(bad.diagnostics.front().code, "E013");

    auto inv = load_invariant(m, "robot.srainv");
    EXPECT_EQ(inv.gprime.size(), 2u);
    EXPECT_GE(inv.items.size(), 8u);
}

namespace {

const std::vector<std::string> kCorpusModels = {"robot.sra", "robot-single.sra", "robot-optional.sra",
                                                  "robot-weak-actleft.sra", "traffic.sra"};

std::vector<std::string> mutant_files()
{
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(corpus("mutants")))
        if (e.path().extension() == ".sra")
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(Frontend, CorpusRoundTrip)
{
    for (const auto& name : kCorpusModels) {
        SCOPED_TRACE(name);
        auto p = parse_model(read_text_file(corpus(name)), name);
        ASSERT_TRUE(p.ok()) << p.messages();
        EXPECT_TRUE(p.diagnostics.empty()) << p.messages();
        std::string text = print_model(*p.value);
        auto again = parse_model(text, name);
        ASSERT_TRUE(again.ok()) << again.messages() << text;
        EXPECT_TRUE(structurally_equal(*p.value, *again.value)) << text;
    }
}

TEST(Frontend, MutantsRejectedWithExpectedCode)
{
    auto files = mutant_files();
    EXPECT_GE(files.size(), 10u);
    std::set<std::string> codes;
    for (const auto& f : files) {
        SCOPED_TRACE(f);
        std::string src = read_text_file(f);
        const std::string tag = "// expect: ";
        ASSERT_EQ(src.rfind(tag, 0), 0u);
        std::string expected = src.substr(tag.size(), 4);
        auto p = parse_model(src, f);
        EXPECT_FALSE(p.ok());
        ASSERT_FALSE(p.diagnostics.empty());
        EXPECT_EQ(p.diagnostics.front().code, expected) << p.messages();
        codes.insert(expected);
    }
    EXPECT_EQ(codes.size(), files.size());
}

TEST(Frontend, RestrictionExamples)
{
    std::string base = read_text_file(corpus("robot.sra"));
    auto first_code = [&](const std::string& from, const std::string& to) {
        std::string src = base;
        src.replace(src.find(from), from.size(), to);
        auto p = parse_model(src);
        return p.diagnostics.empty() ? std::string() : p.diagnostics.front().code;
    };
    EXPECT_EQ(first_code("transition senseNoGo = (Ready, obstacle, NoGo, { }",
                         "transition senseNoGo = (Ready, obstacle, NoGo, { obstacle := false; }"),
              "E005");
    EXPECT_EQ(first_code("transition resetGo = (Go, processed, Ready, { }",
                         "transition resetGo = (Go, processed, Ready, { processed := *; }"),
              "E006");
    EXPECT_EQ(first_code("transition reset = (Moving, true, Idle, { }",
                         "transition reset = (Moving, true, Idle, { location := Idle; }"),
              "E004");
    EXPECT_EQ(first_code("transition reset = (Moving, true, Idle, { }",
                         "transition reset = (Moving, true, Idle, { forall s in allSensors { s.processed := true; "
                         "s.processed := true; } }"),
              "E008");
    auto warn = parse_model(
        [&] {
            std::string s = base;
            std::string from = "var direction : Direction = Stop";
            s.replace(s.find(from), from.size(), "var direction : Direction");
            return s;
        }());
    ASSERT_TRUE(warn.ok());
    ASSERT_EQ(warn.diagnostics.size(), 1u);
    EXPECT_EQ(warn.diagnostics[0].code, "W014");
}

TEST(Frontend, DiagnosticsCarrySpans)
{
    for (const auto& f : mutant_files()) {
        auto p = parse_model(read_text_file(f), f);
        for (const auto& d : p.diagnostics) {
            EXPECT_GT(d.span.line, 0) << format(d);
            EXPECT_LE(d.span.begin, d.span.end) << format(d);
        }
    }
}
