#include "test_util.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace sra::test;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out; // stdout and stderr
};

Outcome sra_cli(const std::string& args)
{
    std::string cmd = std::string(SRA_CLI) + " " + args + " 2>&1";
    Outcome o;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
        return o;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
        o.out.append(buf.data(), n);
    int status = pclose(p);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::string c(const std::string& name)
{
    return corpus(name);
}

fs::path scratch(const std::string& name)
{
    fs::path d = fs::temp_directory_path() / ("sra_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST(Cli, CheckAcceptsCorpus)
{
    auto r = sra_cli("check " + c("robot.sra") + " --config " + c("robot.sracfg"));
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("allIsUnion: holds"), std::string::npos);
}

TEST(Cli, CheckRejectsMutantWithCode)
{
    auto r = sra_cli("check " + c("mutants/ghost_in_guard.sra"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("E019"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(sra_cli("").code, 2);
    EXPECT_EQ(sra_cli("frobnicate x.sra").code, 2);
    EXPECT_EQ(sra_cli("verify-global " + c("robot.sra")).code, 2);
    EXPECT_EQ(sra_cli("check /nonexistent/model.sra").code, 2);
    EXPECT_EQ(sra_cli("oracle " + c("robot.sra") + " --harness nothing").code, 2);
}

TEST(Cli, SimulateScenario)
{
    fs::path d = scratch("sim");
    auto r = sra_cli("simulate " + c("robot.sra") + " --config " + c("robot.sracfg") + " --cycles 1 --inputs " +
                     c("scenario.json") + " --order 'fixed:Sense=sL,sR1,sR2,c1;Act=c1,sL,sR1,sR2' --monitor " +
                     c("prop.srainv") + " --out " + (d / "trace.jsonl").string());
    EXPECT_EQ(r.code, 0) << r.out;
    std::ifstream f(d / "trace.jsonl");
    std::string line, last;
    int lines = 0;
    while (std::getline(f, line)) {
        ++lines;
        last = line;
    }
    ASSERT_GT(lines, 1);
    auto j = nlohmann::json::parse(last);
    EXPECT_EQ(j["state"]["c1"]["direction"], "Right");
}

TEST(Cli, SimulateReportsMonitorViolation)
{
    fs::path d = scratch("violation");
    std::ofstream(d / "inputs.json")
        << R"({"cycles": [{"sL": {"obstacle": true}, "sR1": {"obstacle": true}, "sR2": {"obstacle": false}}]})";
    auto r = sra_cli("simulate " + c("robot-weak-actleft.sra") + " --config " + c("robot.sracfg") + " --inputs " +
                     (d / "inputs.json").string() + " --monitor " + c("prop.srainv") + " --out " +
                     (d / "t.jsonl").string());
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("monitor 'prop' violated"), std::string::npos) << r.out;
}

TEST(Cli, ContractsJson)
{
    auto r = sra_cli("contracts " + c("robot.sra") + " --json");
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(r.out);
    ASSERT_TRUE(j.is_array());
    std::set<std::string> names;
    for (const auto& e : j)
        names.insert(e["name"].get<std::string>());
    EXPECT_TRUE(names.count("T_Controller(Act)"));
    EXPECT_TRUE(names.count("I_Sensor"));
    EXPECT_TRUE(names.count("K_Controller"));
}

TEST(Cli, VerifyGlobalProvenAndRefuted)
{
    REQUIRE_SOLVER();
    fs::path d = scratch("smt");
    std::string spec = " --invariant " + c("robot.srainv") + " --property " + c("prop.srainv") + " --jobs 4";
    auto ok = sra_cli("verify-global " + c("robot.sra") + " --config none" + spec + " --json --out " + d.string());
    ASSERT_EQ(ok.code, 0) << ok.out;
    EXPECT_EQ(nlohmann::json::parse(ok.out)["overall"], "Proven");
    EXPECT_TRUE(fs::exists(d / "property_all_End.smt2"));

    auto bad = sra_cli("verify-global " + c("robot-weak-actleft.sra") + spec);
    EXPECT_EQ(bad.code, 1) << bad.out;
    EXPECT_NE(bad.out.find("Invalid   selfloop_Controller_Act"), std::string::npos) << bad.out;
}

TEST(Cli, InconclusiveExitCode)
{
    REQUIRE_SOLVER();
    auto r = sra_cli("verify-local " + c("robot.sra") + " --solver 'sleep 5' --timeout 0.2");
    EXPECT_EQ(r.code, 3) << r.out;
    EXPECT_NE(r.out.find("Inconclusive"), std::string::npos);
}

TEST(Cli, GroundEmitsModelAndLemmas)
{
    REQUIRE_SOLVER();
    fs::path d = scratch("ground");
    auto r = sra_cli("ground " + c("robot-single.sra") + " --property " + c("prop.srainv") + " --discharge --out " +
                     d.string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("Controller.leftSensors -> leftSensor"), std::string::npos) << r.out;
    ASSERT_TRUE(fs::exists(d / "robot-single.grounded.sra"));
    EXPECT_TRUE(fs::exists(d / "lemma_all_prop.smt2"));
    auto again = sra_cli("check " + (d / "robot-single.grounded.sra").string());
    EXPECT_EQ(again.code, 0) << again.out;
}

TEST(Cli, OracleHarnesses)
{
    auto r = sra_cli("oracle " + c("robot.sra") + " --samples 50 --effects 5 --prestates 10 --config " +
                     c("robot.sracfg") + " --invariant " + c("robot.srainv") + " --property " + c("prop.srainv") +
                     " --json");
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["contracts"]["samples"], 50);
    EXPECT_EQ(j["reach"]["violation"], "");
}
