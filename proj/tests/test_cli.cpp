// Runs the peg binary as a subprocess and checks exit codes and output.

#include "oracles.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string &args) {
    std::string cmd = std::string(PEG_BINARY) + " " + args + " 2>/dev/null";
    Run r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, n);
    int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string fixture() { return "--fixture " + oracle::data_path("amy_monica.model"); }

std::filesystem::path temp_file(const std::string &name, const std::string &content) {
    auto path = std::filesystem::temp_directory_path() / ("peg_cli_test_" + name);
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST(Cli, PlanPrintsOptimalPlan) {
    auto r = run("plan " + fixture() + " --model human");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("(outlet-shopping)"), std::string::npos);
    EXPECT_NE(r.out.find("; cost = 5"), std::string::npos);
    auto rover = run("plan --robot-domain " + oracle::data_path("rover/domain.pddl") + " --robot-problem " +
                     oracle::data_path("rover/p01.pddl"));
    EXPECT_EQ(rover.status, 0);
    EXPECT_NE(rover.out.find("; cost = 10"), std::string::npos);
}

TEST(Cli, ExplainJsonReportsSumRho) {
    auto r = run("explain " + fixture() + " --mode peg --metric p2 --format json");
    ASSERT_EQ(r.status, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["sum_rho"], 26);
    EXPECT_EQ(j["complete"], true);
    EXPECT_EQ(j["changes"].size(), 3u);
    // JSON is the default format for explain.
    auto concise = nlohmann::json::parse(run("explain " + fixture() + " --mode concise").out);
    EXPECT_EQ(concise["sum_rho"], 80);
}

TEST(Cli, ExplainCsv) {
    auto r = run("explain " + fixture() + " --metric p1 --format csv");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "step,cost_star,rho\r\n0,5,0\r\n1,10,5\r\n2,10,0\r\n3,9,1\r\n");
}

TEST(Cli, ValidateRoundTrip) {
    auto trace = run("explain " + fixture() + " --format json");
    ASSERT_EQ(trace.status, 0);
    auto path = temp_file("trace.json", trace.out);
    auto ok = run("validate " + fixture() + " " + path.string());
    EXPECT_EQ(ok.status, 0);
    auto partial = temp_file("partial.txt", "+init-has-car-ready\n");
    EXPECT_EQ(run("validate " + fixture() + " " + partial.string()).status, 1);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("").status, 2);
    EXPECT_EQ(run("explain " + fixture() + " --metric p9").status, 2);
    EXPECT_EQ(run("plan --fixture /no/such/file").status, 2);
    auto bad = temp_file("bad.model", "action a 1\nbogus: x\n");
    EXPECT_EQ(run("plan --fixture " + bad.string()).status, 1);
    auto adl = temp_file("adl.pddl", "(define (domain d) (:requirements :adl) (:predicates (p)))");
    EXPECT_EQ(run("plan --robot-domain " + adl.string() + " --robot-problem " + adl.string()).status, 1);
    EXPECT_EQ(run("explain " + fixture() + " --node-budget 1").status, 1);
}

TEST(Cli, IdenticalModelsGiveEmptyTrace) {
    auto domain = oracle::data_path("rover/domain.pddl");
    auto problem = oracle::data_path("rover/p01.pddl");
    auto r = run("explain --robot-domain " + domain + " --robot-problem " + problem + " --human-domain " + domain +
                 " --human-problem " + problem);
    ASSERT_EQ(r.status, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["changes"].empty());
    EXPECT_EQ(j["sum_rho"], 0);
    EXPECT_EQ(j["complete"], true);
}

TEST(Cli, BenchOnSmallTask) {
    auto domain = temp_file("domain.pddl", R"((define (domain tiny) (:requirements :strips :typing)
  (:types place)
  (:predicates (at ?p - place) (road ?a ?b - place) (visited ?p - place))
  (:action move :parameters (?a ?b - place)
    :precondition (and (at ?a) (road ?a ?b))
    :effect (and (at ?b) (visited ?b) (not (at ?a))))))");
    auto problem = temp_file("problem.pddl", R"((define (problem t1) (:domain tiny)
  (:objects x y z - place)
  (:init (at x) (road x y) (road y z))
  (:goal (visited z))))");
    auto args = " --domain " + domain.string() + " --problem " + problem.string();
    auto bench = run("bench" + args + " --missing-prob 0.5 --runs 3 --format csv");
    ASSERT_EQ(bench.status, 0);
    // header, three runs, averages
    EXPECT_EQ(std::count(bench.out.begin(), bench.out.end(), '\n'), 5);
    auto sweep = run("sweep" + args + " --p-min 0.2 --p-max 0.4 --p-step 0.1 --format json");
    ASSERT_EQ(sweep.status, 0);
    EXPECT_EQ(nlohmann::json::parse(sweep.out)["records"].size(), 3u);
}
