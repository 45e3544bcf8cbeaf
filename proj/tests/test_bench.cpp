#include "oracles.hpp"

#include "peg/bench.hpp"
#include "peg/pddl.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>

using namespace peg;

namespace {

const Model &rover_schema_model() {
    static const Model m = [] {
        auto d = pddl::parse_domain(oracle::read_file(oracle::data_path("rover/domain.pddl")));
        auto p = pddl::parse_problem(oracle::read_file(oracle::data_path("rover/p01.pddl")));
        return pddl::lift(d, p);
    }();
    return m;
}

PerturbSpec spec(double p, std::uint64_t seed) {
    PerturbSpec s;
    s.missing_probability = p;
    s.seed = seed;
    return s;
}

const char *kTinyDomain = R"((define (domain tiny) (:requirements :strips :typing)
  (:types place)
  (:predicates (at ?p - place) (road ?a ?b - place) (visited ?p - place))
  (:action move :parameters (?a ?b - place)
    :precondition (and (at ?a) (road ?a ?b))
    :effect (and (at ?b) (visited ?b) (not (at ?a))))))";

const char *kTinyProblem = R"((define (problem t1) (:domain tiny)
  (:objects x y z - place)
  (:init (at x) (road x y) (road y z))
  (:goal (visited z))))";

} // namespace

TEST(Perturb, PoolHoldsOnlyEligibleKinds) {
    const auto &m = rover_schema_model();
    auto pool = perturbation_pool(m, PerturbSpec{}.eligible);
    EXPECT_EQ(pool.size(), 69u);
    for (const auto &f : pool)
        EXPECT_NE(f.kind(), FeatureKind::init);
    EXPECT_TRUE(std::is_sorted(pool.begin(), pool.end()));
    auto only_pre = perturbation_pool(m, {FeatureKind::precondition});
    EXPECT_LT(only_pre.size(), pool.size());
}

TEST(Perturb, ExtremeProbabilities) {
    const auto &m = rover_schema_model();
    EXPECT_TRUE(removed_features(m, spec(0.0, 1)).empty());
    EXPECT_EQ(perturb_model(m, spec(0.0, 1)), m);
    EXPECT_EQ(removed_features(m, spec(1.0, 1)).size(), 69u);
    auto bare = perturb_model(m, spec(1.0, 1));
    for (const auto &[name, a] : bare.actions) {
        EXPECT_TRUE(a.preconditions.empty()) << name;
        EXPECT_TRUE(a.add_effects.empty()) << name;
    }
    EXPECT_EQ(bare.init, m.init);
}

TEST(Perturb, InvalidSpecsAreRejected) {
    const auto &m = rover_schema_model();
    EXPECT_THROW(removed_features(m, spec(1.5, 1)), UnsupportedInput);
    EXPECT_THROW(removed_features(m, spec(-0.1, 1)), UnsupportedInput);
    auto s = spec(0.1, 1);
    s.eligible.clear();
    EXPECT_THROW(removed_features(m, s), UnsupportedInput);
}

TEST(Perturb, DeterministicPerSeed) {
    const auto &m = rover_schema_model();
    EXPECT_EQ(removed_features(m, spec(0.3, 77)), removed_features(m, spec(0.3, 77)));
    EXPECT_NE(removed_features(m, spec(0.3, 77)), removed_features(m, spec(0.3, 78)));
}

TEST(Perturb, MatchesTheDocumentedGenerator) {
    const auto &m = rover_schema_model();
    auto pool = perturbation_pool(m, PerturbSpec{}.eligible);
    std::mt19937_64 rng(2024);
    std::vector<Feature> want;
    for (const auto &f : pool)
        if (std::ldexp(static_cast<double>(rng() >> 11), -53) < 0.25)
            want.push_back(f);
    EXPECT_EQ(removed_features(m, spec(0.25, 2024)), want);
}

TEST(Perturb, SameSeedNestsAcrossProbabilities) {
    const auto &m = rover_schema_model();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto low = removed_features(m, spec(0.08, seed));
        auto high = removed_features(m, spec(0.14, seed));
        EXPECT_TRUE(std::includes(high.begin(), high.end(), low.begin(), low.end()));
    }
}

TEST(Perturb, UnbiasedWithinThreeSigma) {
    const auto &m = rover_schema_model();
    const double p = 0.1;
    const int trials = 2000;
    double total = 0;
    for (int s = 0; s < trials; ++s)
        total += static_cast<double>(removed_features(m, spec(p, static_cast<std::uint64_t>(s))).size());
    double n = 69.0 * trials;
    double sigma = std::sqrt(n * p * (1 - p));
    EXPECT_NEAR(total, n * p, 3 * sigma);
}

TEST(Sweep, GridPoints) {
    auto grid = sweep_grid(0.06, 0.14, 0.01);
    ASSERT_EQ(grid.size(), 9u);
    EXPECT_DOUBLE_EQ(grid.front(), 0.06);
    EXPECT_NEAR(grid.back(), 0.14, 1e-12);
    EXPECT_EQ(sweep_grid(0.1, 0.1, 0.01).size(), 1u);
    EXPECT_THROW(sweep_grid(0.2, 0.1, 0.01), UnsupportedInput);
    EXPECT_THROW(sweep_grid(0.1, 0.2, 0.0), UnsupportedInput);
}

TEST(Bench, ComparisonOnTinyTask) {
    auto task = BenchTask::from_pddl(kTinyDomain, kTinyProblem, Granularity::schema);
    auto report = run_comparison(task, 0.5, 3, 4);
    ASSERT_EQ(report.records.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto &r = report.records[i];
        EXPECT_EQ(r.seed, 3 + i);
        EXPECT_EQ(r.run_index, i);
        ASSERT_FALSE(r.flagged);
        ASSERT_TRUE(r.peg && r.concise);
        EXPECT_LE(r.peg->sum_rho, r.concise->sum_rho);
        EXPECT_EQ(r.missing_features, removed_features(task.robot, spec(0.5, 3 + i)).size());
    }
    EXPECT_EQ(report.averages.runs, 4u);
    auto csv = report_to_csv(report);
    EXPECT_NE(csv.find("\r\naverage,"), std::string::npos);
    auto j = nlohmann::json::parse(report_to_json(report));
    EXPECT_EQ(j["records"].size(), 4u);
    EXPECT_EQ(j["config"]["seed"], 3);
}

TEST(Bench, ZeroRunsGiveEmptyAverages) {
    auto task = BenchTask::from_pddl(kTinyDomain, kTinyProblem, Granularity::ground);
    auto report = run_comparison(task, 0.1, 1, 0);
    EXPECT_TRUE(report.records.empty());
    EXPECT_EQ(report.averages.runs, 0u);
    EXPECT_EQ(report.averages.peg_size, 0.0);
    EXPECT_FALSE(report_to_csv(report).empty());
}

TEST(Bench, BudgetExhaustionIsFlaggedAndExcluded) {
    auto task = BenchTask::from_pddl(kTinyDomain, kTinyProblem, Granularity::ground);
    BenchOptions o;
    o.search_budget = 0;
    auto r = run_once(task, 1.0, 1, 0, o);
    EXPECT_TRUE(r.flagged);
    EXPECT_FALSE(r.note.empty());
    EXPECT_EQ(average({r}).runs, 0u);
}

TEST(Bench, SweepUsesOneSeedPerProbability) {
    auto task = BenchTask::from_pddl(kTinyDomain, kTinyProblem, Granularity::schema);
    BenchOptions o;
    o.run_concise = false;
    auto report = sweep_missing_prob(task, 0.2, 0.6, 0.2, 9, o);
    ASSERT_EQ(report.records.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(report.records[i].seed, 9u);
        EXPECT_FALSE(report.records[i].concise);
    }
    EXPECT_LE(report.records[0].missing_features, report.records[2].missing_features);
}
