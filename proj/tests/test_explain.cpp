#include "oracles.hpp"

#include "peg/explain.hpp"
#include "peg/trace_io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

using namespace peg;

namespace {

std::shared_ptr<const PlanningBackend> ground_backend() { return std::make_shared<GroundBackend>(); }

ReconciliationProblem amy_problem() {
    auto models = oracle::amy_monica();
    return ReconciliationProblem(models.at("robot"), models.at("human"), ground_backend());
}

std::vector<std::string> rendered(const std::vector<FeatureChange> &changes) {
    std::vector<std::string> out;
    for (const auto &c : changes)
        out.push_back(c.str());
    return out;
}

std::vector<FeatureChange> parse_all(std::initializer_list<const char *> list) {
    std::vector<FeatureChange> out;
    for (const char *s : list)
        out.push_back(FeatureChange::parse(s));
    return out;
}

std::vector<Cost> costs(const ExplanationTrace &t) {
    std::vector<Cost> out;
    for (const auto &s : t.steps)
        out.push_back(s.cost_star);
    return out;
}

SearchOptions options_for(MetricKind metric, Rational epsilon = Rational(1, 1000)) {
    SearchOptions o;
    o.metric = metric;
    o.epsilon = epsilon;
    return o;
}

} // namespace

TEST(Problem, ChangesAreInStaticOrder) {
    auto problem = amy_problem();
    EXPECT_EQ(rendered(problem.changes()),
              (std::vector<std::string>{"-init-has-not-holiday", "+init-has-car-ready", "+init-has-is-sunny"}));
    EXPECT_EQ(problem.robot_cost(), 9);
    EXPECT_EQ(problem.robot_plan(), std::vector<std::string>{"visit-park-cheap"});
}

TEST(Problem, RejectsSuboptimalRobotPlan) {
    auto models = oracle::amy_monica();
    EXPECT_THROW(ReconciliationProblem(models.at("robot"), models.at("human"), ground_backend(),
                                       std::vector<std::string>{"visit-park"}),
                 UnsupportedInput);
    Model other = models.at("human");
    other.actions.erase("visit-park");
    EXPECT_THROW(ReconciliationProblem(models.at("robot"), other, ground_backend()), UnsupportedInput);
}

TEST(Problem, SolveAnchorsOnTheRobotPlan) {
    auto problem = amy_problem();
    auto human = problem.solve(problem.human());
    EXPECT_TRUE(human.solvable);
    EXPECT_EQ(human.cost_star, 5);
    EXPECT_EQ(human.robot_plan_cost, std::nullopt);
    EXPECT_FALSE(human.reconciles(9));
    auto robot = problem.solve(problem.robot());
    EXPECT_TRUE(robot.reconciles(9));
    EXPECT_EQ(robot.plan, problem.robot_plan());
}

TEST(Candidates, OrderDependsOnCurrentCost) {
    auto problem = amy_problem();
    EXPECT_EQ(rendered(candidate_changes(problem, {}, 5)),
              (std::vector<std::string>{"-init-has-not-holiday", "+init-has-car-ready", "+init-has-is-sunny"}));
    EXPECT_EQ(rendered(candidate_changes(problem, {}, 10)),
              (std::vector<std::string>{"+init-has-car-ready", "+init-has-is-sunny", "-init-has-not-holiday"}));
    auto applied = parse_all({"+init-has-car-ready"});
    EXPECT_EQ(candidate_changes(problem, applied, 5).size(), 2u);
}

TEST(Candidates, RaisesCostKinds) {
    auto human = oracle::amy_monica().at("human");
    EXPECT_TRUE(raises_cost(FeatureChange::parse("-init-has-not-holiday"), human));
    EXPECT_FALSE(raises_cost(FeatureChange::parse("+init-has-car-ready"), human));
    EXPECT_TRUE(raises_cost(FeatureChange::parse("+goal-has-car-ready"), human));
    EXPECT_TRUE(raises_cost(FeatureChange::parse("+visit-park-has-cost-12"), human));
    EXPECT_FALSE(raises_cost(FeatureChange::parse("+visit-park-has-cost-2"), human));
    EXPECT_FALSE(raises_cost(FeatureChange::parse("-visit-park-cheap-has-precondition-is-sunny"), human));
}

TEST(Predicates, ExplanationAndCompleteness) {
    auto problem = amy_problem();
    EXPECT_FALSE(is_explanation(problem, {}));
    EXPECT_TRUE(is_explanation(problem, parse_all({"+init-has-car-ready", "+init-has-is-sunny"})));
    EXPECT_FALSE(is_explanation(problem, parse_all({"-init-has-not-holiday"})));
    EXPECT_FALSE(consistent_with_robot(problem, parse_all({"+init-has-happy"})));
    EXPECT_FALSE(consistent_with_robot(problem, parse_all({"+init-has-car-ready", "+init-has-car-ready"})));

    const auto &all = problem.changes();
    EXPECT_TRUE(is_complete(problem, all));
    for (std::uint32_t mask = 1; mask < 7; ++mask) {
        std::vector<FeatureChange> subset;
        for (std::size_t i = 0; i < 3; ++i)
            if (mask >> i & 1)
                subset.push_back(all[i]);
        EXPECT_FALSE(is_complete(problem, subset)) << mask;
    }
    EXPECT_TRUE(is_monotonic(problem, all));
}

TEST(Concise, AmyWorstOrder) {
    auto problem = amy_problem();
    auto t = generate_concise(problem, options_for(MetricKind::cost_gap_squared));
    EXPECT_EQ(t.mode, "concise");
    EXPECT_TRUE(t.complete);
    EXPECT_EQ(rendered(t.changes),
              (std::vector<std::string>{"+init-has-car-ready", "+init-has-is-sunny", "-init-has-not-holiday"}));
    EXPECT_EQ(costs(t), (std::vector<Cost>{5, 5, 1, 9}));
    EXPECT_EQ(t.sum_rho, 80);
    EXPECT_EQ(trace_sum_rho(t, MetricKind::cost_gap), 12);
    ASSERT_EQ(t.steps.size(), 4u);
    EXPECT_FALSE(t.steps[0].change);
    EXPECT_EQ(t.steps[3].rho, 64);
}

TEST(Progressive, AmyBestOrder) {
    auto problem = amy_problem();
    auto t = generate_progressive(problem, options_for(MetricKind::cost_gap_squared));
    EXPECT_EQ(t.mode, "peg");
    EXPECT_TRUE(t.complete);
    EXPECT_EQ(rendered(t.changes),
              (std::vector<std::string>{"-init-has-not-holiday", "+init-has-car-ready", "+init-has-is-sunny"}));
    EXPECT_EQ(costs(t), (std::vector<Cost>{5, 10, 10, 9}));
    EXPECT_EQ(t.sum_rho, 26);
    EXPECT_EQ(trace_sum_rho(t, MetricKind::cost_gap), 6);
    EXPECT_EQ(t.steps.back().plan, problem.robot_plan());
    EXPECT_EQ(t.steps.back().model_digest, model_digest(problem.robot()));
    // Largest single cost jump is 5, below the concise order's 8.
    Cost biggest = 0;
    for (std::size_t i = 1; i < t.steps.size(); ++i)
        biggest = std::max(biggest, std::abs(t.steps[i].cost_star - t.steps[i - 1].cost_star));
    EXPECT_EQ(biggest, 5);
}

TEST(Progressive, PaperVariantAgreesOnAmy) {
    auto problem = amy_problem();
    auto o = options_for(MetricKind::cost_gap_squared);
    o.variant = HeuristicVariant::paper;
    EXPECT_EQ(generate_progressive(problem, o).sum_rho, 26);
    EXPECT_EQ(generate_progressive(problem, options_for(MetricKind::cost_gap)).sum_rho, 6);
}

TEST(Progressive, IdenticalModelsGiveEmptyTrace) {
    auto robot = oracle::amy_monica().at("robot");
    ReconciliationProblem problem(robot, robot, ground_backend());
    for (auto *gen : {&generate_progressive, &generate_concise}) {
        auto t = gen(problem, {});
        EXPECT_TRUE(t.complete);
        EXPECT_TRUE(t.changes.empty());
        EXPECT_EQ(t.steps.size(), 1u);
        EXPECT_EQ(t.sum_rho, 0);
    }
}

TEST(Progressive, BudgetIsEnforced) {
    auto problem = amy_problem();
    auto o = options_for(MetricKind::cost_gap_squared);
    o.node_budget = 1;
    EXPECT_THROW(generate_progressive(problem, o), ResourceLimit);
    EXPECT_THROW(generate_concise(problem, o), ResourceLimit);
}

TEST(Progressive, ObserverSeesExpansionsAndEdges) {
    auto problem = amy_problem();
    std::size_t expansions = 0, edges = 0;
    SearchObserver obs;
    obs.on_expand = [&](const NodeView &) { ++expansions; };
    obs.on_edge = [&](const NodeView &parent, const NodeView &child, Cost rho) {
        ++edges;
        EXPECT_EQ(child.applied.size(), parent.applied.size() + 1);
        EXPECT_GE(rho, 0);
    };
    auto o = options_for(MetricKind::cost_gap_squared);
    o.observer = &obs;
    auto t = generate_progressive(problem, o);
    // The goal node is shown to the observer but not counted as expanded.
    EXPECT_EQ(expansions, t.search.expansions + 1);
    EXPECT_GT(edges, 0u);
}

TEST(Replay, GivenOrderIsRecorded) {
    auto problem = amy_problem();
    auto changes = parse_all({"+init-has-is-sunny", "-init-has-not-holiday", "+init-has-car-ready"});
    auto t = replay(problem, changes, options_for(MetricKind::cost_gap));
    EXPECT_EQ(t.mode, "given");
    EXPECT_TRUE(t.complete);
    EXPECT_EQ(costs(t), (std::vector<Cost>{5, 5, 10, 9}));
    EXPECT_EQ(t.sum_rho, 6);
    auto partial = replay(problem, parse_all({"+init-has-car-ready"}), {});
    EXPECT_FALSE(partial.complete);
    EXPECT_THROW(replay(problem, parse_all({"+init-has-not-holiday"}), {}), PreconditionViolation);
}

TEST(TraceIo, CsvAndChangeParsing) {
    auto problem = amy_problem();
    auto t = generate_progressive(problem, options_for(MetricKind::cost_gap));
    EXPECT_EQ(trace_to_csv(t), "step,cost_star,rho\r\n0,5,0\r\n1,10,5\r\n2,10,0\r\n3,9,1\r\n");
    EXPECT_EQ(parse_changes(trace_to_json(t)), t.changes);
    EXPECT_EQ(parse_changes("[\"-init-has-not-holiday\"]").size(), 1u);
    EXPECT_EQ(parse_changes("# comment\n+init-has-car-ready\n\nremove init-has-not-holiday\n").size(), 2u);
    EXPECT_THROW(parse_changes("{\"nothing\": 1}"), UnsupportedInput);
    auto j = nlohmann::json::parse(trace_to_json(t));
    EXPECT_EQ(j["sum_rho"], 6);
    EXPECT_EQ(j["epsilon"], "1/1000");
    EXPECT_EQ(j["steps"].size(), 4u);
}

// Properties on random instances against the exhaustive oracle.
class RandomProblems : public ::testing::Test {
protected:
    std::mt19937_64 rng{424242};
    std::shared_ptr<const PlanningBackend> backend = ground_backend();
};

TEST_F(RandomProblems, ProgressiveDominatesConcise) {
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 40; ++trial) {
        auto problem = oracle::random_problem(rng, 4, backend);
        if (!problem)
            continue;
        ++checked;
        for (auto metric : {MetricKind::cost_gap, MetricKind::cost_gap_squared}) {
            auto peg = generate_progressive(*problem, options_for(metric));
            auto concise = generate_concise(*problem, options_for(metric));
            ASSERT_TRUE(peg.complete);
            ASSERT_TRUE(concise.complete);
            EXPECT_LE(peg.sum_rho, concise.sum_rho);
            EXPECT_TRUE(is_complete(*problem, peg.changes));
            EXPECT_TRUE(is_complete(*problem, concise.changes));
        }
    }
    EXPECT_GE(checked, 20);
}

TEST_F(RandomProblems, EpsilonRemovesRedundantChanges) {
    const Rational eps(1, 1000);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 30; ++trial) {
        auto problem = oracle::random_problem(rng, 4, backend);
        if (!problem)
            continue;
        ++checked;
        oracle::SetSolver solver(*problem);
        auto all = oracle::enumerate(*problem, solver);
        // Best sum_rho + eps * length over complete sequences.
        std::optional<Rational> best;
        for (const auto &s : all.sequences) {
            if (!s.complete)
                continue;
            Rational v = Rational(oracle::sum_rho(s, MetricKind::cost_gap)) +
                         eps * static_cast<std::int64_t>(s.order.size());
            if (!best || v < *best)
                best = v;
        }
        ASSERT_TRUE(best);
        auto t = generate_progressive(*problem, options_for(MetricKind::cost_gap, eps));
        Rational got = Rational(t.sum_rho) + eps * static_cast<std::int64_t>(t.changes.size());
        EXPECT_EQ(got, *best);
    }
    EXPECT_GE(checked, 15);
}

TEST_F(RandomProblems, EditDistanceEndsOnTheRobotPlan) {
    int checked = 0;
    for (int trial = 0; trial < 100 && checked < 20; ++trial) {
        auto problem = oracle::random_problem(rng, 4, backend);
        if (!problem)
            continue;
        ++checked;
        auto t = generate_progressive(*problem, options_for(MetricKind::edit_distance));
        ASSERT_TRUE(t.complete);
        EXPECT_EQ(t.steps.back().plan, problem->robot_plan());
        EXPECT_EQ(t.steps.back().cost_star, problem->robot_cost());
    }
}
