#include "oracles.hpp"

#include "peg/fixture.hpp"
#include "peg/pddl.hpp"
#include "peg/planner.hpp"

#include <gtest/gtest.h>

using namespace peg;
using namespace peg::pddl;

namespace {

const char *kTinyDomain = R"(
(define (domain tiny)
  (:requirements :strips :typing)
  (:types place)
  (:predicates (at ?p - place) (road ?a ?b - place) (visited ?p - place))
  (:action move
    :parameters (?a ?b - place)
    :precondition (and (at ?a) (road ?a ?b))
    :effect (and (at ?b) (visited ?b) (not (at ?a)))))
)";

const char *kTinyProblem = R"(
(define (problem tiny-1)
  (:domain tiny)
  (:objects x y z - place)
  (:init (at x) (road x y) (road y z))
  (:goal (and (visited z))))
)";

int error_line(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const ParseError &e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST(ParseDomain, RoverHasNineSchemas) {
    auto d = parse_domain(oracle::read_file(oracle::data_path("rover/domain.pddl")));
    EXPECT_EQ(d.name, "rover");
    ASSERT_EQ(d.actions.size(), 9u);
    std::vector<std::string> names;
    for (const auto &a : d.actions)
        names.push_back(a.name);
    std::vector<std::string> want{"navigate", "sample_soil", "sample_rock", "drop", "calibrate", "take_image",
                                  "communicate_soil_data", "communicate_rock_data", "communicate_image_data"};
    EXPECT_EQ(names, want);
    const auto *nav = d.find_action("navigate");
    ASSERT_NE(nav, nullptr);
    EXPECT_EQ(nav->parameters.size(), 3u);
    EXPECT_EQ(nav->parameters[0].type, "rover");
}

TEST(ParseDomain, AdlRequirementIsRejectedWithLine) {
    std::string text = "(define (domain d)\n  (:requirements :adl)\n  (:predicates (p)))";
    EXPECT_THROW(parse_domain(text), ParseError);
    EXPECT_EQ(error_line([&] { parse_domain(text); }), 2);
}

TEST(ParseDomain, RejectsDisjunctionAndConditionalEffects) {
    std::string disj = R"((define (domain d) (:predicates (p) (q))
      (:action a :parameters () :precondition (or (p) (q)) :effect (p))))";
    EXPECT_THROW(parse_domain(disj), ParseError);
    std::string cond = R"((define (domain d) (:predicates (p) (q))
      (:action a :parameters () :precondition (p) :effect (when (p) (q)))))";
    EXPECT_THROW(parse_domain(cond), ParseError);
}

TEST(ParseDomain, UnbalancedParensReportPosition) {
    std::string text = "(define (domain d)\n(:predicates (p)\n";
    EXPECT_THROW(parse_domain(text), ParseError);
}

TEST(ParseDomain, ReadsConstantActionCosts) {
    std::string text = R"((define (domain d) (:requirements :strips :action-costs)
      (:predicates (p))
      (:functions (total-cost))
      (:action a :parameters () :precondition () :effect (and (p) (increase (total-cost) 3)))))";
    auto d = parse_domain(text);
    EXPECT_TRUE(d.declares_total_cost);
    ASSERT_TRUE(d.actions[0].cost);
    EXPECT_EQ(*d.actions[0].cost, 3);
}

TEST(ParseProblem, UndeclaredObjectIsAnError) {
    auto d = parse_domain(kTinyDomain);
    std::string bad = R"((define (problem p) (:domain tiny) (:objects x - place)
      (:init (at x) (road x nowhere)) (:goal (visited x))))";
    EXPECT_THROW(ground(d, parse_problem(bad)), ParseError);
}

TEST(RoundTrip, DomainAndProblemSurvivePrinting) {
    for (std::string problem : {"rover/p01.pddl", "rover/p02.pddl"}) {
        auto d = parse_domain(oracle::read_file(oracle::data_path("rover/domain.pddl")));
        auto p = parse_problem(oracle::read_file(oracle::data_path(problem)));
        EXPECT_EQ(parse_domain(to_pddl(d)), d);
        EXPECT_EQ(parse_problem(to_pddl(p)), p);
    }
    auto d = parse_domain(kTinyDomain);
    EXPECT_EQ(parse_domain(to_pddl(d)), d);
}

TEST(Ground, TinyTaskHasExpectedActions) {
    auto m = ground(parse_domain(kTinyDomain), parse_problem(kTinyProblem));
    // Static pruning keeps the two road-backed moves.
    ASSERT_EQ(m.actions.size(), 2u);
    const auto &a = m.action("move-x-y");
    EXPECT_EQ(a.preconditions, (FactSet{"at(x)", "road(x,y)"}));
    EXPECT_EQ(a.add_effects, (FactSet{"at(y)", "visited(y)"}));
    EXPECT_EQ(a.delete_effects, FactSet{"at(x)"});
    EXPECT_EQ(a.cost, 1);
    EXPECT_EQ(a.schema, "move");
    EXPECT_EQ(m.goal, FactSet{"visited(z)"});
    auto plan = optimal_plan(m);
    ASSERT_TRUE(plan.solved());
    EXPECT_EQ(plan.plan->cost, 2);
}

TEST(Ground, WithoutPruningKeepsEveryInstance) {
    auto m = ground(parse_domain(kTinyDomain), parse_problem(kTinyProblem), GroundOptions{false});
    EXPECT_EQ(m.actions.size(), 9u);
}

TEST(Ground, RoverOptimalCosts) {
    auto d = parse_domain(oracle::read_file(oracle::data_path("rover/domain.pddl")));
    auto p1 = optimal_plan(ground(d, parse_problem(oracle::read_file(oracle::data_path("rover/p01.pddl")))));
    ASSERT_TRUE(p1.solved());
    EXPECT_EQ(p1.plan->cost, 10);
    auto p2 = optimal_plan(ground(d, parse_problem(oracle::read_file(oracle::data_path("rover/p02.pddl")))));
    ASSERT_TRUE(p2.solved());
    EXPECT_EQ(p2.plan->cost, 11);
}

TEST(GroundPair, SharesOneActionUniverse) {
    auto d = parse_domain(kTinyDomain);
    auto robot = parse_problem(kTinyProblem);
    auto human = robot;
    human.init.erase(human.init.begin() + 2); // drop road(y,z)
    auto [r, h] = ground_pair(d, robot, d, human);
    EXPECT_EQ(r.action_names(), h.action_names());
    EXPECT_EQ(delta(h, r).size(), 1u);
}

TEST(Lift, RoverPoolSize) {
    auto d = parse_domain(oracle::read_file(oracle::data_path("rover/domain.pddl")));
    auto p = parse_problem(oracle::read_file(oracle::data_path("rover/p01.pddl")));
    auto m = lift(d, p);
    EXPECT_EQ(m.actions.size(), 9u);
    std::size_t domain_features = 0;
    for (const auto &f : gamma(m))
        if (f.kind() == FeatureKind::precondition || f.kind() == FeatureKind::add_effect ||
            f.kind() == FeatureKind::delete_effect)
            ++domain_features;
    // Deletes that are re-added (three communicate schemas, two each) are dropped.
    EXPECT_EQ(domain_features, 69u);
    EXPECT_TRUE(m.action("navigate").preconditions.count("at(?x,?y)"));
}

TEST(Lower, InvertsLift) {
    auto d = parse_domain(kTinyDomain);
    auto p = parse_problem(kTinyProblem);
    auto m = lift(d, p);
    auto [d2, p2] = lower(m, d, p);
    EXPECT_EQ(lift(d2, p2), m);
    auto edited = apply_change(m, FeatureChange::parse("-move-has-precondition-road(?a,?b)"));
    auto [d3, p3] = lower(edited, d, p);
    EXPECT_TRUE(d3.actions[0].precondition.size() == 1);
}

TEST(SchemaBackend, PlansOnTheGrounding) {
    auto d = parse_domain(kTinyDomain);
    auto p = parse_problem(kTinyProblem);
    auto backend = SchemaBackend(d, p);
    auto m = lift(d, p);
    auto r = backend.solve(m);
    ASSERT_TRUE(r.solved());
    EXPECT_EQ(r.plan->actions, (std::vector<std::string>{"move-x-y", "move-y-z"}));
    EXPECT_EQ(backend.cost_of(r.plan->actions, m), 2);
    EXPECT_EQ(backend.schema_of("move-x-y", m), "move");
    auto relaxed = apply_change(m, FeatureChange::parse("-move-has-precondition-road(?a,?b)"));
    auto r2 = backend.solve(relaxed);
    ASSERT_TRUE(r2.solved());
    EXPECT_EQ(r2.plan->cost, 1);
}

TEST(Fixture, AmySplitsIntoFourActions) {
    auto models = oracle::amy_monica();
    ASSERT_EQ(models.size(), 2u);
    const auto &human = models.at("human");
    EXPECT_EQ(human.action_names(), (std::set<std::string>{"outlet-shopping", "outlet-shopping-cheap",
                                                            "visit-park", "visit-park-cheap"}));
    EXPECT_EQ(human.action("outlet-shopping-cheap").preconditions,
              (FactSet{"car-ready", "is-sunny", "not-holiday"}));
    EXPECT_EQ(human.action("outlet-shopping-cheap").cost, 1);
    EXPECT_EQ(human.action("visit-park").preconditions, FactSet{});
    EXPECT_EQ(human.init, FactSet{"not-holiday"});
    EXPECT_EQ(models.at("robot").init, (FactSet{"car-ready", "is-sunny"}));
    EXPECT_EQ(human.goal, FactSet{"happy"});
}

TEST(Fixture, AmyAndMonicaPlans) {
    auto models = oracle::amy_monica();
    auto amy = optimal_plan(models.at("human"));
    ASSERT_TRUE(amy.solved());
    EXPECT_EQ(amy.plan->actions, std::vector<std::string>{"outlet-shopping"});
    EXPECT_EQ(amy.plan->cost, 5);
    auto monica = optimal_plan(models.at("robot"));
    ASSERT_TRUE(monica.solved());
    EXPECT_EQ(monica.plan->actions, std::vector<std::string>{"visit-park-cheap"});
    EXPECT_EQ(monica.plan->cost, 9);
}

TEST(Fixture, WithoutModelBlocksGivesDefault) {
    auto models = load_fixture("action a 2\neff+: g\ngoal: g\n");
    ASSERT_EQ(models.size(), 1u);
    EXPECT_EQ(models.begin()->first, "default");
    EXPECT_EQ(models.begin()->second.action("a").cost, 2);
}

TEST(Fixture, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line([] { load_fixture("action a 1\nbogus: x\n"); }), 2);
    EXPECT_EQ(error_line([] { load_fixture("\n\naction a notanumber\n"); }), 3);
    EXPECT_THROW(load_fixture("pre: p\n"), ParseError); // no action yet
}

TEST(Fixture, CheapNameCollisionIsUnsupported) {
    EXPECT_THROW(load_fixture("action a 2 (1)\npre: (p)\naction a-cheap 3\n"), UnsupportedInput);
}
