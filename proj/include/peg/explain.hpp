#ifndef PEG_EXPLAIN_HPP
#define PEG_EXPLAIN_HPP

#include "peg/metrics.hpp"
#include "peg/planner.hpp"
#include "peg/strips_model.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace peg {

/// What the search needs to know about one model.
struct ModelSolution {
    bool solvable = false;
    Cost cost_star = 0; // 0 when unsolvable
    /// The robot plan when it is optimal here, otherwise the planner's optimum;
    /// empty when unsolvable.
    std::vector<std::string> plan;
    std::optional<Cost> robot_plan_cost; // nullopt: robot plan infeasible here
    SearchStatistics planner;

    /// Robot plan optimal here with the given cost.
    bool reconciles(Cost robot_cost) const {
        return robot_plan_cost && *robot_plan_cost == cost_star && cost_star == robot_cost;
    }
};

/// Robot model, human model and the robot's optimal plan.
class ReconciliationProblem {
public:
    /// Throws UnsupportedInput when the action names differ, the robot model is
    /// unsolvable, or `robot_plan` is not optimal in the robot model.
    ReconciliationProblem(Model robot, Model human, std::shared_ptr<const PlanningBackend> backend,
                          std::optional<std::vector<std::string>> robot_plan = std::nullopt);

    const Model &robot() const { return robot_; }
    const Model &human() const { return human_; }
    const std::vector<std::string> &robot_plan() const { return robot_plan_; }
    Cost robot_cost() const { return robot_cost_; }
    const PlanningBackend &backend() const { return *backend_; }

    /// Every change from the human model toward the robot model, with the
    /// cost-raising kinds first and each group ordered by rendering.
    const std::vector<FeatureChange> &changes() const { return changes_; }

    ModelSolution solve(const Model &model) const;

private:
    Model robot_;
    Model human_;
    std::shared_ptr<const PlanningBackend> backend_;
    std::vector<std::string> robot_plan_;
    Cost robot_cost_ = 0;
    std::vector<FeatureChange> changes_;
};

/// Removing an init fact or add effect, adding a goal, precondition or delete
/// effect, or raising a cost above the human's value.
bool raises_cost(const FeatureChange &change, const Model &human);

/// Changes from the problem's set not yet in `applied`. When `current_cost`
/// is at most the robot plan's cost the cost-raising kinds come first,
/// otherwise the order is by rendering alone.
std::vector<FeatureChange> candidate_changes(const ReconciliationProblem &problem,
                                             std::span<const FeatureChange> applied, Cost current_cost);

/// Each change moves the human model toward the robot model, at most once.
bool consistent_with_robot(const ReconciliationProblem &problem, std::span<const FeatureChange> changes);

/// Consistent changes that strictly shrink the gap between the robot plan's
/// cost and the optimal cost. Throws when a change is inapplicable.
bool is_explanation(const ReconciliationProblem &problem, std::span<const FeatureChange> changes);

/// Consistent changes after which the robot plan is optimal at its robot cost.
bool is_complete(const ReconciliationProblem &problem, std::span<const FeatureChange> changes);

/// Complete, and stays complete whatever further consistent changes are made.
/// Throws ResourceLimit when more than `max_supersets` would be checked.
bool is_monotonic(const ReconciliationProblem &problem, std::span<const FeatureChange> changes,
                  std::size_t max_supersets = 4096);

/// Read-only view of a search node handed to observers.
struct NodeView {
    std::span<const FeatureChange> applied;
    const Model &model;
    const ModelSolution &solution;
    Rational g;
    Rational h;
    std::size_t remaining;
};

struct SearchObserver {
    std::function<void(const NodeView &)> on_expand;
    std::function<void(const NodeView &parent, const NodeView &child, Cost rho)> on_edge;
};

struct SearchOptions {
    MetricKind metric = MetricKind::cost_gap_squared;
    HeuristicVariant variant = HeuristicVariant::safe;
    Rational epsilon{1, 1000};
    std::uint64_t node_budget = 200'000; // model-space expansions
    bool compare_by_schema = false;      // edit distance over schema names
    const SearchObserver *observer = nullptr;
};

struct TraceStep {
    std::size_t step = 0;
    std::optional<FeatureChange> change; // none for step 0
    std::string model_digest;
    bool solvable = false;
    Cost cost_star = 0;
    std::vector<std::string> plan;
    Cost rho = 0;
    SearchStatistics planner;
};

struct ExplanationTrace {
    std::string mode; // peg, concise or given
    MetricKind metric = MetricKind::cost_gap_squared;
    HeuristicVariant variant = HeuristicVariant::safe;
    Rational epsilon{0};
    std::vector<FeatureChange> changes;
    std::vector<TraceStep> steps; // steps.size() == changes.size() + 1
    Cost sum_rho = 0;
    bool complete = false;
    SearchStatistics search;
};

/// Minimum-cardinality complete explanation. Sets are tried by size, then in
/// lexicographic order of their change renderings.
ExplanationTrace generate_concise(const ReconciliationProblem &problem, const SearchOptions &options = {});

/// A* over sets of applied changes, edge weight rho + epsilon. Returns a
/// complete explanation ordering that minimises the summed rho plus epsilon
/// per change (exactly, for admissible heuristics).
ExplanationTrace generate_progressive(const ReconciliationProblem &problem, const SearchOptions &options = {});

/// Applies `changes` in order and records every intermediate model.
ExplanationTrace replay(const ReconciliationProblem &problem, std::span<const FeatureChange> changes,
                        const SearchOptions &options = {});

/// Sum of rho for another metric, from the plans and costs stored in the trace.
Cost trace_sum_rho(const ExplanationTrace &trace, MetricKind metric);

/// First 16 hex digits of the SHA-256 of the model's feature dump.
std::string model_digest(const Model &model);

} // namespace peg

#endif
