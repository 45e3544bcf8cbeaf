#ifndef PEG_PLANNER_HPP
#define PEG_PLANNER_HPP

#include "peg/strips_model.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace peg {

struct Plan {
    std::vector<std::string> actions;
    Cost cost = 0;

    friend bool operator==(const Plan &, const Plan &) = default;
};

struct SearchStatistics {
    std::uint64_t expansions = 0;
    std::uint64_t generated = 0;
    double wall_seconds = 0.0;
};

struct PlanResult {
    std::optional<Plan> plan; // empty when the task is unsolvable
    SearchStatistics stats;

    bool solved() const { return plan.has_value(); }
};

struct PlannerOptions {
    std::uint64_t node_budget = 2'000'000;
};

/// Packed fact set over a task's fact indices.
class StateBits {
public:
    StateBits() = default;
    explicit StateBits(std::size_t num_facts) : words_((num_facts + 63) / 64, 0) {}

    bool test(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::uint32_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::uint32_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    friend bool operator==(const StateBits &, const StateBits &) = default;

    std::size_t hash() const;

private:
    std::vector<std::uint64_t> words_;
};

struct StateBitsHash {
    std::size_t operator()(const StateBits &s) const { return s.hash(); }
};

/// Index-based view of a Model used by the search. Actions are ordered by name.
class Task {
public:
    struct Operator {
        std::vector<std::uint32_t> pre;
        std::vector<std::uint32_t> add;
        std::vector<std::uint32_t> del;
        Cost cost = 0;
        std::string name;
    };

    explicit Task(const Model &model);

    std::size_t num_facts() const { return fact_names_.size(); }
    const std::vector<Operator> &operators() const { return operators_; }
    const std::vector<std::uint32_t> &goal() const { return goal_; }
    const std::string &fact_name(std::uint32_t i) const { return fact_names_[i]; }

    StateBits initial_state() const;
    StateBits make_state(const FactSet &facts) const;
    bool applicable(const StateBits &state, const Operator &op) const;
    StateBits successor(const StateBits &state, const Operator &op) const;
    bool is_goal(const StateBits &state) const;

private:
    std::vector<std::string> fact_names_;
    std::vector<Operator> operators_;
    std::vector<std::uint32_t> init_;
    std::vector<std::uint32_t> goal_;
};

/// h-max: cost of the most expensive goal fact under the max-propagated delete
/// relaxation. Returns nullopt when the goal is relaxed-unreachable.
class HMax {
public:
    explicit HMax(const Task &task);

    std::optional<Cost> operator()(const StateBits &state) const;

private:
    const Task &task_;
    std::vector<std::vector<std::uint32_t>> precondition_of_;
    std::vector<std::uint32_t> no_pre_ops_;
    mutable std::vector<Cost> fact_cost_;
    mutable std::vector<std::uint32_t> unsatisfied_;
};

/// A* with h-max. Ties on f prefer lower h, then the lexicographically smaller
/// action-name sequence. Throws ResourceLimit when the expansion budget runs out.
PlanResult optimal_plan(const Model &model, const PlannerOptions &options = {});

/// Cost of executing `plan` from init, or nullopt when a step is inapplicable or
/// the goal does not hold at the end. Throws UnknownAction.
std::optional<Cost> plan_cost(const std::vector<std::string> &plan, const Model &model);

struct PlanValidation {
    bool valid = false;
    std::optional<Cost> cost;
    std::optional<std::size_t> failing_step;
    std::string diagnostic;
};

PlanValidation validate_plan(const std::vector<std::string> &plan, const Model &model);

/// One `(schema arg1 arg2)` line per action and a trailing `; cost = N` line.
std::string format_plan(const Plan &plan, const Model &model);

/// Reads the plan text format; action names are recovered by joining tokens with '-'.
/// Comment lines (`;`) are ignored.
std::vector<std::string> parse_plan(std::string_view text);

/// How explanation search obtains optimal plans and plan costs for a model.
class PlanningBackend {
public:
    virtual ~PlanningBackend() = default;
    virtual PlanResult solve(const Model &model) const = 0;
    virtual std::optional<Cost> cost_of(const std::vector<std::string> &plan, const Model &model) const = 0;
    /// Maps an action name to the name used when comparing plans by schema.
    virtual std::string schema_of(const std::string &action, const Model &model) const;
};

/// Plans directly on the given grounded model.
class GroundBackend : public PlanningBackend {
public:
    explicit GroundBackend(PlannerOptions options = {}) : options_(options) {}

    PlanResult solve(const Model &model) const override;
    std::optional<Cost> cost_of(const std::vector<std::string> &plan, const Model &model) const override;

private:
    PlannerOptions options_;
};

} // namespace peg

#endif
