#ifndef PEG_FIXTURE_HPP
#define PEG_FIXTURE_HPP

#include "peg/strips_model.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace peg {

/// An action whose cost drops to `cheap_cost` when `cheap_condition` holds.
struct ConditionalAction {
    GroundAction action;
    std::optional<Cost> cheap_cost;
    FactSet cheap_condition;
};

struct ConditionalModel {
    FactSet facts;
    std::vector<ConditionalAction> actions;
    FactSet init;
    FactSet goal;
};

/// Each conditional action becomes `<name>` with the base cost and
/// `<name>-cheap` with the condition added to its preconditions. Throws
/// UnsupportedInput when a variant name collides with another action.
Model split_conditional_costs(const ConditionalModel &model);

/// Parses the line-oriented fixture format:
///
///     action NAME COST [(CHEAP)]
///     pre: f1 f2 (cond1 cond2)
///     eff+: f3
///     eff-: f4
///     init: f1
///     goal: f3
///     facts: f5
///     model NAME
///
/// Lines before the first `model` are shared by every model; a `model` block
/// adds to them and may redefine an action by name. Names are lowercased.
/// `#` and `;` start comments. Errors are pddl::ParseError.
std::map<std::string, ConditionalModel> parse_fixture(std::string_view text);

/// parse_fixture followed by split_conditional_costs on every model.
std::map<std::string, Model> load_fixture(std::string_view text);

} // namespace peg

#endif
