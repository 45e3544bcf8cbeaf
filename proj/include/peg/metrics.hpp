#ifndef PEG_METRICS_HPP
#define PEG_METRICS_HPP

#include "peg/strips_model.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace peg {

/// Exact arithmetic for search values; the 0.5 and 1/k heuristic factors and
/// epsilon never produce float ties.
using Rational = boost::rational<std::int64_t>;

enum class MetricKind {
    cost_gap,              // p1
    cost_gap_squared,      // p2
    edit_distance,         // p3
    edit_distance_squared, // p4
};

/// paper: half the squared gap for the squared kinds; can overestimate.
/// safe: squared kinds divide by the number of changes still available.
enum class HeuristicVariant { paper, safe };

std::string_view to_string(MetricKind kind);
std::string_view to_string(HeuristicVariant variant);
/// Accepts p1..p4; throws UnsupportedInput.
MetricKind parse_metric(std::string_view text);
/// Accepts paper/safe; throws UnsupportedInput.
HeuristicVariant parse_variant(std::string_view text);

/// Unit-cost Levenshtein distance over action names.
std::size_t plan_edit_distance(std::span<const std::string> a, std::span<const std::string> b);

/// A model's optimal cost together with the plan used to compare against it.
struct PlanPoint {
    Cost cost = 0;
    std::span<const std::string> plan;
};

struct StepContext {
    PlanPoint previous;
    PlanPoint current;
};

/// Effort of one explanation step. Always a nonnegative integer.
Cost rho(MetricKind kind, const StepContext &step);

/// Lower bound on the remaining sum of rho from `node` to a complete
/// explanation whose final cost and plan are `target`. `remaining` is the
/// number of changes that may still be applied; the safe squared kinds use
/// gap^2/remaining, which Cauchy-Schwarz makes admissible and consistent.
Rational heuristic(MetricKind kind, HeuristicVariant variant, const PlanPoint &node, const PlanPoint &target,
                   std::size_t remaining);

double to_double(const Rational &value);

/// Parses `0.001`, `1/1000`, `1e-3` style input into an exact rational.
/// Throws UnsupportedInput for negative or malformed values.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational &value); // "n/d" or "n"

} // namespace peg

#endif
