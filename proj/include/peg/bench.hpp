#ifndef PEG_BENCH_HPP
#define PEG_BENCH_HPP

#include "peg/explain.hpp"
#include "peg/metrics.hpp"
#include "peg/planner.hpp"
#include "peg/strips_model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace peg {

struct PerturbSpec {
    double missing_probability = 0.1;
    std::uint64_t seed = 0;
    std::set<FeatureKind> eligible{FeatureKind::precondition, FeatureKind::add_effect, FeatureKind::delete_effect};
};

/// Features of `model` whose kind is eligible, in feature order.
std::vector<Feature> perturbation_pool(const Model &model, const std::set<FeatureKind> &eligible);

/// The pool features that a perturbation removes. Generator: std::mt19937_64
/// seeded with spec.seed; for each pool feature in order, u = (next() >> 11) * 2^-53
/// and the feature is removed iff u < p.
std::vector<Feature> removed_features(const Model &model, const PerturbSpec &spec);

/// The model with removed_features(model, spec) deleted. Throws UnsupportedInput
/// when p is outside [0, 1] or no kind is eligible.
Model perturb_model(const Model &model, const PerturbSpec &spec);

enum class Granularity { ground, schema };

/// The robot model used by a benchmark together with its planning backend.
struct BenchTask {
    Model robot;
    std::shared_ptr<const PlanningBackend> backend;
    std::string domain_digest;
    std::string problem_digest;

    /// ground: features of the grounded task. schema: features of the action
    /// schemas, planned by lowering and grounding each model.
    static BenchTask from_pddl(std::string_view domain_text, std::string_view problem_text,
                               Granularity granularity, PlannerOptions planner = {});
};

struct BenchOptions {
    MetricKind metric = MetricKind::cost_gap_squared;
    HeuristicVariant variant = HeuristicVariant::safe;
    Rational epsilon{1, 1000};
    std::uint64_t search_budget = 200'000;
    std::set<FeatureKind> eligible{FeatureKind::precondition, FeatureKind::add_effect, FeatureKind::delete_effect};
    bool run_concise = true;
};

struct ModeResult {
    std::size_t size = 0;
    double time_s = 0.0;
    Cost sum_rho = 0;
    std::uint64_t expansions = 0;
};

struct RunRecord {
    std::size_t run_index = 0;
    double missing_probability = 0.0;
    std::uint64_t seed = 0;
    std::size_t missing_features = 0;
    std::size_t pool_size = 0;
    bool human_solvable = true;
    std::optional<ModeResult> peg;
    std::optional<ModeResult> concise;
    bool flagged = false; // a budget ran out; excluded from averages
    std::string note;
};

struct Averages {
    std::size_t runs = 0; // unflagged runs averaged
    double missing_features = 0.0;
    double peg_size = 0.0;
    double peg_time_s = 0.0;
    double peg_sum_rho = 0.0;
    double peg_expansions = 0.0;
    double concise_size = 0.0;
    double concise_time_s = 0.0;
    double concise_sum_rho = 0.0;
    double concise_expansions = 0.0;
};

struct ReportConfig {
    std::string kind; // comparison or sweep
    std::string domain_digest;
    std::string problem_digest;
    std::vector<double> missing_probabilities;
    std::uint64_t seed = 0;
    std::size_t runs = 0;
    MetricKind metric = MetricKind::cost_gap_squared;
    HeuristicVariant variant = HeuristicVariant::safe;
    Rational epsilon{1, 1000};
    std::size_t pool_size = 0;
};

struct Report {
    ReportConfig config;
    std::vector<RunRecord> records;
    Averages averages;
};

/// Recomputes the averages over the unflagged records.
Averages average(const std::vector<RunRecord> &records);

/// One perturb-and-explain run; run `i` of a comparison uses seed + i.
RunRecord run_once(const BenchTask &task, double p, std::uint64_t seed, std::size_t run_index,
                   const BenchOptions &options);

/// `runs` perturbations at probability p, explained by both modes.
Report run_comparison(const BenchTask &task, double p, std::uint64_t seed, std::size_t runs,
                      const BenchOptions &options = {});

/// p_lo, p_lo + step, ..., p_hi; every p uses the same seed, so the removed
/// feature sets are nested. Progressive mode only unless options.run_concise.
Report sweep_missing_prob(const BenchTask &task, double p_lo, double p_hi, double step, std::uint64_t seed,
                          BenchOptions options);

/// The probability grid used by sweep_missing_prob.
std::vector<double> sweep_grid(double p_lo, double p_hi, double step);

/// RFC 4180 CSV: one row per record, then an averages row.
std::string report_to_csv(const Report &report);
std::string report_to_json(const Report &report);
std::string report_to_text(const Report &report);

} // namespace peg

#endif
