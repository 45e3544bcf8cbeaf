#include "peg/bench.hpp"

#include "peg/digest.hpp"
#include "peg/pddl.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace peg {

std::vector<Feature> perturbation_pool(const Model &model, const std::set<FeatureKind> &eligible) {
    std::vector<Feature> out;
    for (const auto &f : gamma(model))
        if (eligible.count(f.kind()))
            out.push_back(f);
    return out;
}

std::vector<Feature> removed_features(const Model &model, const PerturbSpec &spec) {
    if (!(spec.missing_probability >= 0.0 && spec.missing_probability <= 1.0))
        throw UnsupportedInput("missing probability must lie in [0, 1]");
    if (spec.eligible.empty())
        throw UnsupportedInput("no feature kind is eligible for perturbation");
    if (spec.eligible.count(FeatureKind::cost))
        throw UnsupportedInput("cost features cannot be removed");
    std::mt19937_64 rng(spec.seed);
    std::vector<Feature> out;
    for (auto &f : perturbation_pool(model, spec.eligible)) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < spec.missing_probability)
            out.push_back(std::move(f));
    }
    return out;
}

Model perturb_model(const Model &model, const PerturbSpec &spec) {
    Model out = model;
    for (const auto &f : removed_features(model, spec))
        out = apply_change(out, {ChangeDirection::remove, f});
    return out;
}

BenchTask BenchTask::from_pddl(std::string_view domain_text, std::string_view problem_text,
                               Granularity granularity, PlannerOptions planner) {
    auto domain = pddl::parse_domain(domain_text);
    auto problem = pddl::parse_problem(problem_text);
    BenchTask task;
    task.domain_digest = sha256_hex(domain_text);
    task.problem_digest = sha256_hex(problem_text);
    if (granularity == Granularity::ground) {
        task.robot = pddl::ground(domain, problem);
        task.backend = std::make_shared<GroundBackend>(planner);
    } else {
        task.robot = pddl::lift(domain, problem);
        task.backend = std::make_shared<pddl::SchemaBackend>(std::move(domain), std::move(problem), planner);
    }
    return task;
}

namespace {

ModeResult summarize(const ExplanationTrace &trace) {
    return {trace.changes.size(), trace.search.wall_seconds, trace.sum_rho, trace.search.expansions};
}

} // namespace

RunRecord run_once(const BenchTask &task, double p, std::uint64_t seed, std::size_t run_index,
                   const BenchOptions &options) {
    RunRecord record;
    record.run_index = run_index;
    record.missing_probability = p;
    record.seed = seed;
    PerturbSpec spec{p, seed, options.eligible};
    auto removed = removed_features(task.robot, spec);
    record.pool_size = perturbation_pool(task.robot, options.eligible).size();
    record.missing_features = removed.size();
    Model human = task.robot;
    for (const auto &f : removed)
        human = apply_change(human, {ChangeDirection::remove, f});

    SearchOptions search;
    search.metric = options.metric;
    search.variant = options.variant;
    search.epsilon = options.epsilon;
    search.node_budget = options.search_budget;
    try {
        ReconciliationProblem problem(task.robot, std::move(human), task.backend);
        auto peg = generate_progressive(problem, search);
        record.human_solvable = peg.steps.front().solvable;
        record.peg = summarize(peg);
        if (options.run_concise)
            record.concise = summarize(generate_concise(problem, search));
    } catch (const ResourceLimit &e) {
        record.flagged = true;
        record.note = e.what();
    }
    return record;
}

Averages average(const std::vector<RunRecord> &records) {
    Averages a;
    std::size_t peg_runs = 0, concise_runs = 0;
    for (const auto &r : records) {
        if (r.flagged)
            continue;
        ++a.runs;
        a.missing_features += static_cast<double>(r.missing_features);
        if (r.peg) {
            ++peg_runs;
            a.peg_size += static_cast<double>(r.peg->size);
            a.peg_time_s += r.peg->time_s;
            a.peg_sum_rho += static_cast<double>(r.peg->sum_rho);
            a.peg_expansions += static_cast<double>(r.peg->expansions);
        }
        if (r.concise) {
            ++concise_runs;
            a.concise_size += static_cast<double>(r.concise->size);
            a.concise_time_s += r.concise->time_s;
            a.concise_sum_rho += static_cast<double>(r.concise->sum_rho);
            a.concise_expansions += static_cast<double>(r.concise->expansions);
        }
    }
    auto scale = [](double &v, std::size_t n) { v = n ? v / static_cast<double>(n) : 0.0; };
    scale(a.missing_features, a.runs);
    for (double *v : {&a.peg_size, &a.peg_time_s, &a.peg_sum_rho, &a.peg_expansions})
        scale(*v, peg_runs);
    for (double *v : {&a.concise_size, &a.concise_time_s, &a.concise_sum_rho, &a.concise_expansions})
        scale(*v, concise_runs);
    return a;
}

namespace {

ReportConfig make_config(const BenchTask &task, std::string kind, std::uint64_t seed, const BenchOptions &options) {
    ReportConfig c;
    c.kind = std::move(kind);
    c.domain_digest = task.domain_digest;
    c.problem_digest = task.problem_digest;
    c.seed = seed;
    c.metric = options.metric;
    c.variant = options.variant;
    c.epsilon = options.epsilon;
    c.pool_size = perturbation_pool(task.robot, options.eligible).size();
    return c;
}

} // namespace

Report run_comparison(const BenchTask &task, double p, std::uint64_t seed, std::size_t runs,
                      const BenchOptions &options) {
    Report report;
    report.config = make_config(task, "comparison", seed, options);
    report.config.missing_probabilities = {p};
    report.config.runs = runs;
    for (std::size_t i = 0; i < runs; ++i)
        report.records.push_back(run_once(task, p, seed + i, i, options));
    report.averages = average(report.records);
    return report;
}

std::vector<double> sweep_grid(double p_lo, double p_hi, double step) {
    if (!(p_lo >= 0.0 && p_lo <= p_hi && p_hi <= 1.0))
        throw UnsupportedInput("sweep range must satisfy 0 <= p_min <= p_max <= 1");
    if (p_hi > p_lo && !(step > 0.0))
        throw UnsupportedInput("sweep step must be positive");
    std::size_t count = p_hi > p_lo ? static_cast<std::size_t>(std::floor((p_hi - p_lo) / step + 1e-9)) + 1 : 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(std::round((p_lo + static_cast<double>(i) * step) * 1e9) / 1e9);
    return out;
}

Report sweep_missing_prob(const BenchTask &task, double p_lo, double p_hi, double step, std::uint64_t seed,
                          BenchOptions options) {
    Report report;
    report.config = make_config(task, "sweep", seed, options);
    report.config.missing_probabilities = sweep_grid(p_lo, p_hi, step);
    report.config.runs = report.config.missing_probabilities.size();
    std::size_t i = 0;
    for (double p : report.config.missing_probabilities)
        report.records.push_back(run_once(task, p, seed, i++, options));
    report.averages = average(report.records);
    return report;
}

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string num(double v) {
    std::ostringstream out;
    out << std::setprecision(6) << v;
    return out.str();
}

} // namespace

std::string report_to_csv(const Report &report) {
    std::ostringstream out;
    out << "run_index,missing_probability,seed,missing_features,pool_size,human_solvable,"
           "peg_size,peg_time_s,peg_sum_rho,peg_expansions,"
           "concise_size,concise_time_s,concise_sum_rho,concise_expansions,flagged,note\r\n";
    auto mode = [&](const std::optional<ModeResult> &m) {
        if (!m) {
            out << ",,,,";
            return;
        }
        out << m->size << ',' << num(m->time_s) << ',' << m->sum_rho << ',' << m->expansions << ',';
    };
    for (const auto &r : report.records) {
        out << r.run_index << ',' << num(r.missing_probability) << ',' << r.seed << ',' << r.missing_features << ','
            << r.pool_size << ',' << (r.human_solvable ? 1 : 0) << ',';
        mode(r.peg);
        mode(r.concise);
        out << (r.flagged ? 1 : 0) << ',' << csv_field(r.note) << "\r\n";
    }
    const auto &a = report.averages;
    out << "average,,," << num(a.missing_features) << ',' << report.config.pool_size << ",,"
        << num(a.peg_size) << ',' << num(a.peg_time_s) << ',' << num(a.peg_sum_rho) << ','
        << num(a.peg_expansions) << ',' << num(a.concise_size) << ',' << num(a.concise_time_s) << ','
        << num(a.concise_sum_rho) << ',' << num(a.concise_expansions) << ",,"
        << csv_field(std::to_string(a.runs) + " unflagged run(s)") << "\r\n";
    return out.str();
}

std::string report_to_json(const Report &report) {
    using nlohmann::json;
    const auto &c = report.config;
    json out;
    out["config"] = {{"kind", c.kind},
                     {"domain_digest", c.domain_digest},
                     {"problem_digest", c.problem_digest},
                     {"missing_probabilities", c.missing_probabilities},
                     {"seed", c.seed},
                     {"runs", c.runs},
                     {"metric", std::string(to_string(c.metric))},
                     {"variant", std::string(to_string(c.variant))},
                     {"epsilon", to_string(c.epsilon)},
                     {"pool_size", c.pool_size}};
    auto mode = [](const std::optional<ModeResult> &m) -> json {
        if (!m)
            return nullptr;
        return {{"size", m->size}, {"time_s", m->time_s}, {"sum_rho", m->sum_rho}, {"expansions", m->expansions}};
    };
    json records = json::array();
    for (const auto &r : report.records)
        records.push_back({{"run_index", r.run_index},
                           {"missing_probability", r.missing_probability},
                           {"seed", r.seed},
                           {"missing_features", r.missing_features},
                           {"pool_size", r.pool_size},
                           {"human_solvable", r.human_solvable},
                           {"peg", mode(r.peg)},
                           {"concise", mode(r.concise)},
                           {"flagged", r.flagged},
                           {"note", r.note}});
    out["records"] = records;
    const auto &a = report.averages;
    out["averages"] = {{"runs", a.runs},
                       {"missing_features", a.missing_features},
                       {"peg_size", a.peg_size},
                       {"peg_time_s", a.peg_time_s},
                       {"peg_sum_rho", a.peg_sum_rho},
                       {"peg_expansions", a.peg_expansions},
                       {"concise_size", a.concise_size},
                       {"concise_time_s", a.concise_time_s},
                       {"concise_sum_rho", a.concise_sum_rho},
                       {"concise_expansions", a.concise_expansions}};
    return out.dump(2) + "\n";
}

std::string report_to_text(const Report &report) {
    std::ostringstream out;
    out << report.config.kind << " report, metric " << to_string(report.config.metric) << " ("
        << to_string(report.config.variant) << "), pool " << report.config.pool_size << " features\n";
    out << std::left << std::setw(5) << "run" << std::setw(8) << "p" << std::setw(9) << "missing" << std::setw(22)
        << "peg size/rho/exp" << "concise size/rho/exp\n";
    auto mode = [](const std::optional<ModeResult> &m) {
        if (!m)
            return std::string("-");
        return std::to_string(m->size) + "/" + std::to_string(m->sum_rho) + "/" + std::to_string(m->expansions);
    };
    for (const auto &r : report.records) {
        out << std::setw(5) << r.run_index << std::setw(8) << num(r.missing_probability) << std::setw(9)
            << r.missing_features << std::setw(22) << mode(r.peg) << mode(r.concise)
            << (r.flagged ? "  [flagged: " + r.note + "]" : std::string()) << '\n';
    }
    const auto &a = report.averages;
    out << "average over " << a.runs << " run(s): missing " << num(a.missing_features) << ", peg size "
        << num(a.peg_size) << " rho " << num(a.peg_sum_rho) << ", concise size " << num(a.concise_size) << " rho "
        << num(a.concise_sum_rho) << '\n';
    return out.str();
}

} // namespace peg
