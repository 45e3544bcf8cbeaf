// peg: plan, explain, validate and benchmark plan explanations.

#include "peg/bench.hpp"
#include "peg/explain.hpp"
#include "peg/fixture.hpp"
#include "peg/metrics.hpp"
#include "peg/pddl.hpp"
#include "peg/planner.hpp"
#include "peg/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace peg;

// Usage problems (missing files, bad flag combinations) exit with status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write '" + path + "'");
    out << text;
}

struct Config {
    std::string robot_domain, robot_problem, human_domain, human_problem, fixture, plan_file;
    std::string model_name = "robot";
    std::string mode = "peg";
    std::string metric = "p2";
    std::string variant = "safe";
    std::string epsilon = "1/1000";
    std::string granularity;
    std::string format;
    std::string out;
    std::uint64_t node_budget = 0;
    double missing_prob = 0.1;
    std::size_t runs = 10;
    std::uint64_t seed = 42;
    double p_min = 0.06, p_max = 0.14, p_step = 0.01;
    bool with_concise = false;
    std::string changes_file;
};

std::uint64_t default_budget() {
    if (const char *env = std::getenv("PEG_NODE_BUDGET")) {
        try {
            std::size_t used = 0;
            auto value = std::stoull(env, &used);
            if (used == std::string(env).size() && value > 0)
                return value;
        } catch (const std::exception &) {
        }
        throw UsageError("PEG_NODE_BUDGET must be a positive integer");
    }
    return 0;
}

PlannerOptions planner_options(const Config &c) {
    PlannerOptions o;
    if (c.node_budget)
        o.node_budget = c.node_budget;
    return o;
}

SearchOptions search_options(const Config &c) {
    SearchOptions o;
    o.metric = parse_metric(c.metric);
    o.variant = parse_variant(c.variant);
    try {
        o.epsilon = parse_rational(c.epsilon);
    } catch (const UnsupportedInput &e) {
        throw UsageError(std::string("--epsilon: ") + e.what());
    }
    if (o.epsilon < Rational(0))
        throw UsageError("--epsilon must be nonnegative");
    if (c.node_budget)
        o.node_budget = c.node_budget;
    return o;
}

struct Inputs {
    Model robot;
    Model human;
    std::shared_ptr<const PlanningBackend> backend;
};

const Model &named(const std::map<std::string, Model> &models, const std::string &name) {
    auto it = models.find(name);
    if (it == models.end())
        throw UnsupportedInput("fixture has no model named '" + name + "'");
    return it->second;
}

Inputs load_pair(const Config &c) {
    bool pddl = !c.robot_domain.empty() || !c.robot_problem.empty();
    if (pddl == !c.fixture.empty())
        throw UsageError("give either --fixture or --robot-domain/--robot-problem");
    Inputs in;
    if (!c.fixture.empty()) {
        auto models = load_fixture(read_file(c.fixture));
        in.robot = named(models, "robot");
        in.human = named(models, "human");
        in.backend = std::make_shared<GroundBackend>(planner_options(c));
        return in;
    }
    if (c.robot_domain.empty() || c.robot_problem.empty())
        throw UsageError("--robot-domain and --robot-problem are both required");
    auto rd_text = read_file(c.robot_domain);
    auto rp_text = read_file(c.robot_problem);
    auto hd_text = c.human_domain.empty() ? rd_text : read_file(c.human_domain);
    auto hp_text = c.human_problem.empty() ? rp_text : read_file(c.human_problem);
    auto rd = pddl::parse_domain(rd_text);
    auto rp = pddl::parse_problem(rp_text);
    auto hd = pddl::parse_domain(hd_text);
    auto hp = pddl::parse_problem(hp_text);
    if (c.granularity == "schema") {
        in.robot = pddl::lift(rd, rp);
        in.human = pddl::lift(hd, hp);
        in.backend = std::make_shared<pddl::SchemaBackend>(rd, rp, planner_options(c));
    } else {
        std::tie(in.robot, in.human) = pddl::ground_pair(rd, rp, hd, hp);
        in.backend = std::make_shared<GroundBackend>(planner_options(c));
    }
    return in;
}

ReconciliationProblem make_problem(const Config &c) {
    auto in = load_pair(c);
    std::optional<std::vector<std::string>> plan;
    if (!c.plan_file.empty())
        plan = parse_plan(read_file(c.plan_file));
    return ReconciliationProblem(std::move(in.robot), std::move(in.human), in.backend, std::move(plan));
}

int cmd_plan(const Config &c) {
    Model model;
    bool pddl = !c.robot_domain.empty() || !c.robot_problem.empty();
    if (pddl == !c.fixture.empty())
        throw UsageError("give either --fixture or --robot-domain/--robot-problem");
    if (pddl) {
        if (c.robot_domain.empty() || c.robot_problem.empty())
            throw UsageError("--robot-domain and --robot-problem are both required");
        model = pddl::ground(pddl::parse_domain(read_file(c.robot_domain)),
                             pddl::parse_problem(read_file(c.robot_problem)));
    } else {
        model = named(load_fixture(read_file(c.fixture)), c.model_name);
    }
    auto result = optimal_plan(model, planner_options(c));
    const auto &stats = result.stats;
    if (c.format == "json") {
        nlohmann::json out;
        out["solvable"] = result.solved();
        out["cost"] = result.solved() ? nlohmann::json(result.plan->cost) : nlohmann::json(nullptr);
        out["plan"] = result.solved() ? result.plan->actions : std::vector<std::string>{};
        out["expansions"] = stats.expansions;
        out["generated"] = stats.generated;
        out["time_s"] = stats.wall_seconds;
        write_output(c.out, out.dump(2) + "\n");
    } else if (result.solved()) {
        write_output(c.out, format_plan(*result.plan, model));
    }
    std::cerr << "expansions " << stats.expansions << "\ngenerated " << stats.generated << "\ntime_s "
              << stats.wall_seconds << '\n';
    if (!result.solved()) {
        std::cerr << "peg: the task is unsolvable\n";
        return 1;
    }
    return 0;
}

int cmd_explain(const Config &c) {
    auto problem = make_problem(c);
    auto options = search_options(c);
    ExplanationTrace trace;
    if (c.mode == "peg")
        trace = generate_progressive(problem, options);
    else
        trace = generate_concise(problem, options);
    if (c.format == "csv")
        write_output(c.out, trace_to_csv(trace));
    else if (c.format == "text")
        write_output(c.out, trace_to_text(trace));
    else
        write_output(c.out, trace_to_json(trace));
    return trace.complete ? 0 : 1;
}

int cmd_validate(const Config &c) {
    auto problem = make_problem(c);
    auto changes = parse_changes(read_file(c.changes_file));
    bool consistent = consistent_with_robot(problem, changes);
    bool explanation = is_explanation(problem, changes);
    bool complete = is_complete(problem, changes);
    if (c.format == "json") {
        nlohmann::json out;
        out["changes"] = changes.size();
        out["consistent"] = consistent;
        out["explanation"] = explanation;
        out["complete"] = complete;
        write_output(c.out, out.dump(2) + "\n");
    } else {
        std::ostringstream out;
        out << "changes: " << changes.size() << "\nconsistent: " << (consistent ? "yes" : "no")
            << "\nexplanation: " << (explanation ? "yes" : "no") << "\ncomplete: " << (complete ? "yes" : "no")
            << '\n';
        write_output(c.out, out.str());
    }
    return complete ? 0 : 1;
}

BenchTask bench_task(const Config &c) {
    if (c.robot_domain.empty() || c.robot_problem.empty())
        throw UsageError("--domain and --problem are required");
    auto granularity = c.granularity == "ground" ? Granularity::ground : Granularity::schema;
    return BenchTask::from_pddl(read_file(c.robot_domain), read_file(c.robot_problem), granularity,
                                planner_options(c));
}

BenchOptions bench_options(const Config &c) {
    auto search = search_options(c);
    BenchOptions o;
    o.metric = search.metric;
    o.variant = search.variant;
    o.epsilon = search.epsilon;
    o.search_budget = search.node_budget;
    return o;
}

void write_report(const Config &c, const Report &report) {
    if (c.format == "json")
        write_output(c.out, report_to_json(report));
    else if (c.format == "text")
        write_output(c.out, report_to_text(report));
    else
        write_output(c.out, report_to_csv(report));
}

int cmd_bench(const Config &c) {
    if (!(c.missing_prob >= 0.0 && c.missing_prob <= 1.0))
        throw UsageError("--missing-prob must lie in [0, 1]");
    write_report(c, run_comparison(bench_task(c), c.missing_prob, c.seed, c.runs, bench_options(c)));
    return 0;
}

int cmd_sweep(const Config &c) {
    auto options = bench_options(c);
    options.run_concise = c.with_concise;
    Report report;
    try {
        sweep_grid(c.p_min, c.p_max, c.p_step);
    } catch (const UnsupportedInput &e) {
        throw UsageError(e.what());
    }
    write_report(c, sweep_missing_prob(bench_task(c), c.p_min, c.p_max, c.p_step, c.seed, options));
    return 0;
}

void model_flags(CLI::App *cmd, Config &c, bool human) {
    cmd->add_option("--robot-domain", c.robot_domain, "robot PDDL domain");
    cmd->add_option("--robot-problem", c.robot_problem, "robot PDDL problem");
    if (human) {
        cmd->add_option("--human-domain", c.human_domain, "human PDDL domain (default: the robot's)");
        cmd->add_option("--human-problem", c.human_problem, "human PDDL problem (default: the robot's)");
        cmd->add_option("--plan", c.plan_file, "robot plan to explain (default: the robot's optimum)");
        cmd->add_option("--granularity", c.granularity, "features of grounded actions or of schemas")
            ->check(CLI::IsMember({"ground", "schema"}))
            ->default_str("ground");
    }
    cmd->add_option("--fixture", c.fixture, "native fixture file");
}

void search_flags(CLI::App *cmd, Config &c) {
    cmd->add_option("--metric", c.metric, "p1, p2, p3 or p4")->check(CLI::IsMember({"p1", "p2", "p3", "p4"}));
    cmd->add_option("--variant", c.variant, "heuristic variant")->check(CLI::IsMember({"paper", "safe"}));
    cmd->add_option("--epsilon", c.epsilon, "per-change cost, decimal or fraction");
}

// Subcommands share one Config, so each default format is applied after
// parsing, for the subcommand that actually ran.
void common_flags(CLI::App *cmd, Config &c, std::vector<std::string> formats, std::string default_format) {
    cmd->callback([&c, default_format] {
        if (c.format.empty())
            c.format = default_format;
    });
    cmd->add_option("--node-budget", c.node_budget, "search node budget (env PEG_NODE_BUDGET)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "output file (default: stdout)");
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember(formats))
        ->default_str(default_format);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Progressive explanations for plan-model reconciliation"};
    app.require_subcommand(1);
    Config c;

    auto *plan = app.add_subcommand("plan", "optimal plan of one model");
    model_flags(plan, c, false);
    plan->add_option("--model", c.model_name, "fixture model name")->default_str("robot");
    common_flags(plan, c, {"text", "json"}, "text");

    auto *explain = app.add_subcommand("explain", "concise or progressive explanation");
    model_flags(explain, c, true);
    explain->add_option("--mode", c.mode, "concise or peg")->check(CLI::IsMember({"concise", "peg"}));
    search_flags(explain, c);
    common_flags(explain, c, {"json", "csv", "text"}, "json");

    auto *validate = app.add_subcommand("validate", "check a change list against the explanation conditions");
    model_flags(validate, c, true);
    validate->add_option("changes", c.changes_file, "JSON trace or one change per line")->required();
    common_flags(validate, c, {"text", "json"}, "text");

    auto add_bench_flags = [&](CLI::App *cmd) {
        cmd->add_option("--domain,--robot-domain", c.robot_domain, "PDDL domain");
        cmd->add_option("--problem,--robot-problem", c.robot_problem, "PDDL problem");
        cmd->add_option("--seed", c.seed, "base seed");
        cmd->add_option("--granularity", c.granularity, "features of grounded actions or of schemas")
            ->check(CLI::IsMember({"ground", "schema"}))
            ->default_str("schema");
        search_flags(cmd, c);
        common_flags(cmd, c, {"csv", "json", "text"}, "csv");
    };
    auto *bench = app.add_subcommand("bench", "progressive vs concise on perturbed models");
    add_bench_flags(bench);
    bench->add_option("--missing-prob", c.missing_prob, "per-feature removal probability");
    bench->add_option("--runs", c.runs, "number of runs");

    auto *sweep = app.add_subcommand("sweep", "progressive search across missing probabilities");
    add_bench_flags(sweep);
    sweep->add_option("--p-min", c.p_min, "first probability");
    sweep->add_option("--p-max", c.p_max, "last probability");
    sweep->add_option("--p-step", c.p_step, "probability step");
    sweep->add_flag("--with-concise", c.with_concise, "also run the concise search");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!c.node_budget)
            c.node_budget = default_budget();
        if (*plan)
            return cmd_plan(c);
        if (*explain)
            return cmd_explain(c);
        if (*validate)
            return cmd_validate(c);
        if (*bench)
            return cmd_bench(c);
        return cmd_sweep(c);
    } catch (const UsageError &e) {
        std::cerr << "peg: " << e.what() << '\n';
        return 2;
    } catch (const pddl::ParseError &e) {
        std::cerr << "peg: parse error at " << e.what() << '\n';
        return 1;
    } catch (const Error &e) {
        std::cerr << "peg: " << e.what() << '\n';
        return 1;
    }
}
