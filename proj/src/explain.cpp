#include "peg/explain.hpp"

#include "peg/digest.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace peg {

ReconciliationProblem::ReconciliationProblem(Model robot, Model human,
                                             std::shared_ptr<const PlanningBackend> backend,
                                             std::optional<std::vector<std::string>> robot_plan)
    : robot_(std::move(robot)), human_(std::move(human)), backend_(std::move(backend)) {
    if (!backend_)
        throw UnsupportedInput("no planning backend given");
    if (robot_.action_names() != human_.action_names())
        throw UnsupportedInput("robot and human models must have the same action names");
    auto result = backend_->solve(robot_);
    if (!result.solved())
        throw UnsupportedInput("the robot model is unsolvable");
    if (robot_plan) {
        auto cost = backend_->cost_of(*robot_plan, robot_);
        if (!cost)
            throw UnsupportedInput("the given plan is not valid in the robot model");
        if (*cost != result.plan->cost)
            throw UnsupportedInput("the given plan costs " + std::to_string(*cost) +
                                   " but the robot model's optimum is " + std::to_string(result.plan->cost));
        robot_plan_ = std::move(*robot_plan);
    } else {
        robot_plan_ = result.plan->actions;
    }
    robot_cost_ = result.plan->cost;
    changes_ = delta(human_, robot_);
    std::stable_sort(changes_.begin(), changes_.end(), [&](const FeatureChange &a, const FeatureChange &b) {
        bool ra = raises_cost(a, human_), rb = raises_cost(b, human_);
        if (ra != rb)
            return ra;
        return a.str() < b.str();
    });
}

ModelSolution ReconciliationProblem::solve(const Model &model) const {
    ModelSolution out;
    auto result = backend_->solve(model);
    out.planner = result.stats;
    out.robot_plan_cost = backend_->cost_of(robot_plan_, model);
    if (!result.solved())
        return out;
    out.solvable = true;
    out.cost_star = result.plan->cost;
    // Anchor on the robot plan whenever it is one of the optima, so the final
    // step's plan is the plan being explained.
    if (out.robot_plan_cost && *out.robot_plan_cost == out.cost_star)
        out.plan = robot_plan_;
    else
        out.plan = std::move(result.plan->actions);
    return out;
}

bool raises_cost(const FeatureChange &change, const Model &human) {
    bool add = change.direction == ChangeDirection::add;
    switch (change.feature.kind()) {
    case FeatureKind::init: return !add;
    case FeatureKind::goal: return add;
    case FeatureKind::precondition: return add;
    case FeatureKind::add_effect: return !add;
    case FeatureKind::delete_effect: return add;
    case FeatureKind::cost: {
        auto it = human.actions.find(change.feature.owner());
        return it != human.actions.end() && change.feature.cost_value() > it->second.cost;
    }
    }
    return false;
}

std::vector<FeatureChange> candidate_changes(const ReconciliationProblem &problem,
                                             std::span<const FeatureChange> applied, Cost current_cost) {
    std::set<std::string> done;
    for (const auto &c : applied)
        done.insert(c.str());
    std::vector<FeatureChange> out;
    for (const auto &c : problem.changes())
        if (!done.count(c.str()))
            out.push_back(c);
    if (current_cost > problem.robot_cost())
        std::sort(out.begin(), out.end());
    return out;
}

bool consistent_with_robot(const ReconciliationProblem &problem, std::span<const FeatureChange> changes) {
    std::set<std::string> allowed, seen;
    for (const auto &c : problem.changes())
        allowed.insert(c.str());
    for (const auto &c : changes) {
        auto s = c.str();
        if (!allowed.count(s) || !seen.insert(s).second)
            return false;
    }
    return true;
}

namespace {

// Cost of the robot plan minus the optimum; nullopt stands for an infeasible plan.
std::optional<Cost> gap(const ModelSolution &s) {
    if (!s.robot_plan_cost)
        return std::nullopt;
    return *s.robot_plan_cost - s.cost_star;
}

bool gap_less(std::optional<Cost> a, std::optional<Cost> b) {
    if (!a)
        return false;
    return !b || *a < *b;
}

Model apply_all(const Model &model, std::span<const FeatureChange> changes) {
    Model out = model;
    for (const auto &c : changes)
        out = apply_change(out, c);
    return out;
}

} // namespace

bool is_explanation(const ReconciliationProblem &problem, std::span<const FeatureChange> changes) {
    if (!consistent_with_robot(problem, changes))
        return false;
    auto updated = problem.solve(apply_all(problem.human(), changes));
    auto before = problem.solve(problem.human());
    return gap_less(gap(updated), gap(before));
}

bool is_complete(const ReconciliationProblem &problem, std::span<const FeatureChange> changes) {
    if (!consistent_with_robot(problem, changes))
        return false;
    return problem.solve(apply_all(problem.human(), changes)).reconciles(problem.robot_cost());
}

bool is_monotonic(const ReconciliationProblem &problem, std::span<const FeatureChange> changes,
                  std::size_t max_supersets) {
    if (!is_complete(problem, changes))
        return false;
    auto rest = candidate_changes(problem, changes, 0);
    if (rest.size() >= 63 || (std::uint64_t{1} << rest.size()) - 1 > max_supersets)
        throw ResourceLimit("monotonicity check needs " + std::to_string(rest.size()) +
                            " optional changes, too many supersets");
    Model base = apply_all(problem.human(), changes);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << rest.size()); ++mask) {
        Model m = base;
        try {
            // Removals first, so no intermediate model has an add/delete overlap.
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t i = 0; i < rest.size(); ++i)
                    if ((mask >> i & 1) && (rest[i].direction == ChangeDirection::remove) == (pass == 0))
                        m = apply_change(m, rest[i]);
        } catch (const InvalidEdit &) {
            continue;
        }
        if (!problem.solve(m).reconciles(problem.robot_cost()))
            return false;
    }
    return true;
}

std::string model_digest(const Model &model) { return sha256_hex(dump_features(model)).substr(0, 16); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Plan as compared by the edit-distance metrics.
std::vector<std::string> comparison_plan(const ReconciliationProblem &problem, const SearchOptions &options,
                                         const std::vector<std::string> &plan, const Model &model) {
    if (!options.compare_by_schema)
        return plan;
    std::vector<std::string> out;
    out.reserve(plan.size());
    for (const auto &a : plan)
        out.push_back(problem.backend().schema_of(a, model));
    return out;
}

struct Evaluated {
    Model model;
    ModelSolution solution;
    std::vector<std::string> compare;

    PlanPoint point() const { return {solution.cost_star, compare}; }
};

using EvalFn = std::function<std::shared_ptr<const Evaluated>(std::size_t prefix, const Model &)>;

ExplanationTrace build_trace(const ReconciliationProblem &problem, std::span<const FeatureChange> changes,
                             const SearchOptions &options, std::string mode, const EvalFn &eval) {
    ExplanationTrace trace;
    trace.mode = std::move(mode);
    trace.metric = options.metric;
    trace.variant = options.variant;
    trace.epsilon = options.epsilon;
    trace.changes.assign(changes.begin(), changes.end());
    Model model = problem.human();
    std::shared_ptr<const Evaluated> previous;
    for (std::size_t i = 0; i <= changes.size(); ++i) {
        if (i > 0)
            model = apply_change(model, changes[i - 1]);
        auto current = eval(i, model);
        TraceStep step;
        step.step = i;
        if (i > 0)
            step.change = changes[i - 1];
        step.model_digest = model_digest(model);
        step.solvable = current->solution.solvable;
        step.cost_star = current->solution.cost_star;
        step.plan = current->solution.plan;
        step.planner = current->solution.planner;
        if (previous)
            step.rho = rho(options.metric, {previous->point(), current->point()});
        trace.sum_rho += step.rho;
        trace.steps.push_back(std::move(step));
        previous = current;
    }
    trace.complete = consistent_with_robot(problem, changes) && previous->solution.reconciles(problem.robot_cost());
    return trace;
}

std::shared_ptr<const Evaluated> evaluate(const ReconciliationProblem &problem, const SearchOptions &options,
                                          Model model) {
    auto out = std::make_shared<Evaluated>();
    out->solution = problem.solve(model);
    out->compare = comparison_plan(problem, options, out->solution.plan, model);
    out->model = std::move(model);
    return out;
}

} // namespace

ExplanationTrace replay(const ReconciliationProblem &problem, std::span<const FeatureChange> changes,
                        const SearchOptions &options) {
    auto start = Clock::now();
    auto trace = build_trace(problem, changes, options, "given", [&](std::size_t, const Model &m) {
        return evaluate(problem, options, m);
    });
    trace.search.wall_seconds = seconds_since(start);
    return trace;
}

Cost trace_sum_rho(const ExplanationTrace &trace, MetricKind metric) {
    Cost sum = 0;
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        const auto &a = trace.steps[i - 1];
        const auto &b = trace.steps[i];
        sum += rho(metric, {{a.cost_star, a.plan}, {b.cost_star, b.plan}});
    }
    return sum;
}

ExplanationTrace generate_concise(const ReconciliationProblem &problem, const SearchOptions &options) {
    auto start = Clock::now();
    // Plain rendering order; '+' sorts before '-', so additions lead.
    std::vector<FeatureChange> order = problem.changes();
    std::sort(order.begin(), order.end());
    const std::size_t n = order.size();
    SearchStatistics stats;

    std::vector<std::size_t> pick;
    auto try_subset = [&]() -> std::optional<std::vector<FeatureChange>> {
        Model m = problem.human();
        try {
            for (int pass = 0; pass < 2; ++pass)
                for (auto i : pick)
                    if ((order[i].direction == ChangeDirection::remove) == (pass == 0))
                        m = apply_change(m, order[i]);
        } catch (const InvalidEdit &) {
            return std::nullopt;
        }
        ++stats.generated;
        if (++stats.expansions > options.node_budget)
            throw ResourceLimit("concise search exceeded its budget of " + std::to_string(options.node_budget) +
                                " model evaluations");
        if (!problem.solve(m).reconciles(problem.robot_cost()))
            return std::nullopt;
        std::vector<FeatureChange> seq;
        for (auto i : pick)
            seq.push_back(order[i]);
        try {
            apply_all(problem.human(), seq);
        } catch (const InvalidEdit &) {
            std::stable_partition(seq.begin(), seq.end(),
                                  [](const FeatureChange &c) { return c.direction == ChangeDirection::remove; });
        }
        return seq;
    };

    // Combinations of each size in lexicographic index order.
    std::optional<std::vector<FeatureChange>> found;
    for (std::size_t size = 0; size <= n && !found; ++size) {
        pick.resize(size);
        for (std::size_t i = 0; i < size; ++i)
            pick[i] = i;
        while (true) {
            found = try_subset();
            if (found)
                break;
            std::size_t k = size;
            while (k > 0 && pick[k - 1] == n - size + k - 1)
                --k;
            if (k == 0)
                break;
            ++pick[k - 1];
            for (std::size_t j = k; j < size; ++j)
                pick[j] = pick[j - 1] + 1;
        }
    }
    if (!found)
        throw UnsupportedInput("no complete explanation exists");
    auto trace = build_trace(problem, *found, options, "concise", [&](std::size_t, const Model &m) {
        return evaluate(problem, options, m);
    });
    trace.search = stats;
    trace.search.wall_seconds = seconds_since(start);
    return trace;
}

ExplanationTrace generate_progressive(const ReconciliationProblem &problem, const SearchOptions &options) {
    auto start = Clock::now();
    const auto &changes = problem.changes();
    const auto n = static_cast<std::uint32_t>(changes.size());
    std::vector<std::uint32_t> by_rendering(n);
    for (std::uint32_t i = 0; i < n; ++i)
        by_rendering[i] = i;
    std::sort(by_rendering.begin(), by_rendering.end(),
              [&](auto a, auto b) { return changes[a].str() < changes[b].str(); });

    std::unordered_map<StateBits, std::shared_ptr<const Evaluated>, StateBitsHash> cache;
    auto lookup = [&](const StateBits &key, const Model &model) {
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
        auto e = evaluate(problem, options, model);
        cache.emplace(key, e);
        return e;
    };
    const auto &robot_plan = problem.robot_plan();
    auto target_compare = comparison_plan(problem, options, robot_plan, problem.robot());
    const PlanPoint target{problem.robot_cost(), target_compare};

    struct Node {
        std::vector<std::uint32_t> sequence; // indices into changes, in applied order
        StateBits set;
        std::shared_ptr<const Evaluated> eval;
        Rational g;
        Rational h;
    };
    std::vector<Node> nodes;
    std::unordered_map<StateBits, std::uint32_t, StateBitsHash> best;
    std::unordered_set<StateBits, StateBitsHash> closed;

    struct Entry {
        Rational f;
        Rational h;
        std::uint32_t node;
    };
    // Lower f, then lower h, then fewer changes, then the smaller index sequence.
    auto worse = [&](const Entry &a, const Entry &b) {
        if (a.f != b.f)
            return a.f > b.f;
        if (a.h != b.h)
            return a.h > b.h;
        const auto &sa = nodes[a.node].sequence;
        const auto &sb = nodes[b.node].sequence;
        if (sa.size() != sb.size())
            return sa.size() > sb.size();
        if (sa != sb)
            return sb < sa;
        return a.node > b.node;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

    auto changes_of = [&](const std::vector<std::uint32_t> &sequence) {
        std::vector<FeatureChange> out;
        for (auto i : sequence)
            out.push_back(changes[i]);
        return out;
    };

    SearchStatistics stats;
    {
        StateBits empty(n);
        auto root_eval = lookup(empty, problem.human());
        auto h = heuristic(options.metric, options.variant, root_eval->point(), target, n);
        nodes.push_back({{}, empty, root_eval, Rational(0), h});
        best.emplace(empty, 0);
        open.push({h, h, 0});
        stats.generated = 1;
    }

    while (!open.empty()) {
        auto entry = open.top();
        open.pop();
        const auto id = entry.node;
        if (closed.count(nodes[id].set) || best.at(nodes[id].set) != id)
            continue;
        // Copy out: pushing children may reallocate `nodes`.
        const auto sequence = nodes[id].sequence;
        const auto set = nodes[id].set;
        const auto eval = nodes[id].eval;
        const auto g = nodes[id].g;
        const auto applied = changes_of(sequence);
        const std::size_t remaining = n - sequence.size();
        if (options.observer && options.observer->on_expand)
            options.observer->on_expand({applied, eval->model, eval->solution, g, nodes[id].h, remaining});

        if (eval->solution.reconciles(problem.robot_cost())) {
            auto trace = build_trace(problem, applied, options, "peg", [&](std::size_t i, const Model &m) {
                StateBits key(n);
                for (std::size_t j = 0; j < i; ++j)
                    key.set(sequence[j]);
                return lookup(key, m);
            });
            trace.search = stats;
            trace.search.wall_seconds = seconds_since(start);
            return trace;
        }
        closed.insert(set);
        if (++stats.expansions > options.node_budget)
            throw ResourceLimit("explanation search exceeded its budget of " +
                                std::to_string(options.node_budget) + " expansions");

        bool raising_first = eval->solution.cost_star <= problem.robot_cost();
        for (std::uint32_t k = 0; k < n; ++k) {
            const std::uint32_t i = raising_first ? k : by_rendering[k];
            if (set.test(i))
                continue;
            StateBits child_set = set;
            child_set.set(i);
            if (closed.count(child_set))
                continue;
            std::shared_ptr<const Evaluated> child_eval;
            auto cached = cache.find(child_set);
            if (cached != cache.end()) {
                child_eval = cached->second;
            } else {
                Model child_model;
                try {
                    child_model = apply_change(eval->model, changes[i]);
                } catch (const InvalidEdit &) {
                    continue;
                }
                child_eval = lookup(child_set, child_model);
            }
            ++stats.generated;
            Cost r = rho(options.metric, {eval->point(), child_eval->point()});
            Rational child_g = g + r + options.epsilon;
            Rational child_h = heuristic(options.metric, options.variant, child_eval->point(), target, remaining - 1);
            auto child_sequence = sequence;
            child_sequence.push_back(i);
            if (options.observer && options.observer->on_edge) {
                auto child_applied = changes_of(child_sequence);
                options.observer->on_edge({applied, eval->model, eval->solution, g, nodes[id].h, remaining},
                                          {child_applied, child_eval->model, child_eval->solution, child_g,
                                           child_h, remaining - 1},
                                          r);
            }
            auto known = best.find(child_set);
            if (known != best.end()) {
                const auto &other = nodes[known->second];
                if (child_g > other.g || (child_g == other.g && !(child_sequence < other.sequence)))
                    continue;
            }
            auto child = static_cast<std::uint32_t>(nodes.size());
            nodes.push_back({std::move(child_sequence), child_set, child_eval, child_g, child_h});
            best[child_set] = child;
            open.push({child_g + child_h, child_h, child});
        }
    }
    throw UnsupportedInput("no complete explanation exists");
}

} // namespace peg
