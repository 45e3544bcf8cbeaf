#include "peg/planner.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace peg {

namespace {

constexpr Cost kInfinity = std::numeric_limits<Cost>::max() / 4;

std::vector<std::uint32_t> indices_of(const FactSet &facts,
                                      const std::unordered_map<std::string, std::uint32_t> &index) {
    std::vector<std::uint32_t> out;
    out.reserve(facts.size());
    for (const auto &f : facts)
        out.push_back(index.at(f));
    return out;
}

} // namespace

std::size_t StateBits::hash() const { return boost::hash_range(words_.begin(), words_.end()); }

Task::Task(const Model &model) {
    FactSet universe = model.facts;
    universe.insert(model.init.begin(), model.init.end());
    universe.insert(model.goal.begin(), model.goal.end());
    for (const auto &[name, action] : model.actions) {
        universe.insert(action.preconditions.begin(), action.preconditions.end());
        universe.insert(action.add_effects.begin(), action.add_effects.end());
        universe.insert(action.delete_effects.begin(), action.delete_effects.end());
    }
    std::unordered_map<std::string, std::uint32_t> index;
    fact_names_.assign(universe.begin(), universe.end());
    for (std::uint32_t i = 0; i < fact_names_.size(); ++i)
        index.emplace(fact_names_[i], i);

    operators_.reserve(model.actions.size());
    for (const auto &[name, action] : model.actions) {
        Operator op;
        op.pre = indices_of(action.preconditions, index);
        op.add = indices_of(action.add_effects, index);
        op.del = indices_of(action.delete_effects, index);
        op.cost = action.cost;
        op.name = name;
        operators_.push_back(std::move(op));
    }
    init_ = indices_of(model.init, index);
    goal_ = indices_of(model.goal, index);
}

StateBits Task::initial_state() const {
    StateBits s(num_facts());
    for (auto f : init_)
        s.set(f);
    return s;
}

StateBits Task::make_state(const FactSet &facts) const {
    StateBits s(num_facts());
    for (const auto &f : facts) {
        auto it = std::lower_bound(fact_names_.begin(), fact_names_.end(), f);
        if (it == fact_names_.end() || *it != f)
            throw UnsupportedInput("fact '" + f + "' is not part of the task");
        s.set(static_cast<std::uint32_t>(it - fact_names_.begin()));
    }
    return s;
}

bool Task::applicable(const StateBits &state, const Operator &op) const {
    return std::all_of(op.pre.begin(), op.pre.end(), [&](auto f) { return state.test(f); });
}

StateBits Task::successor(const StateBits &state, const Operator &op) const {
    StateBits next = state;
    for (auto f : op.del)
        next.reset(f);
    for (auto f : op.add)
        next.set(f);
    return next;
}

bool Task::is_goal(const StateBits &state) const {
    return std::all_of(goal_.begin(), goal_.end(), [&](auto f) { return state.test(f); });
}

HMax::HMax(const Task &task)
    : task_(task), precondition_of_(task.num_facts()), fact_cost_(task.num_facts()),
      unsatisfied_(task.operators().size()) {
    const auto &ops = task.operators();
    for (std::uint32_t i = 0; i < ops.size(); ++i) {
        if (ops[i].pre.empty())
            no_pre_ops_.push_back(i);
        for (auto f : ops[i].pre)
            precondition_of_[f].push_back(i);
    }
}

std::optional<Cost> HMax::operator()(const StateBits &state) const {
    const auto &ops = task_.operators();
    using Entry = std::pair<Cost, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::fill(fact_cost_.begin(), fact_cost_.end(), kInfinity);
    for (std::uint32_t i = 0; i < ops.size(); ++i)
        unsatisfied_[i] = static_cast<std::uint32_t>(ops[i].pre.size());

    auto relax = [&](std::uint32_t fact, Cost value) {
        if (value < fact_cost_[fact]) {
            fact_cost_[fact] = value;
            queue.emplace(value, fact);
        }
    };
    for (std::uint32_t f = 0; f < task_.num_facts(); ++f)
        if (state.test(f))
            relax(f, 0);
    for (auto i : no_pre_ops_)
        for (auto f : ops[i].add)
            relax(f, ops[i].cost);

    std::size_t goals_left = task_.goal().size();
    std::vector<bool> is_goal_fact(task_.num_facts(), false);
    for (auto g : task_.goal())
        is_goal_fact[g] = true;
    Cost max_goal = 0;

    while (!queue.empty() && goals_left > 0) {
        auto [value, fact] = queue.top();
        queue.pop();
        if (value > fact_cost_[fact])
            continue;
        if (is_goal_fact[fact]) {
            is_goal_fact[fact] = false;
            max_goal = std::max(max_goal, value);
            --goals_left;
        }
        for (auto i : precondition_of_[fact])
            if (--unsatisfied_[i] == 0)
                for (auto f : ops[i].add)
                    relax(f, value + ops[i].cost);
    }
    if (goals_left > 0)
        return std::nullopt;
    return max_goal;
}

PlanResult optimal_plan(const Model &model, const PlannerOptions &options) {
    auto start_time = std::chrono::steady_clock::now();
    Task task(model);
    HMax hmax(task);
    const auto &ops = task.operators();

    struct Node {
        StateBits state;
        Cost g = 0;
        Cost h = 0;
        std::vector<std::uint32_t> path;
        bool closed = false;
    };
    std::vector<Node> nodes;
    std::unordered_map<StateBits, std::uint32_t, StateBitsHash> lookup;

    struct Entry {
        Cost f;
        Cost h;
        std::uint32_t node;
    };
    auto worse = [&](const Entry &a, const Entry &b) {
        if (a.f != b.f)
            return a.f > b.f;
        if (a.h != b.h)
            return a.h > b.h;
        const auto &pa = nodes[a.node].path;
        const auto &pb = nodes[b.node].path;
        if (pa != pb)
            return pb < pa;
        return a.node > b.node;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);

    PlanResult result;
    auto finish = [&] {
        result.stats.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
        return result;
    };

    auto init = task.initial_state();
    auto h0 = hmax(init);
    if (!h0)
        return finish();
    nodes.push_back({init, 0, *h0, {}, false});
    lookup.emplace(init, 0);
    open.push({*h0, *h0, 0});
    result.stats.generated = 1;

    while (!open.empty()) {
        auto entry = open.top();
        open.pop();
        auto id = entry.node;
        if (nodes[id].closed || lookup.at(nodes[id].state) != id)
            continue;
        if (task.is_goal(nodes[id].state)) {
            Plan plan;
            plan.cost = nodes[id].g;
            for (auto op : nodes[id].path)
                plan.actions.push_back(ops[op].name);
            result.plan = std::move(plan);
            return finish();
        }
        nodes[id].closed = true;
        if (++result.stats.expansions > options.node_budget)
            throw ResourceLimit("planner exceeded its budget of " +
                                std::to_string(options.node_budget) + " expansions");
        for (std::uint32_t op = 0; op < ops.size(); ++op) {
            if (!task.applicable(nodes[id].state, ops[op]))
                continue;
            auto next = task.successor(nodes[id].state, ops[op]);
            Cost g = nodes[id].g + ops[op].cost;
            auto path = nodes[id].path;
            path.push_back(op);
            ++result.stats.generated;
            auto it = lookup.find(next);
            if (it == lookup.end()) {
                auto h = hmax(next);
                if (!h)
                    continue;
                auto child = static_cast<std::uint32_t>(nodes.size());
                nodes.push_back({std::move(next), g, *h, std::move(path), false});
                lookup.emplace(nodes.back().state, child);
                open.push({g + *h, *h, child});
                continue;
            }
            // Heap keys are immutable, so an improved path gets a fresh node record.
            const auto &existing = nodes[it->second];
            if (existing.closed)
                continue;
            if (g < existing.g || (g == existing.g && path < existing.path)) {
                Cost h = existing.h;
                auto child = static_cast<std::uint32_t>(nodes.size());
                nodes.push_back({next, g, h, std::move(path), false});
                it->second = child;
                open.push({g + h, h, child});
            }
        }
    }
    return finish();
}

PlanValidation validate_plan(const std::vector<std::string> &plan, const Model &model) {
    PlanValidation out;
    FactSet state = model.init;
    Cost cost = 0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto &action = model.action(plan[i]);
        for (const auto &p : action.preconditions) {
            if (!state.count(p)) {
                out.failing_step = i;
                out.diagnostic = "step " + std::to_string(i) + " (" + plan[i] +
                                 "): precondition '" + p + "' does not hold";
                // Keep scanning for unknown actions so errors are reported consistently.
                for (std::size_t j = i + 1; j < plan.size(); ++j)
                    model.action(plan[j]);
                return out;
            }
        }
        for (const auto &d : action.delete_effects)
            state.erase(d);
        state.insert(action.add_effects.begin(), action.add_effects.end());
        cost += action.cost;
    }
    for (const auto &g : model.goal) {
        if (!state.count(g)) {
            out.diagnostic = "goal unsatisfied: '" + g + "' does not hold at the end";
            return out;
        }
    }
    out.valid = true;
    out.cost = cost;
    return out;
}

std::optional<Cost> plan_cost(const std::vector<std::string> &plan, const Model &model) {
    return validate_plan(plan, model).cost;
}

std::string format_plan(const Plan &plan, const Model &model) {
    std::ostringstream out;
    for (const auto &name : plan.actions) {
        const auto &action = model.action(name);
        if (action.args.empty()) {
            out << '(' << name << ")\n";
            continue;
        }
        out << '(' << action.schema;
        for (const auto &arg : action.args)
            out << ' ' << arg;
        out << ")\n";
    }
    out << "; cost = " << plan.cost << '\n';
    return out.str();
}

std::vector<std::string> parse_plan(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto semi = line.find(';');
        if (semi != std::string::npos)
            line.erase(semi);
        std::string cleaned;
        for (char c : line)
            cleaned += (c == '(' || c == ')') ? ' ' : static_cast<char>(std::tolower(c));
        std::istringstream tokens(cleaned);
        std::string token, name;
        while (tokens >> token)
            name += (name.empty() ? "" : "-") + token;
        if (!name.empty())
            out.push_back(name);
    }
    return out;
}

std::string PlanningBackend::schema_of(const std::string &action, const Model &model) const {
    auto it = model.actions.find(action);
    if (it == model.actions.end() || it->second.schema.empty())
        return action;
    return it->second.schema;
}

PlanResult GroundBackend::solve(const Model &model) const { return optimal_plan(model, options_); }

std::optional<Cost> GroundBackend::cost_of(const std::vector<std::string> &plan, const Model &model) const {
    return plan_cost(plan, model);
}

} // namespace peg
