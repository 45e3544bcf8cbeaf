#include "peg/pddl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace peg::pddl {

namespace {

class GroundingContext {
public:
    GroundingContext(const DomainAst &domain, const ProblemAst &problem) : domain_(domain) {
        if (!problem.domain_name.empty() && problem.domain_name != domain.name)
            throw UnsupportedInput("problem '" + problem.name + "' is for domain '" + problem.domain_name +
                                   "', not '" + domain.name + "'");
        for (const auto &t : domain.types)
            parent_[t.name] = t.type;
        for (const auto &p : domain.predicates)
            arity_[p.name] = p.parameters.size();
        auto add_object = [&](const TypedName &o) {
            if (o.type != "object" && !parent_.count(o.type))
                throw UnsupportedInput("object '" + o.name + "' has undeclared type '" + o.type + "'");
            if (!object_type_.emplace(o.name, o.type).second)
                throw UnsupportedInput("object '" + o.name + "' is declared twice");
            objects_.push_back(o);
        };
        for (const auto &c : domain.constants)
            add_object(c);
        for (const auto &o : problem.objects)
            add_object(o);
        for (const auto &a : domain.actions) {
            for (const auto &e : a.add_effects)
                fluent_.insert(e.predicate);
            for (const auto &e : a.delete_effects)
                fluent_.insert(e.predicate);
        }
        for (const auto &atom : problem.init)
            init_.insert(render(atom, {}));
    }

    bool is_subtype(std::string type, const std::string &target) const {
        for (int guard = 0; guard < 64; ++guard) {
            if (type == target || target == "object")
                return true;
            auto it = parent_.find(type);
            if (it == parent_.end() || it->second == type)
                return false;
            type = it->second;
        }
        throw UnsupportedInput("cyclic type hierarchy at '" + type + "'");
    }

    std::vector<std::string> objects_of(const std::string &type) const {
        std::vector<std::string> out;
        for (const auto &o : objects_)
            if (is_subtype(o.type, type))
                out.push_back(o.name);
        return out;
    }

    bool is_static(const std::string &predicate) const { return !fluent_.count(predicate); }
    const FactSet &init() const { return init_; }

    std::string render(const Atom &atom, const std::map<std::string, std::string> &binding) const {
        auto it = arity_.find(atom.predicate);
        if (it == arity_.end())
            throw UnsupportedInput("undeclared predicate '" + atom.predicate + "'");
        if (it->second != atom.terms.size())
            throw UnsupportedInput("arity mismatch: '" + atom.predicate + "' takes " +
                                   std::to_string(it->second) + " arguments, got " +
                                   std::to_string(atom.terms.size()));
        Fact fact{atom.predicate, {}};
        for (const auto &t : atom.terms) {
            if (t.front() == '?') {
                auto b = binding.find(t);
                if (b == binding.end())
                    throw UnsupportedInput("unbound variable '" + t + "'");
                fact.args.push_back(b->second);
            } else {
                if (!object_type_.count(t))
                    throw UnsupportedInput("undeclared object '" + t + "'");
                fact.args.push_back(t);
            }
        }
        return fact.str();
    }

    GroundAction instantiate(const ActionSchema &schema, const std::vector<std::string> &objects) const {
        if (objects.size() != schema.parameters.size())
            throw UnsupportedInput("arity mismatch: action '" + schema.name + "' takes " +
                                   std::to_string(schema.parameters.size()) + " arguments");
        std::map<std::string, std::string> binding;
        for (std::size_t i = 0; i < objects.size(); ++i)
            binding[schema.parameters[i].name] = objects[i];
        GroundAction action;
        action.name = schema.name;
        for (const auto &o : objects)
            action.name += "-" + o;
        if (action.name.find("-has-") != std::string::npos)
            throw UnsupportedInput("grounded action name '" + action.name + "' contains '-has-'");
        action.schema = schema.name;
        action.args = objects;
        for (const auto &a : schema.precondition)
            action.preconditions.insert(render(a, binding));
        for (const auto &a : schema.add_effects)
            action.add_effects.insert(render(a, binding));
        for (const auto &a : schema.delete_effects) {
            auto fact = render(a, binding);
            if (!action.add_effects.count(fact))
                action.delete_effects.insert(fact);
        }
        action.cost = schema.cost.value_or(1);
        return action;
    }

    std::vector<GroundAction> ground_schema(const ActionSchema &schema, bool prune_static) const {
        const auto n = schema.parameters.size();
        std::vector<std::vector<std::string>> domains(n);
        for (std::size_t i = 0; i < n; ++i)
            domains[i] = objects_of(schema.parameters[i].type);
        std::unordered_map<std::string, std::size_t> position;
        for (std::size_t i = 0; i < n; ++i)
            position[schema.parameters[i].name] = i;
        // Static precondition atoms become checkable once their last variable is bound.
        std::vector<std::vector<const Atom *>> checks(n + 1);
        if (prune_static) {
            for (const auto &atom : schema.precondition) {
                if (!is_static(atom.predicate))
                    continue;
                std::size_t last = 0;
                for (const auto &t : atom.terms)
                    if (t.front() == '?')
                        last = std::max(last, position.at(t) + 1);
                checks[last].push_back(&atom);
            }
        }
        std::vector<GroundAction> out;
        std::vector<std::string> chosen;
        std::map<std::string, std::string> binding;
        auto passes = [&](std::size_t level) {
            for (const auto *atom : checks[level])
                if (!init_.count(render(*atom, binding)))
                    return false;
            return true;
        };
        auto recurse = [&](auto &&self, std::size_t depth) -> void {
            if (depth == n) {
                out.push_back(instantiate(schema, chosen));
                return;
            }
            for (const auto &object : domains[depth]) {
                chosen.push_back(object);
                binding[schema.parameters[depth].name] = object;
                if (passes(depth + 1))
                    self(self, depth + 1);
                chosen.pop_back();
            }
            binding.erase(schema.parameters[depth].name);
        };
        if (passes(0))
            recurse(recurse, 0);
        return out;
    }

private:
    const DomainAst &domain_;
    std::map<std::string, std::string> parent_;
    std::map<std::string, std::size_t> arity_;
    std::map<std::string, std::string> object_type_;
    std::vector<TypedName> objects_;
    std::set<std::string> fluent_;
    FactSet init_;
};

void add_action(Model &model, GroundAction action) {
    for (const auto *set : {&action.preconditions, &action.add_effects, &action.delete_effects})
        model.facts.insert(set->begin(), set->end());
    auto name = action.name;
    if (!model.actions.emplace(name, std::move(action)).second)
        throw UnsupportedInput("grounded action name '" + name + "' is ambiguous");
}

} // namespace

Model ground(const DomainAst &domain, const ProblemAst &problem, const GroundOptions &options) {
    GroundingContext context(domain, problem);
    Model model;
    model.init = context.init();
    for (const auto &atom : problem.goal)
        model.goal.insert(context.render(atom, {}));
    model.facts.insert(model.init.begin(), model.init.end());
    model.facts.insert(model.goal.begin(), model.goal.end());
    for (const auto &schema : domain.actions)
        for (auto &action : context.ground_schema(schema, options.prune_static))
            add_action(model, std::move(action));
    model.validate();
    return model;
}

GroundAction instantiate(const DomainAst &domain, const ActionSchema &schema,
                         const std::vector<std::string> &objects) {
    ProblemAst no_objects;
    no_objects.domain_name = domain.name;
    // Objects are only needed for constant terms; bind through a permissive context.
    for (const auto &o : objects)
        if (std::none_of(no_objects.objects.begin(), no_objects.objects.end(),
                         [&](const TypedName &t) { return t.name == o; }))
            no_objects.objects.push_back({o, "object"});
    DomainAst relaxed = domain;
    relaxed.types.clear();
    for (auto &c : relaxed.constants)
        c.type = "object";
    return GroundingContext(relaxed, no_objects).instantiate(schema, objects);
}

std::pair<Model, Model> ground_pair(const DomainAst &robot_domain, const ProblemAst &robot_problem,
                                    const DomainAst &human_domain, const ProblemAst &human_problem) {
    auto robot = ground(robot_domain, robot_problem);
    auto human = ground(human_domain, human_problem);
    auto fill = [](Model &target, const DomainAst &domain, const ProblemAst &problem, const Model &other) {
        GroundingContext context(domain, problem);
        for (const auto &[name, action] : other.actions) {
            if (target.actions.count(name))
                continue;
            const auto *schema = domain.find_action(action.schema);
            if (!schema)
                throw UnsupportedInput("action schema '" + action.schema +
                                       "' is missing from one of the domains");
            add_action(target, context.instantiate(*schema, action.args));
        }
        target.validate();
    };
    const Model robot_only = robot;
    fill(robot, robot_domain, robot_problem, human);
    fill(human, human_domain, human_problem, robot_only);
    return {std::move(robot), std::move(human)};
}

} // namespace peg::pddl
