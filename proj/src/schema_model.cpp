#include "peg/pddl.hpp"

#include <algorithm>

namespace peg::pddl {

namespace {

FactSet render_all(const std::vector<Atom> &atoms) {
    FactSet out;
    for (const auto &a : atoms)
        out.insert(check_fact(a.str()));
    return out;
}

std::vector<Atom> atoms_of(const FactSet &facts) {
    std::vector<Atom> out;
    for (const auto &f : facts) {
        auto fact = Fact::parse(f);
        out.push_back({fact.name, fact.args});
    }
    return out;
}

} // namespace

Model lift(const DomainAst &domain, const ProblemAst &problem) {
    Model model;
    model.init = render_all(problem.init);
    model.goal = render_all(problem.goal);
    model.facts.insert(model.init.begin(), model.init.end());
    model.facts.insert(model.goal.begin(), model.goal.end());
    for (const auto &schema : domain.actions) {
        GroundAction action;
        action.name = schema.name;
        action.schema = schema.name;
        action.preconditions = render_all(schema.precondition);
        action.add_effects = render_all(schema.add_effects);
        for (const auto &f : render_all(schema.delete_effects))
            if (!action.add_effects.count(f))
                action.delete_effects.insert(f);
        action.cost = schema.cost.value_or(1);
        for (const auto *set : {&action.preconditions, &action.add_effects, &action.delete_effects})
            model.facts.insert(set->begin(), set->end());
        model.actions.emplace(action.name, std::move(action));
    }
    model.validate();
    return model;
}

std::pair<DomainAst, ProblemAst> lower(const Model &schema_model, const DomainAst &domain_template,
                                       const ProblemAst &problem_template) {
    DomainAst domain = domain_template;
    if (schema_model.actions.size() != domain.actions.size())
        throw UnsupportedInput("schema-level model and domain template have different actions");
    bool needs_costs = false;
    for (auto &schema : domain.actions) {
        auto it = schema_model.actions.find(schema.name);
        if (it == schema_model.actions.end())
            throw UnsupportedInput("schema-level model has no action '" + schema.name + "'");
        const auto &action = it->second;
        schema.precondition = atoms_of(action.preconditions);
        schema.add_effects = atoms_of(action.add_effects);
        schema.delete_effects = atoms_of(action.delete_effects);
        if (schema.cost || action.cost != 1) {
            schema.cost = action.cost;
            needs_costs = true;
        }
    }
    if (needs_costs) {
        if (std::find(domain.requirements.begin(), domain.requirements.end(), ":action-costs") ==
            domain.requirements.end())
            domain.requirements.push_back(":action-costs");
        domain.declares_total_cost = true;
    }
    ProblemAst problem = problem_template;
    problem.init = atoms_of(schema_model.init);
    problem.goal = atoms_of(schema_model.goal);
    return {std::move(domain), std::move(problem)};
}

SchemaBackend::SchemaBackend(DomainAst domain, ProblemAst problem, PlannerOptions options)
    : domain_(std::move(domain)), problem_(std::move(problem)), options_(options) {}

Model SchemaBackend::ground_model(const Model &schema_model) const {
    auto [domain, problem] = lower(schema_model, domain_, problem_);
    return ground(domain, problem);
}

PlanResult SchemaBackend::solve(const Model &model) const {
    return optimal_plan(ground_model(model), options_);
}

std::optional<Cost> SchemaBackend::cost_of(const std::vector<std::string> &plan, const Model &model) const {
    auto grounded = ground_model(model);
    // Grounding drops only actions whose static preconditions are false, so a
    // missing step can never be applied.
    for (const auto &name : plan)
        if (!grounded.actions.count(name))
            return std::nullopt;
    return plan_cost(plan, grounded);
}

std::string SchemaBackend::schema_of(const std::string &action, const Model &) const {
    std::string best = action;
    std::size_t best_len = 0;
    for (const auto &schema : domain_.actions) {
        const auto &n = schema.name;
        bool match = action == n || (action.size() > n.size() && action.compare(0, n.size(), n) == 0 &&
                                     action[n.size()] == '-');
        if (match && n.size() > best_len) {
            best = n;
            best_len = n.size();
        }
    }
    return best;
}

} // namespace peg::pddl
