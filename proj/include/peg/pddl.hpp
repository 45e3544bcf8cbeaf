#ifndef PEG_PDDL_HPP
#define PEG_PDDL_HPP

#include "peg/planner.hpp"
#include "peg/strips_model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace peg::pddl {

class ParseError : public Error {
public:
    ParseError(const std::string &message, int line, int column);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A predicate applied to terms; a term is `?var` or an object/constant name.
struct Atom {
    std::string predicate;
    std::vector<std::string> terms;

    std::string str() const; // fact rendering, e.g. at(?x,?y)
    friend bool operator==(const Atom &, const Atom &) = default;
};

struct TypedName {
    std::string name;
    std::string type = "object";

    friend bool operator==(const TypedName &, const TypedName &) = default;
};

struct PredicateDecl {
    std::string name;
    std::vector<TypedName> parameters;

    friend bool operator==(const PredicateDecl &, const PredicateDecl &) = default;
};

struct ActionSchema {
    std::string name;
    std::vector<TypedName> parameters;
    std::vector<Atom> precondition;
    std::vector<Atom> add_effects;
    std::vector<Atom> delete_effects;
    std::optional<Cost> cost; // constant (increase (total-cost) k)

    friend bool operator==(const ActionSchema &, const ActionSchema &) = default;
};

struct DomainAst {
    std::string name;
    std::vector<std::string> requirements;
    std::vector<TypedName> types; // name with its parent type
    std::vector<TypedName> constants;
    std::vector<PredicateDecl> predicates;
    bool declares_total_cost = false;
    std::vector<ActionSchema> actions;

    const ActionSchema *find_action(std::string_view name) const;
    friend bool operator==(const DomainAst &, const DomainAst &) = default;
};

struct ProblemAst {
    std::string name;
    std::string domain_name;
    std::vector<TypedName> objects;
    std::vector<Atom> init;
    std::vector<Atom> goal;
    bool minimize_total_cost = false;

    friend bool operator==(const ProblemAst &, const ProblemAst &) = default;
};

DomainAst parse_domain(std::string_view text);
ProblemAst parse_problem(std::string_view text);

std::string to_pddl(const DomainAst &domain);
std::string to_pddl(const ProblemAst &problem);

struct GroundOptions {
    bool prune_static = true;
};

/// Instantiates every schema over the typed objects. Grounded names are
/// `schema-obj1-obj2`; actions whose static preconditions are false in init are
/// dropped; a fact both added and deleted by one action keeps only the add.
Model ground(const DomainAst &domain, const ProblemAst &problem, const GroundOptions &options = {});

/// Instantiates one schema with the given objects, without static pruning.
GroundAction instantiate(const DomainAst &domain, const ActionSchema &schema,
                         const std::vector<std::string> &objects);

/// Grounds two variants of the same task so they share one action universe: an
/// action kept by either grounding is instantiated in both.
std::pair<Model, Model> ground_pair(const DomainAst &robot_domain, const ProblemAst &robot_problem,
                                    const DomainAst &human_domain, const ProblemAst &human_problem);

/// Schema-level model: one action per schema, facts are lifted atoms such as
/// `at(?x,?y)`, init/goal are the problem's ground facts. Deletes that the same
/// schema also adds are dropped, matching the grounded add-after-delete semantics.
Model lift(const DomainAst &domain, const ProblemAst &problem);

/// Inverse of lift: rebuilds domain and problem ASTs from a schema-level model,
/// taking parameter lists, types and objects from the templates.
std::pair<DomainAst, ProblemAst> lower(const Model &schema_model, const DomainAst &domain_template,
                                       const ProblemAst &problem_template);

/// Planning backend for schema-level models: each query lowers and grounds the
/// model, then plans on the grounding. Plan actions are grounded names.
class SchemaBackend : public PlanningBackend {
public:
    SchemaBackend(DomainAst domain, ProblemAst problem, PlannerOptions options = {});

    PlanResult solve(const Model &model) const override;
    std::optional<Cost> cost_of(const std::vector<std::string> &plan, const Model &model) const override;
    std::string schema_of(const std::string &action, const Model &model) const override;

    Model ground_model(const Model &schema_model) const;
    const DomainAst &domain() const { return domain_; }
    const ProblemAst &problem() const { return problem_; }

private:
    DomainAst domain_;
    ProblemAst problem_;
    PlannerOptions options_;
};

} // namespace peg::pddl

#endif
