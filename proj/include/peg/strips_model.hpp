#ifndef PEG_STRIPS_MODEL_HPP
#define PEG_STRIPS_MODEL_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace peg {

using Cost = std::int64_t;

/// Facts are held by their canonical rendering, `name(arg1,arg2)` or `name`.
using FactSet = std::set<std::string>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adding a feature that is present, or removing one that is absent.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// An edit whose result would break a Model invariant.
class InvalidEdit : public Error {
public:
    using Error::Error;
};

/// Input outside the supported fragment (bad names, mismatched action universes, ...).
class UnsupportedInput : public Error {
public:
    using Error::Error;
};

/// A search or planner exceeded its node budget.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

/// A plan or change list names an action the model does not have.
class UnknownAction : public Error {
public:
    using Error::Error;
};

struct Fact {
    std::string name;
    std::vector<std::string> args;

    std::string str() const;
    /// Accepts `name` or `name(a,b,...)`. Arguments may be `?var` for schema-level atoms.
    static Fact parse(std::string_view text);

    friend bool operator==(const Fact &, const Fact &) = default;
};

/// Lowercase identifier: [a-z0-9_][a-z0-9_-]*
bool is_identifier(std::string_view text);

/// Validates a fact rendering and returns it unchanged; throws UnsupportedInput.
const std::string &check_fact(const std::string &rendered);

struct GroundAction {
    std::string name;
    FactSet preconditions;
    FactSet add_effects;
    FactSet delete_effects;
    Cost cost = 1;
    // Display-only: the schema (or base action) this action came from and its
    // arguments. Empty schema means the name is printed as is.
    std::string schema;
    std::vector<std::string> args;

    friend bool operator==(const GroundAction &, const GroundAction &) = default;
};

/// Grounded STRIPS task. Treated as an immutable value: edits return new models.
struct Model {
    FactSet facts;
    std::map<std::string, GroundAction, std::less<>> actions;
    FactSet init;
    FactSet goal;

    /// Throws InvalidEdit when an invariant is broken.
    void validate() const;
    const GroundAction &action(std::string_view name) const;
    std::set<std::string> action_names() const;

    friend bool operator==(const Model &, const Model &) = default;
};

enum class FeatureKind { init, goal, precondition, add_effect, delete_effect, cost };

std::string_view to_string(FeatureKind kind);

/// One atomic property of a model. Ordered and compared by its rendering.
class Feature {
public:
    static Feature init(std::string fact);
    static Feature goal(std::string fact);
    static Feature precondition(std::string action, std::string fact);
    static Feature add_effect(std::string action, std::string fact);
    static Feature delete_effect(std::string action, std::string fact);
    static Feature cost(std::string action, Cost value);
    static Feature make(FeatureKind kind, std::string owner, std::string fact);
    static Feature parse(std::string_view text);

    FeatureKind kind() const { return kind_; }
    const std::string &owner() const { return owner_; }
    const std::string &fact() const { return fact_; }
    Cost cost_value() const { return cost_; }
    const std::string &str() const { return text_; }

    std::strong_ordering operator<=>(const Feature &other) const { return text_ <=> other.text_; }
    bool operator==(const Feature &other) const { return text_ == other.text_; }

private:
    Feature(FeatureKind kind, std::string owner, std::string fact, Cost cost);

    FeatureKind kind_;
    std::string owner_;
    std::string fact_;
    Cost cost_ = 0;
    std::string text_;
};

using FeatureSet = std::set<Feature>;

enum class ChangeDirection { add, remove };

/// A unit edit. For cost features `add` replaces the action's cost with the
/// feature's value; cost features cannot be removed.
struct FeatureChange {
    ChangeDirection direction = ChangeDirection::add;
    Feature feature = Feature::init("x");

    /// `+<feature>` or `-<feature>`.
    std::string str() const;
    /// Accepts `+f`, `-f`, `add f`, `remove f`.
    static FeatureChange parse(std::string_view text);

    std::strong_ordering operator<=>(const FeatureChange &other) const { return str() <=> other.str(); }
    bool operator==(const FeatureChange &other) const {
        return direction == other.direction && feature == other.feature;
    }
};

FeatureSet gamma(const Model &model);

/// Inverse of gamma for a given fact universe; referenced facts are added to it.
Model reconstruct(const FeatureSet &features, const FactSet &fact_universe = {});

/// Changes turning `from` into `to`, sorted by rendering. Both models must
/// have the same action names; differing costs yield one replace-style change.
std::vector<FeatureChange> delta(const Model &from, const Model &to);

std::size_t model_distance(const Model &a, const Model &b);

Model apply_change(const Model &model, const FeatureChange &change);
Model apply_changes(const Model &model, std::span<const FeatureChange> changes);

/// The change that undoes `change` when applied to apply_change(before, change).
FeatureChange inverse_change(const Model &before, const FeatureChange &change);

bool has_feature(const Model &model, const Feature &feature);

/// Sorted feature list, one per line.
std::string dump_features(const Model &model);

} // namespace peg

#endif
