#include "peg/strips_model.hpp"

#include <algorithm>
#include <charconv>

namespace peg {

namespace {

constexpr std::string_view kHas = "-has-";

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

bool is_argument(std::string_view text) {
    if (!text.empty() && text.front() == '?')
        text.remove_prefix(1);
    return is_identifier(text);
}

Cost parse_uint(std::string_view text, std::string_view context) {
    Cost value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value < 0)
        throw UnsupportedInput("expected a nonnegative integer in '" + std::string(context) + "'");
    return value;
}

GroundAction &mutable_action(Model &model, const std::string &name) {
    auto it = model.actions.find(name);
    if (it == model.actions.end())
        throw UnknownAction("model has no action named '" + name + "'");
    return it->second;
}

FactSet *fact_slot(Model &model, const Feature &feature) {
    switch (feature.kind()) {
    case FeatureKind::init:
        return &model.init;
    case FeatureKind::goal:
        return &model.goal;
    case FeatureKind::precondition:
        return &mutable_action(model, feature.owner()).preconditions;
    case FeatureKind::add_effect:
        return &mutable_action(model, feature.owner()).add_effects;
    case FeatureKind::delete_effect:
        return &mutable_action(model, feature.owner()).delete_effects;
    case FeatureKind::cost:
        return nullptr;
    }
    return nullptr;
}

} // namespace

bool is_identifier(std::string_view text) {
    if (text.empty() || text.front() == '-')
        return false;
    return std::all_of(text.begin(), text.end(), is_ident_char);
}

std::string Fact::str() const {
    if (args.empty())
        return name;
    std::string out = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ',';
        out += args[i];
    }
    out += ')';
    return out;
}

Fact Fact::parse(std::string_view text) {
    Fact fact;
    auto open = text.find('(');
    if (open == std::string_view::npos) {
        fact.name = std::string(text);
    } else {
        if (text.back() != ')')
            throw UnsupportedInput("malformed fact '" + std::string(text) + "'");
        fact.name = std::string(text.substr(0, open));
        auto inner = text.substr(open + 1, text.size() - open - 2);
        std::size_t start = 0;
        while (true) {
            auto comma = inner.find(',', start);
            auto piece = inner.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start);
            if (!is_argument(piece))
                throw UnsupportedInput("malformed fact argument in '" + std::string(text) + "'");
            fact.args.emplace_back(piece);
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
    }
    if (!is_identifier(fact.name))
        throw UnsupportedInput("malformed fact name in '" + std::string(text) + "'");
    return fact;
}

const std::string &check_fact(const std::string &rendered) {
    if (Fact::parse(rendered).str() != rendered)
        throw UnsupportedInput("fact '" + rendered + "' is not in canonical form");
    return rendered;
}

void Model::validate() const {
    auto require_known = [&](const FactSet &set, std::string_view where) {
        for (const auto &f : set)
            if (!facts.count(f))
                throw InvalidEdit("fact '" + f + "' in " + std::string(where) +
                                  " is missing from the fact universe");
    };
    require_known(init, "init");
    require_known(goal, "goal");
    for (const auto &[name, action] : actions) {
        if (name != action.name)
            throw InvalidEdit("action keyed as '" + name + "' is named '" + action.name + "'");
        if (!is_identifier(name) || name.find(kHas) != std::string::npos || name == "init" ||
            name == "goal")
            throw InvalidEdit("action name '" + name + "' is not usable in feature strings");
        if (action.cost < 0)
            throw InvalidEdit("action '" + name + "' has a negative cost");
        require_known(action.preconditions, name + " preconditions");
        require_known(action.add_effects, name + " add effects");
        require_known(action.delete_effects, name + " delete effects");
        for (const auto &f : action.add_effects)
            if (action.delete_effects.count(f))
                throw InvalidEdit("action '" + name + "' both adds and deletes '" + f + "'");
    }
}

const GroundAction &Model::action(std::string_view name) const {
    auto it = actions.find(name);
    if (it == actions.end())
        throw UnknownAction("unknown action '" + std::string(name) + "'");
    return it->second;
}

std::set<std::string> Model::action_names() const {
    std::set<std::string> names;
    for (const auto &[name, action] : actions)
        names.insert(name);
    return names;
}

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::init:
        return "init";
    case FeatureKind::goal:
        return "goal";
    case FeatureKind::precondition:
        return "precondition";
    case FeatureKind::add_effect:
        return "add-effect";
    case FeatureKind::delete_effect:
        return "delete-effect";
    case FeatureKind::cost:
        return "cost";
    }
    return "?";
}

Feature::Feature(FeatureKind kind, std::string owner, std::string fact, Cost cost)
    : kind_(kind), owner_(std::move(owner)), fact_(std::move(fact)), cost_(cost) {
    switch (kind_) {
    case FeatureKind::init:
    case FeatureKind::goal:
        text_ = std::string(to_string(kind_)) + "-has-" + fact_;
        break;
    case FeatureKind::cost:
        text_ = owner_ + "-has-cost-" + std::to_string(cost_);
        break;
    default:
        text_ = owner_ + "-has-" + std::string(to_string(kind_)) + "-" + fact_;
        break;
    }
}

Feature Feature::init(std::string fact) { return {FeatureKind::init, {}, std::move(fact), 0}; }
Feature Feature::goal(std::string fact) { return {FeatureKind::goal, {}, std::move(fact), 0}; }
Feature Feature::precondition(std::string action, std::string fact) {
    return {FeatureKind::precondition, std::move(action), std::move(fact), 0};
}
Feature Feature::add_effect(std::string action, std::string fact) {
    return {FeatureKind::add_effect, std::move(action), std::move(fact), 0};
}
Feature Feature::delete_effect(std::string action, std::string fact) {
    return {FeatureKind::delete_effect, std::move(action), std::move(fact), 0};
}
Feature Feature::cost(std::string action, Cost value) {
    if (value < 0)
        throw UnsupportedInput("negative cost for action '" + action + "'");
    return {FeatureKind::cost, std::move(action), {}, value};
}

Feature Feature::make(FeatureKind kind, std::string owner, std::string fact) {
    return {kind, std::move(owner), std::move(fact), 0};
}

Feature Feature::parse(std::string_view text) {
    auto fact_of = [&](std::string_view rest) {
        auto fact = Fact::parse(rest);
        return fact.str();
    };
    if (text.starts_with("init-has-"))
        return init(fact_of(text.substr(9)));
    if (text.starts_with("goal-has-"))
        return goal(fact_of(text.substr(9)));
    auto pos = text.find(kHas);
    if (pos == std::string_view::npos || pos == 0)
        throw UnsupportedInput("malformed feature '" + std::string(text) + "'");
    std::string owner(text.substr(0, pos));
    if (!is_identifier(owner))
        throw UnsupportedInput("malformed action name in feature '" + std::string(text) + "'");
    auto rest = text.substr(pos + kHas.size());
    for (auto kind : {FeatureKind::precondition, FeatureKind::add_effect, FeatureKind::delete_effect}) {
        std::string prefix = std::string(to_string(kind)) + "-";
        if (rest.starts_with(prefix))
            return make(kind, owner, fact_of(rest.substr(prefix.size())));
    }
    if (rest.starts_with("cost-"))
        return cost(owner, parse_uint(rest.substr(5), text));
    throw UnsupportedInput("malformed feature '" + std::string(text) + "'");
}

std::string FeatureChange::str() const {
    return (direction == ChangeDirection::add ? "+" : "-") + feature.str();
}

FeatureChange FeatureChange::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.starts_with('+'))
        return {ChangeDirection::add, Feature::parse(trim(text.substr(1)))};
    if (text.starts_with('-'))
        return {ChangeDirection::remove, Feature::parse(trim(text.substr(1)))};
    if (text.starts_with("add "))
        return {ChangeDirection::add, Feature::parse(trim(text.substr(4)))};
    if (text.starts_with("remove "))
        return {ChangeDirection::remove, Feature::parse(trim(text.substr(7)))};
    throw UnsupportedInput("malformed feature change '" + std::string(text) + "'");
}

FeatureSet gamma(const Model &model) {
    FeatureSet out;
    for (const auto &f : model.init)
        out.insert(Feature::init(f));
    for (const auto &f : model.goal)
        out.insert(Feature::goal(f));
    for (const auto &[name, action] : model.actions) {
        for (const auto &f : action.preconditions)
            out.insert(Feature::precondition(name, f));
        for (const auto &f : action.add_effects)
            out.insert(Feature::add_effect(name, f));
        for (const auto &f : action.delete_effects)
            out.insert(Feature::delete_effect(name, f));
        out.insert(Feature::cost(name, action.cost));
    }
    return out;
}

Model reconstruct(const FeatureSet &features, const FactSet &fact_universe) {
    Model model;
    model.facts = fact_universe;
    std::set<std::string> costed;
    auto action_for = [&](const std::string &name) -> GroundAction & {
        auto &action = model.actions[name];
        action.name = name;
        return action;
    };
    for (const auto &feature : features) {
        if (feature.kind() == FeatureKind::cost) {
            if (!costed.insert(feature.owner()).second)
                throw UnsupportedInput("action '" + feature.owner() + "' has two cost features");
            action_for(feature.owner()).cost = feature.cost_value();
            continue;
        }
        model.facts.insert(feature.fact());
        switch (feature.kind()) {
        case FeatureKind::init:
            model.init.insert(feature.fact());
            break;
        case FeatureKind::goal:
            model.goal.insert(feature.fact());
            break;
        case FeatureKind::precondition:
            action_for(feature.owner()).preconditions.insert(feature.fact());
            break;
        case FeatureKind::add_effect:
            action_for(feature.owner()).add_effects.insert(feature.fact());
            break;
        case FeatureKind::delete_effect:
            action_for(feature.owner()).delete_effects.insert(feature.fact());
            break;
        case FeatureKind::cost:
            break;
        }
    }
    for (const auto &[name, action] : model.actions)
        if (!costed.count(name))
            throw UnsupportedInput("action '" + name + "' has no cost feature");
    model.validate();
    return model;
}

std::vector<FeatureChange> delta(const Model &from, const Model &to) {
    if (from.action_names() != to.action_names())
        throw UnsupportedInput("models do not share the same action names");
    auto a = gamma(from);
    auto b = gamma(to);
    std::vector<FeatureChange> out;
    for (const auto &f : b)
        if (f.kind() != FeatureKind::cost && !a.count(f))
            out.push_back({ChangeDirection::add, f});
    for (const auto &f : a)
        if (f.kind() != FeatureKind::cost && !b.count(f))
            out.push_back({ChangeDirection::remove, f});
    for (const auto &[name, action] : to.actions)
        if (from.action(name).cost != action.cost)
            out.push_back({ChangeDirection::add, Feature::cost(name, action.cost)});
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t model_distance(const Model &a, const Model &b) { return delta(a, b).size(); }

bool has_feature(const Model &model, const Feature &feature) {
    if (feature.kind() == FeatureKind::cost) {
        auto it = model.actions.find(feature.owner());
        return it != model.actions.end() && it->second.cost == feature.cost_value();
    }
    switch (feature.kind()) {
    case FeatureKind::init:
        return model.init.count(feature.fact()) > 0;
    case FeatureKind::goal:
        return model.goal.count(feature.fact()) > 0;
    default:
        break;
    }
    auto it = model.actions.find(feature.owner());
    if (it == model.actions.end())
        return false;
    const auto &action = it->second;
    if (feature.kind() == FeatureKind::precondition)
        return action.preconditions.count(feature.fact()) > 0;
    if (feature.kind() == FeatureKind::add_effect)
        return action.add_effects.count(feature.fact()) > 0;
    return action.delete_effects.count(feature.fact()) > 0;
}

Model apply_change(const Model &model, const FeatureChange &change) {
    const auto &feature = change.feature;
    Model out = model;
    if (feature.kind() == FeatureKind::cost) {
        auto &action = mutable_action(out, feature.owner());
        if (change.direction == ChangeDirection::remove)
            throw InvalidEdit("cost feature '" + feature.str() +
                              "' cannot be removed; add the replacement cost instead");
        if (action.cost == feature.cost_value())
            throw PreconditionViolation("feature '" + feature.str() + "' is already present");
        action.cost = feature.cost_value();
        return out;
    }
    auto *slot = fact_slot(out, feature);
    if (change.direction == ChangeDirection::add) {
        if (!slot->insert(feature.fact()).second)
            throw PreconditionViolation("feature '" + feature.str() + "' is already present");
        out.facts.insert(feature.fact());
    } else {
        if (!slot->erase(feature.fact()))
            throw PreconditionViolation("feature '" + feature.str() + "' is absent");
    }
    if (feature.kind() == FeatureKind::add_effect || feature.kind() == FeatureKind::delete_effect) {
        const auto &action = out.action(feature.owner());
        if (action.add_effects.count(feature.fact()) && action.delete_effects.count(feature.fact()))
            throw InvalidEdit("'" + change.str() + "' makes '" + feature.owner() +
                              "' both add and delete '" + feature.fact() + "'");
    }
    return out;
}

Model apply_changes(const Model &model, std::span<const FeatureChange> changes) {
    Model out = model;
    for (const auto &change : changes)
        out = apply_change(out, change);
    return out;
}

FeatureChange inverse_change(const Model &before, const FeatureChange &change) {
    if (change.feature.kind() == FeatureKind::cost)
        return {ChangeDirection::add,
                Feature::cost(change.feature.owner(), before.action(change.feature.owner()).cost)};
    return {change.direction == ChangeDirection::add ? ChangeDirection::remove : ChangeDirection::add,
            change.feature};
}

std::string dump_features(const Model &model) {
    std::string out;
    for (const auto &f : gamma(model)) {
        out += f.str();
        out += '\n';
    }
    return out;
}

} // namespace peg
