#include "peg/fixture.hpp"

#include "peg/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace peg {

Model split_conditional_costs(const ConditionalModel &input) {
    Model model;
    model.facts = input.facts;
    model.init = input.init;
    model.goal = input.goal;
    auto add = [&](GroundAction action) {
        for (const auto *set : {&action.preconditions, &action.add_effects, &action.delete_effects})
            model.facts.insert(set->begin(), set->end());
        auto name = action.name;
        if (!model.actions.emplace(name, std::move(action)).second)
            throw UnsupportedInput("action name '" + name + "' is defined twice after splitting conditional costs");
    };
    for (const auto &c : input.actions) {
        if (!c.cheap_cost) {
            add(c.action);
            continue;
        }
        GroundAction base = c.action;
        base.schema = base.name;
        GroundAction cheap = c.action;
        cheap.name += "-cheap";
        cheap.schema = c.action.name;
        cheap.preconditions.insert(c.cheap_condition.begin(), c.cheap_condition.end());
        cheap.cost = *c.cheap_cost;
        add(std::move(base));
        add(std::move(cheap));
    }
    model.facts.insert(model.init.begin(), model.init.end());
    model.facts.insert(model.goal.begin(), model.goal.end());
    model.validate();
    return model;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct Token {
    std::string text;
    int column;
};

std::vector<Token> split(const std::string &line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

Cost parse_cost(const Token &t, int line) {
    if (t.text.empty() || t.text.size() > 15 ||
        !std::all_of(t.text.begin(), t.text.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw pddl::ParseError("expected a nonnegative integer cost, got '" + t.text + "'", line, t.column);
    return std::stoll(t.text);
}

class FixtureParser {
public:
    explicit FixtureParser(std::string_view text) : text_(text) {}

    std::map<std::string, ConditionalModel> run() {
        std::istringstream in{std::string(text_)};
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_;
            auto cut = raw.find_first_of("#;");
            if (cut != std::string::npos)
                raw.erase(cut);
            auto tokens = split(lower(raw));
            if (!tokens.empty())
                statement(tokens);
        }
        std::map<std::string, ConditionalModel> out;
        if (blocks_.empty()) {
            out.emplace("default", common_);
            return out;
        }
        for (const auto &[name, block] : blocks_)
            out.emplace(name, merge(block));
        return out;
    }

private:
    ConditionalModel &section() { return current_block_ ? blocks_.at(*current_block_) : common_; }

    void statement(const std::vector<Token> &tokens) {
        const auto &head = tokens.front();
        if (head.text == "model") {
            if (tokens.size() != 2 || !is_identifier(tokens[1].text))
                throw pddl::ParseError("expected 'model NAME'", line_, head.column);
            if (blocks_.count(tokens[1].text))
                throw pddl::ParseError("model '" + tokens[1].text + "' is defined twice", line_, tokens[1].column);
            blocks_.emplace(tokens[1].text, ConditionalModel{});
            current_block_ = tokens[1].text;
            current_action_ = std::nullopt;
            return;
        }
        if (head.text == "action") {
            action_header(tokens);
            return;
        }
        if (head.text.back() != ':')
            throw pddl::ParseError("unknown statement '" + head.text + "'", line_, head.column);
        auto key = head.text.substr(0, head.text.size() - 1);
        std::vector<Token> rest(tokens.begin() + 1, tokens.end());
        if (key == "init" || key == "goal" || key == "facts") {
            auto &target = key == "init" ? section().init : key == "goal" ? section().goal : section().facts;
            for (const auto &t : rest)
                target.insert(fact(t));
            return;
        }
        if (key != "pre" && key != "eff+" && key != "eff-")
            throw pddl::ParseError("unknown statement '" + head.text + "'", line_, head.column);
        if (!current_action_)
            throw pddl::ParseError("'" + head.text + "' outside an action", line_, head.column);
        auto &action = section().actions[*current_action_];
        if (key == "eff+") {
            for (const auto &t : rest)
                action.action.add_effects.insert(fact(t));
        } else if (key == "eff-") {
            for (const auto &t : rest)
                action.action.delete_effects.insert(fact(t));
        } else {
            precondition(action, rest);
        }
    }

    void action_header(const std::vector<Token> &tokens) {
        if (tokens.size() < 3)
            throw pddl::ParseError("expected 'action NAME COST [(CHEAP)]'", line_, tokens.front().column);
        const auto &name = tokens[1];
        if (!is_identifier(name.text) || name.text.find("-has-") != std::string::npos || name.text == "init" ||
            name.text == "goal")
            throw pddl::ParseError("invalid action name '" + name.text + "'", line_, name.column);
        ConditionalAction action;
        action.action.name = name.text;
        action.action.cost = parse_cost(tokens[2], line_);
        if (tokens.size() > 3) {
            std::string cheap;
            for (std::size_t i = 3; i < tokens.size(); ++i)
                cheap += tokens[i].text;
            if (cheap.size() < 3 || cheap.front() != '(' || cheap.back() != ')')
                throw pddl::ParseError("expected '(CHEAP)' after the cost", line_, tokens[3].column);
            action.cheap_cost = parse_cost({cheap.substr(1, cheap.size() - 2), tokens[3].column}, line_);
        }
        auto &actions = section().actions;
        auto it = std::find_if(actions.begin(), actions.end(),
                               [&](const ConditionalAction &a) { return a.action.name == name.text; });
        if (it != actions.end())
            throw pddl::ParseError("action '" + name.text + "' is defined twice in one section", line_,
                                   name.column);
        actions.push_back(std::move(action));
        current_action_ = actions.size() - 1;
    }

    void precondition(ConditionalAction &action, const std::vector<Token> &tokens) {
        bool in_group = false;
        bool seen_group = false;
        for (auto t : tokens) {
            bool opens = t.text.front() == '(';
            if (opens) {
                if (in_group || seen_group)
                    throw pddl::ParseError("only one condition group is allowed", line_, t.column);
                in_group = seen_group = true;
                t.text.erase(0, 1);
            }
            bool closes = false;
            auto open_count = std::count(t.text.begin(), t.text.end(), '(');
            auto close_count = std::count(t.text.begin(), t.text.end(), ')');
            if (close_count > open_count) {
                if (!in_group || close_count != open_count + 1)
                    throw pddl::ParseError("unbalanced ')'", line_, t.column);
                t.text.pop_back();
                closes = true;
            }
            if (!t.text.empty()) {
                auto f = fact(t);
                (in_group ? action.cheap_condition : action.action.preconditions).insert(f);
            }
            if (closes)
                in_group = false;
        }
        if (in_group)
            throw pddl::ParseError("unterminated condition group", line_, tokens.back().column);
        if (seen_group && !action.cheap_cost)
            throw pddl::ParseError("condition group on action '" + action.action.name + "' without a cheap cost",
                                   line_, tokens.front().column);
    }

    std::string fact(const Token &t) const {
        try {
            return check_fact(t.text);
        } catch (const UnsupportedInput &e) {
            throw pddl::ParseError(e.what(), line_, t.column);
        }
    }

    ConditionalModel merge(const ConditionalModel &block) const {
        ConditionalModel out = common_;
        out.facts.insert(block.facts.begin(), block.facts.end());
        out.init.insert(block.init.begin(), block.init.end());
        out.goal.insert(block.goal.begin(), block.goal.end());
        for (const auto &a : block.actions) {
            auto it = std::find_if(out.actions.begin(), out.actions.end(), [&](const ConditionalAction &b) {
                return b.action.name == a.action.name;
            });
            if (it != out.actions.end())
                *it = a;
            else
                out.actions.push_back(a);
        }
        return out;
    }

    std::string_view text_;
    int line_ = 0;
    ConditionalModel common_;
    std::map<std::string, ConditionalModel> blocks_;
    std::optional<std::string> current_block_;
    std::optional<std::size_t> current_action_;
};

} // namespace

std::map<std::string, ConditionalModel> parse_fixture(std::string_view text) { return FixtureParser(text).run(); }

std::map<std::string, Model> load_fixture(std::string_view text) {
    std::map<std::string, Model> out;
    for (const auto &[name, model] : parse_fixture(text))
        out.emplace(name, split_conditional_costs(model));
    return out;
}

} // namespace peg
