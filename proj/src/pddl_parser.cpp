#include "peg/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace peg::pddl {

ParseError::ParseError(const std::string &message, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line),
      column_(column) {}

std::string Atom::str() const {
    if (terms.empty())
        return predicate;
    std::string out = predicate + "(";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i)
            out += ',';
        out += terms[i];
    }
    return out + ")";
}

const ActionSchema *DomainAst::find_action(std::string_view name) const {
    for (const auto &a : actions)
        if (a.name == name)
            return &a;
    return nullptr;
}

namespace {

struct SExpr {
    bool is_list = false;
    std::string atom;
    std::vector<SExpr> items;
    int line = 0;
    int column = 0;

    bool is(std::string_view word) const { return !is_list && atom == word; }
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    SExpr read_document() {
        skip();
        if (pos_ >= text_.size())
            throw ParseError("empty input", line_, column_);
        auto expr = read();
        skip();
        if (pos_ < text_.size())
            throw ParseError("unexpected text after the closing parenthesis", line_, column_);
        return expr;
    }

private:
    SExpr read() {
        skip();
        if (pos_ >= text_.size())
            throw ParseError("unbalanced parentheses: unexpected end of input", line_, column_);
        SExpr expr;
        expr.line = line_;
        expr.column = column_;
        char c = text_[pos_];
        if (c == ')')
            throw ParseError("unbalanced parentheses: unexpected ')'", line_, column_);
        if (c == '(') {
            advance();
            expr.is_list = true;
            while (true) {
                skip();
                if (pos_ >= text_.size())
                    throw ParseError("unbalanced parentheses: list opened here is never closed",
                                     expr.line, expr.column);
                if (text_[pos_] == ')') {
                    advance();
                    return expr;
                }
                expr.items.push_back(read());
            }
        }
        while (pos_ < text_.size()) {
            c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';')
                break;
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '?' ||
                  c == ':' || c == '=' || c == '.'))
                throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
            expr.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            advance();
        }
        return expr;
    }

    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

[[noreturn]] void fail(const SExpr &at, const std::string &message) {
    throw ParseError(message, at.line, at.column);
}

const SExpr &expect_list(const SExpr &e, std::string_view what) {
    if (!e.is_list)
        fail(e, "expected " + std::string(what));
    return e;
}

const std::string &expect_symbol(const SExpr &e, std::string_view what) {
    if (e.is_list || e.atom.empty())
        fail(e, "expected " + std::string(what));
    return e.atom;
}

void check_name(const SExpr &e) {
    const auto &name = expect_symbol(e, "a name");
    if (!is_identifier(name))
        fail(e, "'" + name + "' is not a valid name");
}

/// `a b - t c - u d` with names checked by `check`.
std::vector<TypedName> typed_list(const std::vector<SExpr> &items, std::size_t from, bool variables) {
    std::vector<TypedName> out;
    std::size_t pending_from = 0;
    for (std::size_t i = from; i < items.size(); ++i) {
        const auto &item = items[i];
        if (item.is("-")) {
            if (i + 1 >= items.size())
                fail(item, "type name expected after '-'");
            const auto &type = items[i + 1];
            if (type.is_list)
                fail(type, "unsupported construct 'either' type (only flat types are supported)");
            check_name(type);
            for (std::size_t k = pending_from; k < out.size(); ++k)
                out[k].type = type.atom;
            pending_from = out.size();
            ++i;
            continue;
        }
        const auto &name = expect_symbol(item, variables ? "a variable" : "a name");
        if (variables) {
            if (name.size() < 2 || name.front() != '?' || !is_identifier(name.substr(1)))
                fail(item, "expected a variable, got '" + name + "'");
        } else if (!is_identifier(name)) {
            fail(item, "'" + name + "' is not a valid name");
        }
        out.push_back({name, "object"});
    }
    return out;
}

Atom parse_atom(const SExpr &e) {
    expect_list(e, "an atom");
    if (e.items.empty())
        fail(e, "empty atom");
    const auto &head = e.items.front();
    if (head.is("not"))
        fail(e, "unsupported construct 'not' in this position (negative preconditions are not supported)");
    for (auto word : {"or", "imply", "exists", "forall", "when", "="})
        if (head.is(word))
            fail(e, "unsupported construct '" + std::string(word) + "'");
    check_name(head);
    Atom atom{head.atom, {}};
    for (std::size_t i = 1; i < e.items.size(); ++i) {
        const auto &term = expect_symbol(e.items[i], "a term");
        bool ok = term.front() == '?' ? is_identifier(term.substr(1)) : is_identifier(term);
        if (!ok)
            fail(e.items[i], "'" + term + "' is not a valid term");
        atom.terms.push_back(term);
    }
    return atom;
}

/// `(and a b ...)`, a single atom, or `()`.
std::vector<Atom> parse_conjunction(const SExpr &e) {
    expect_list(e, "a conjunction");
    if (e.items.empty())
        return {};
    if (e.items.front().is("and")) {
        std::vector<Atom> out;
        for (std::size_t i = 1; i < e.items.size(); ++i)
            out.push_back(parse_atom(e.items[i]));
        return out;
    }
    return {parse_atom(e)};
}

Cost parse_cost_constant(const SExpr &e) {
    Cost value = 0;
    const auto &text = e.atom;
    if (e.is_list || text.empty())
        fail(e, "unsupported cost expression: only constant (increase (total-cost) k) is supported");
    double as_double = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && p == text.data() + text.size() && value >= 0)
        return value;
    auto [p2, ec2] = std::from_chars(text.data(), text.data() + text.size(), as_double);
    if (ec2 == std::errc() && p2 == text.data() + text.size() && as_double >= 0 &&
        as_double == static_cast<double>(static_cast<Cost>(as_double)))
        return static_cast<Cost>(as_double);
    fail(e, "unsupported cost expression '" + text + "': costs must be nonnegative integers");
}

void parse_effect_item(const SExpr &e, ActionSchema &action) {
    expect_list(e, "an effect");
    if (e.items.empty())
        return;
    const auto &head = e.items.front();
    if (head.is("not")) {
        if (e.items.size() != 2)
            fail(e, "malformed negative effect");
        action.delete_effects.push_back(parse_atom(e.items[1]));
        return;
    }
    if (head.is("increase")) {
        if (e.items.size() != 3 || !e.items[1].is_list || e.items[1].items.size() != 1 ||
            !e.items[1].items[0].is("total-cost"))
            fail(e, "unsupported construct 'increase': only (increase (total-cost) k) is supported");
        if (action.cost)
            fail(e, "action '" + action.name + "' increases total-cost twice");
        action.cost = parse_cost_constant(e.items[2]);
        return;
    }
    for (auto word : {"when", "forall", "decrease", "assign", "scale-up", "scale-down"})
        if (head.is(word))
            fail(e, "unsupported construct '" + std::string(word) + "'");
    action.add_effects.push_back(parse_atom(e));
}

void check_variables(const SExpr &where, const ActionSchema &action, const std::vector<Atom> &atoms) {
    std::set<std::string> params;
    for (const auto &p : action.parameters)
        params.insert(p.name);
    for (const auto &atom : atoms)
        for (const auto &t : atom.terms)
            if (t.front() == '?' && !params.count(t))
                fail(where, "variable '" + t + "' of action '" + action.name +
                                "' is not in its parameter list");
}

ActionSchema parse_action(const SExpr &e) {
    if (e.items.size() < 2)
        fail(e, "malformed :action");
    ActionSchema action;
    check_name(e.items[1]);
    action.name = e.items[1].atom;
    for (std::size_t i = 2; i < e.items.size(); i += 2) {
        const auto &key = e.items[i];
        if (i + 1 >= e.items.size())
            fail(key, "missing value for '" + key.atom + "'");
        const auto &value = e.items[i + 1];
        if (key.is(":parameters")) {
            expect_list(value, "a parameter list");
            action.parameters = typed_list(value.items, 0, true);
        } else if (key.is(":precondition")) {
            action.precondition = parse_conjunction(value);
        } else if (key.is(":effect")) {
            expect_list(value, "an effect");
            if (!value.items.empty() && value.items.front().is("and")) {
                for (std::size_t k = 1; k < value.items.size(); ++k)
                    parse_effect_item(value.items[k], action);
            } else {
                parse_effect_item(value, action);
            }
        } else {
            fail(key, "unsupported construct '" + key.atom + "' in action '" + action.name + "'");
        }
    }
    check_variables(e, action, action.precondition);
    check_variables(e, action, action.add_effects);
    check_variables(e, action, action.delete_effects);
    return action;
}

const std::set<std::string> &supported_requirements() {
    static const std::set<std::string> s{":strips", ":typing", ":action-costs"};
    return s;
}

const SExpr &expect_define(const SExpr &doc, std::string_view kind) {
    expect_list(doc, "(define ...)");
    if (doc.items.size() < 2 || !doc.items[0].is("define"))
        fail(doc, "expected (define ...)");
    const auto &header = expect_list(doc.items[1], "(" + std::string(kind) + " NAME)");
    if (header.items.size() != 2 || !header.items[0].is(kind))
        fail(header, "expected (" + std::string(kind) + " NAME)");
    check_name(header.items[1]);
    return header.items[1];
}

} // namespace

DomainAst parse_domain(std::string_view text) {
    auto doc = Reader(text).read_document();
    DomainAst domain;
    domain.name = expect_define(doc, "domain").atom;
    for (std::size_t i = 2; i < doc.items.size(); ++i) {
        const auto &section = expect_list(doc.items[i], "a domain section");
        if (section.items.empty())
            fail(section, "empty section");
        const auto &key = section.items.front();
        if (key.is(":requirements")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                const auto &req = expect_symbol(section.items[k], "a requirement");
                if (!supported_requirements().count(req))
                    fail(section.items[k], "unsupported requirement '" + req + "'");
                domain.requirements.push_back(req);
            }
        } else if (key.is(":types")) {
            domain.types = typed_list(section.items, 1, false);
        } else if (key.is(":constants")) {
            domain.constants = typed_list(section.items, 1, false);
        } else if (key.is(":predicates")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                const auto &p = expect_list(section.items[k], "a predicate declaration");
                if (p.items.empty())
                    fail(p, "empty predicate declaration");
                check_name(p.items[0]);
                domain.predicates.push_back({p.items[0].atom, typed_list(p.items, 1, true)});
            }
        } else if (key.is(":functions")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                const auto &f = section.items[k];
                if (f.is("-")) {
                    ++k; // return type
                    continue;
                }
                if (!f.is_list || f.items.size() != 1 || !f.items[0].is("total-cost"))
                    fail(f, "unsupported construct: only the (total-cost) function is supported");
                domain.declares_total_cost = true;
            }
        } else if (key.is(":action")) {
            domain.actions.push_back(parse_action(section));
        } else {
            fail(key, "unsupported construct '" + (key.is_list ? std::string("(...)") : key.atom) + "'");
        }
    }
    std::set<std::string> names;
    for (const auto &a : domain.actions)
        if (!names.insert(a.name).second)
            fail(doc, "duplicate action '" + a.name + "'");
    return domain;
}

ProblemAst parse_problem(std::string_view text) {
    auto doc = Reader(text).read_document();
    ProblemAst problem;
    problem.name = expect_define(doc, "problem").atom;
    std::vector<std::pair<Atom, const SExpr *>> used;
    for (std::size_t i = 2; i < doc.items.size(); ++i) {
        const auto &section = expect_list(doc.items[i], "a problem section");
        if (section.items.empty())
            fail(section, "empty section");
        const auto &key = section.items.front();
        if (key.is(":domain")) {
            if (section.items.size() != 2)
                fail(section, "malformed :domain");
            check_name(section.items[1]);
            problem.domain_name = section.items[1].atom;
        } else if (key.is(":objects")) {
            problem.objects = typed_list(section.items, 1, false);
        } else if (key.is(":init")) {
            for (std::size_t k = 1; k < section.items.size(); ++k) {
                const auto &item = expect_list(section.items[k], "an init atom");
                if (!item.items.empty() && item.items.front().is("=")) {
                    if (item.items.size() == 3 && item.items[1].is_list && item.items[1].items.size() == 1 &&
                        item.items[1].items[0].is("total-cost"))
                        continue;
                    fail(item, "unsupported construct '=' in :init (numeric fluents)");
                }
                problem.init.push_back(parse_atom(item));
                used.emplace_back(problem.init.back(), &section.items[k]);
            }
        } else if (key.is(":goal")) {
            if (section.items.size() != 2)
                fail(section, "malformed :goal");
            problem.goal = parse_conjunction(section.items[1]);
            for (const auto &a : problem.goal)
                used.emplace_back(a, &section.items[1]);
        } else if (key.is(":metric")) {
            if (section.items.size() != 3 || !section.items[1].is("minimize") || !section.items[2].is_list ||
                section.items[2].items.size() != 1 || !section.items[2].items[0].is("total-cost"))
                fail(section, "unsupported construct ':metric': only (:metric minimize (total-cost))");
            problem.minimize_total_cost = true;
        } else {
            fail(key, "unsupported construct '" + (key.is_list ? std::string("(...)") : key.atom) + "'");
        }
    }
    std::set<std::string> objects;
    for (const auto &o : problem.objects)
        objects.insert(o.name);
    for (const auto &[atom, where] : used)
        for (const auto &t : atom.terms) {
            if (t.front() == '?')
                fail(*where, "variable '" + t + "' in a problem");
            if (!objects.count(t))
                fail(*where, "undeclared object '" + t + "'");
        }
    return problem;
}

namespace {

void write_typed(std::ostringstream &out, const std::vector<TypedName> &names, bool always_typed) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << ' ' << names[i].name;
        bool last_of_group = i + 1 == names.size() || names[i + 1].type != names[i].type;
        if (last_of_group && (always_typed || names[i].type != "object"))
            out << " - " << names[i].type;
    }
}

void write_atom(std::ostringstream &out, const Atom &atom) {
    out << '(' << atom.predicate;
    for (const auto &t : atom.terms)
        out << ' ' << t;
    out << ')';
}

void write_conjunction(std::ostringstream &out, const std::vector<Atom> &atoms) {
    out << "(and";
    for (const auto &a : atoms) {
        out << ' ';
        write_atom(out, a);
    }
    out << ')';
}

} // namespace

std::string to_pddl(const DomainAst &domain) {
    std::ostringstream out;
    out << "(define (domain " << domain.name << ")\n";
    if (!domain.requirements.empty()) {
        out << "  (:requirements";
        for (const auto &r : domain.requirements)
            out << ' ' << r;
        out << ")\n";
    }
    if (!domain.types.empty()) {
        out << "  (:types";
        write_typed(out, domain.types, false);
        out << ")\n";
    }
    if (!domain.constants.empty()) {
        out << "  (:constants";
        write_typed(out, domain.constants, false);
        out << ")\n";
    }
    out << "  (:predicates";
    for (const auto &p : domain.predicates) {
        out << "\n    (" << p.name;
        write_typed(out, p.parameters, true);
        out << ')';
    }
    out << ")\n";
    if (domain.declares_total_cost)
        out << "  (:functions (total-cost) - number)\n";
    for (const auto &a : domain.actions) {
        out << "  (:action " << a.name << "\n    :parameters (";
        std::ostringstream params;
        write_typed(params, a.parameters, true);
        auto p = params.str();
        out << (p.empty() ? p : p.substr(1)) << ")\n    :precondition ";
        write_conjunction(out, a.precondition);
        out << "\n    :effect (and";
        for (const auto &e : a.add_effects) {
            out << ' ';
            write_atom(out, e);
        }
        for (const auto &e : a.delete_effects) {
            out << " (not ";
            write_atom(out, e);
            out << ')';
        }
        if (a.cost)
            out << " (increase (total-cost) " << *a.cost << ')';
        out << "))\n";
    }
    out << ")\n";
    return out.str();
}

std::string to_pddl(const ProblemAst &problem) {
    std::ostringstream out;
    out << "(define (problem " << problem.name << ")\n  (:domain " << problem.domain_name << ")\n";
    out << "  (:objects";
    write_typed(out, problem.objects, false);
    out << ")\n  (:init";
    for (const auto &a : problem.init) {
        out << "\n    ";
        write_atom(out, a);
    }
    if (problem.minimize_total_cost)
        out << "\n    (= (total-cost) 0)";
    out << ")\n  (:goal ";
    write_conjunction(out, problem.goal);
    out << ")\n";
    if (problem.minimize_total_cost)
        out << "  (:metric minimize (total-cost))\n";
    out << ")\n";
    return out.str();
}

} // namespace peg::pddl
