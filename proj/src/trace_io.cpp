#include "peg/trace_io.hpp"

#include <json.hpp>

#include <cctype>
#include <sstream>

namespace peg {

using nlohmann::json;

namespace {

json stats_json(const SearchStatistics &s) {
    return {{"expansions", s.expansions}, {"generated", s.generated}, {"time_s", s.wall_seconds}};
}

} // namespace

std::string trace_to_json(const ExplanationTrace &trace) {
    json out;
    out["mode"] = trace.mode;
    out["metric"] = std::string(to_string(trace.metric));
    out["variant"] = std::string(to_string(trace.variant));
    out["epsilon"] = to_string(trace.epsilon);
    out["epsilon_value"] = to_double(trace.epsilon);
    json changes = json::array();
    for (const auto &c : trace.changes)
        changes.push_back(c.str());
    out["changes"] = changes;
    json steps = json::array();
    for (const auto &s : trace.steps) {
        json step;
        step["step"] = s.step;
        step["change"] = s.change ? json(s.change->str()) : json(nullptr);
        step["model_digest"] = s.model_digest;
        step["solvable"] = s.solvable;
        step["cost_star"] = s.cost_star;
        step["plan"] = s.plan;
        step["rho"] = s.rho;
        step["planner"] = stats_json(s.planner);
        steps.push_back(std::move(step));
    }
    out["steps"] = steps;
    out["sum_rho"] = trace.sum_rho;
    out["size"] = trace.changes.size();
    out["complete"] = trace.complete;
    out["expansions"] = trace.search.expansions;
    out["generated"] = trace.search.generated;
    out["time_s"] = trace.search.wall_seconds;
    return out.dump(2) + "\n";
}

std::string trace_to_csv(const ExplanationTrace &trace) {
    std::ostringstream out;
    out << "step,cost_star,rho\r\n";
    for (const auto &s : trace.steps)
        out << s.step << ',' << s.cost_star << ',' << s.rho << "\r\n";
    return out.str();
}

std::string trace_to_text(const ExplanationTrace &trace) {
    std::ostringstream out;
    out << trace.mode << " explanation, metric " << to_string(trace.metric) << ", " << trace.changes.size()
        << " change(s), sum rho " << trace.sum_rho << (trace.complete ? "" : " (incomplete)") << '\n';
    for (const auto &s : trace.steps) {
        out << "  " << s.step << ". " << (s.change ? s.change->str() : std::string("(human model)"));
        out << "  cost* " << s.cost_star << (s.solvable ? "" : " (unsolvable)") << ", rho " << s.rho << '\n';
    }
    out << "expansions " << trace.search.expansions << ", generated " << trace.search.generated << '\n';
    return out.str();
}

std::vector<FeatureChange> parse_changes(std::string_view text) {
    std::size_t first = 0;
    while (first < text.size() && std::isspace(static_cast<unsigned char>(text[first])))
        ++first;
    std::vector<FeatureChange> out;
    if (first < text.size() && (text[first] == '{' || text[first] == '[')) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error &e) {
            throw UnsupportedInput(std::string("malformed JSON change list: ") + e.what());
        }
        const json &list = doc.is_object() ? doc.value("changes", json()) : doc;
        if (!list.is_array())
            throw UnsupportedInput("JSON change list must be an array or carry a \"changes\" array");
        for (const auto &item : list) {
            if (!item.is_string())
                throw UnsupportedInput("JSON change list entries must be strings");
            out.push_back(FeatureChange::parse(item.get<std::string>()));
        }
        return out;
    }
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        auto e = line.find_last_not_of(" \t\r");
        out.push_back(FeatureChange::parse(std::string_view(line).substr(b, e - b + 1)));
    }
    return out;
}

} // namespace peg
