#include "peg/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <vector>

namespace peg {

std::string_view to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::cost_gap: return "p1";
    case MetricKind::cost_gap_squared: return "p2";
    case MetricKind::edit_distance: return "p3";
    case MetricKind::edit_distance_squared: return "p4";
    }
    return "?";
}

std::string_view to_string(HeuristicVariant variant) {
    return variant == HeuristicVariant::paper ? "paper" : "safe";
}

MetricKind parse_metric(std::string_view text) {
    if (text == "p1") return MetricKind::cost_gap;
    if (text == "p2") return MetricKind::cost_gap_squared;
    if (text == "p3") return MetricKind::edit_distance;
    if (text == "p4") return MetricKind::edit_distance_squared;
    throw UnsupportedInput("unknown metric '" + std::string(text) + "' (expected p1, p2, p3 or p4)");
}

HeuristicVariant parse_variant(std::string_view text) {
    if (text == "paper") return HeuristicVariant::paper;
    if (text == "safe") return HeuristicVariant::safe;
    throw UnsupportedInput("unknown heuristic variant '" + std::string(text) + "' (expected paper or safe)");
}

std::size_t plan_edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() < b.size())
        std::swap(a, b);
    // Two rows suffice; row j holds distances from a[0..i) to b[0..j).
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

namespace {

bool is_squared(MetricKind kind) {
    return kind == MetricKind::cost_gap_squared || kind == MetricKind::edit_distance_squared;
}

Cost base_distance(MetricKind kind, const PlanPoint &a, const PlanPoint &b) {
    if (kind == MetricKind::cost_gap || kind == MetricKind::cost_gap_squared)
        return a.cost > b.cost ? a.cost - b.cost : b.cost - a.cost;
    return static_cast<Cost>(plan_edit_distance(a.plan, b.plan));
}

} // namespace

Cost rho(MetricKind kind, const StepContext &step) {
    Cost d = base_distance(kind, step.previous, step.current);
    return is_squared(kind) ? d * d : d;
}

Rational heuristic(MetricKind kind, HeuristicVariant variant, const PlanPoint &node, const PlanPoint &target,
                   std::size_t remaining) {
    Cost d = base_distance(kind, node, target);
    if (!is_squared(kind))
        return Rational(d);
    if (variant == HeuristicVariant::paper)
        return Rational(d * d, 2);
    if (d == 0)
        return Rational(0);
    // No changes left but a nonzero gap: the node cannot finish, any value is sound.
    if (remaining == 0)
        return Rational(d * d);
    return Rational(d * d, static_cast<std::int64_t>(remaining));
}

double to_double(const Rational &value) {
    return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

namespace {

// Decimal with optional fraction and exponent, as numerator / 10^k.
Rational parse_decimal(std::string_view text, std::string_view whole) {
    auto fail = [&] {
        return UnsupportedInput("malformed number '" + std::string(whole) + "'");
    };
    std::int64_t mantissa = 0;
    int scale = 0;
    int digits = 0;
    std::size_t i = 0;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_point)
                throw fail();
            seen_point = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c)))
            break;
        if (++digits > 17)
            throw UnsupportedInput("number '" + std::string(whole) + "' has too many digits");
        mantissa = mantissa * 10 + (c - '0');
        if (seen_point)
            ++scale;
    }
    if (digits == 0)
        throw fail();
    int exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E')
            throw fail();
        ++i;
        bool negative = false;
        if (i < text.size() && (text[i] == '-' || text[i] == '+'))
            negative = text[i++] == '-';
        if (i == text.size())
            throw fail();
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i])) || exponent > 100)
                throw fail();
            exponent = exponent * 10 + (text[i] - '0');
        }
        if (negative)
            exponent = -exponent;
    }
    scale -= exponent;
    std::int64_t num = mantissa, den = 1;
    constexpr std::int64_t limit = std::numeric_limits<std::int64_t>::max() / 10;
    for (; scale > 0; --scale) {
        if (den > limit)
            throw UnsupportedInput("number '" + std::string(whole) + "' is too precise");
        den *= 10;
    }
    for (; scale < 0; ++scale) {
        if (num > limit)
            throw UnsupportedInput("number '" + std::string(whole) + "' is too large");
        num *= 10;
    }
    return Rational(num, den);
}

} // namespace

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return parse_decimal(text, text);
    Rational den = parse_decimal(text.substr(slash + 1), text);
    if (den.numerator() == 0)
        throw UnsupportedInput("zero denominator in '" + std::string(text) + "'");
    return parse_decimal(text.substr(0, slash), text) / den;
}

std::string to_string(const Rational &value) {
    if (value.denominator() == 1)
        return std::to_string(value.numerator());
    return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

} // namespace peg
