#ifndef PEG_TRACE_IO_HPP
#define PEG_TRACE_IO_HPP

#include "peg/explain.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace peg {

std::string trace_to_json(const ExplanationTrace &trace);

/// Columns step,cost_star,rho; step 0 is the human model with rho 0.
std::string trace_to_csv(const ExplanationTrace &trace);

std::string trace_to_text(const ExplanationTrace &trace);

/// Reads a change list: a JSON trace (its "changes" array), a JSON array of
/// strings, or text with one change per line (`#` comments, blank lines skipped).
std::vector<FeatureChange> parse_changes(std::string_view text);

} // namespace peg

#endif
