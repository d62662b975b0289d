#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "psiest/kernel.hpp"

namespace psiest::cli {

/// Inline literal "[a, b, c]" (elements may be constant expressions such as
/// exp(-1)) or a path to a file with one `value` or `value,weight` record per
/// line; '#' starts a comment. Throws ParseError (with a 1-based line),
/// Error(kEmptyData) or ParseError(kNegativeWeight).
WeightedSample read_data(const std::string& path_or_literal);
WeightedSample parse_records(std::istream& in);

/// Pretty JSON with two-space indent and a trailing newline. Floating-point
/// numbers use 17 significant digits; NaN and infinities become null.
std::string to_json_text(const nlohmann::ordered_json& value);

/// Entry point for the psiest executable. Exit codes: 0 success /
/// NoCounterexample, 1 usage or input error, 2 solver or domain failure /
/// Inconclusive, 3 Counterexample.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psiest::cli
