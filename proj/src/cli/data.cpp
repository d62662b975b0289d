#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <vector>

#include "psiest/cli.hpp"
#include "psiest/error.hpp"
#include "psiest/expr.hpp"

namespace psiest::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_field(std::string_view field, std::size_t line,
                   const char* what) {
  const auto v = parse_number(field);
  if (!v || std::isnan(*v)) {
    throw ParseError(Errc::kParseError, line,
                     std::string("bad ") + what + " '" + std::string(trim(field)) +
                         "'");
  }
  return *v;
}

// A plain number, or a constant expression without x or t.
double parse_constant(std::string_view text) {
  if (const auto v = parse_number(text)) return *v;
  try {
    const Expr e = Expr::parse(text);
    if (e.uses_x() || e.uses_t()) {
      throw ParseError(Errc::kParseError, 1,
                       "data element '" + std::string(trim(text)) +
                           "' must not use x or t");
    }
    return e.eval(0.0, 0.0);
  } catch (const SyntaxError& e) {
    throw ParseError(Errc::kParseError, 1,
                     "data element '" + std::string(trim(text)) + "': " + e.what());
  }
}

WeightedSample parse_inline(std::string_view lit) {
  lit = trim(lit);
  if (lit.size() < 2 || lit.back() != ']') {
    throw ParseError(Errc::kParseError, 1, "inline data must look like [a,b,c]");
  }
  lit = lit.substr(1, lit.size() - 2);
  std::vector<double> xs;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= lit.size(); ++i) {
    const char c = i < lit.size() ? lit[i] : ',';
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      const auto elem = trim(lit.substr(start, i - start));
      if (elem.empty()) {
        if (i == lit.size() && xs.empty()) break;
        throw ParseError(Errc::kParseError, 1, "empty element in inline data");
      }
      xs.push_back(parse_constant(elem));
      start = i + 1;
    }
  }
  if (xs.empty()) throw Error(Errc::kEmptyData, "no observations");
  for (double x : xs) {
    if (std::isnan(x)) throw ParseError(Errc::kParseError, 1, "NaN observation");
  }
  return WeightedSample::uniform(std::move(xs));
}

}  // namespace

WeightedSample parse_records(std::istream& in) {
  std::vector<double> xs;
  std::vector<double> ws;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = trim(s);
    if (s.empty()) continue;
    const auto comma = s.find(',');
    const double x = parse_field(s.substr(0, comma), line, "value");
    double w = 1.0;
    if (comma != std::string_view::npos) {
      const auto rest = s.substr(comma + 1);
      if (rest.find(',') != std::string_view::npos) {
        throw ParseError(Errc::kParseError, line, "expected value[,weight]");
      }
      w = parse_field(rest, line, "weight");
      if (w < 0.0) {
        throw ParseError(Errc::kNegativeWeight, line,
                         "weight must be nonnegative");
      }
      if (!std::isfinite(w)) {
        throw ParseError(Errc::kParseError, line, "weight must be finite");
      }
    }
    xs.push_back(x);
    ws.push_back(w);
  }
  if (xs.empty()) throw Error(Errc::kEmptyData, "no observations");
  return WeightedSample(std::move(xs), std::move(ws));
}

WeightedSample read_data(const std::string& path_or_literal) {
  const auto lit = trim(path_or_literal);
  if (!lit.empty() && lit.front() == '[') return parse_inline(lit);
  std::ifstream in(path_or_literal);
  if (!in) {
    throw Error(Errc::kInvalidArgument, "cannot open data file '" +
                                            path_or_literal + "'");
  }
  return parse_records(in);
}

}  // namespace psiest::cli
