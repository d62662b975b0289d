#include <cmath>
#include <string>

#include "psiest/cli.hpp"
#include "psiest/format.hpp"

namespace psiest::cli {

namespace {

void emit(const nlohmann::ordered_json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, val] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + nlohmann::json(key).dump() + ": ";
        emit(val, indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& val : j) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        emit(val, indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? repr17(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string to_json_text(const nlohmann::ordered_json& value) {
  std::string out;
  emit(value, 0, out);
  out += "\n";
  return out;
}

}  // namespace psiest::cli
