#pragma once

#include <cstdio>
#include <map>
#include <string>

#include <json.hpp>

namespace aniso::io {

/// Stable float formatting for artifacts: %.12g, locale-independent.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Deterministic JSON dump: keys sorted (nlohmann::json's std::map order),
/// numbers printed with %.12g, LF only. Used for report artifacts so repeated
/// runs are byte-identical.
inline void dump_json(const nlohmann::json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
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
        out += pad_in + nlohmann::json(key).dump() + ": ";
        dump_json(val, out, indent, depth + 1);
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
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad_in;
        dump_json(j[i], out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

inline std::string dump_json(const nlohmann::json& j, int indent = 2) {
  std::string out;
  dump_json(j, out, indent, 0);
  out += "\n";
  return out;
}

}  // namespace aniso::io
