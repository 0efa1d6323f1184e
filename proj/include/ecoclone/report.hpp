// Structured command reports and their text, JSON and CSV renderings.
//
// A report holds named results and a list of verdicts. Each verdict names the
// result it judges and carries the tolerance it was judged with, so no
// pass/fail appears without the number and threshold behind it.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecoclone {

using Json = nlohmann::ordered_json;

struct ClaimVerdict {
  std::string claim;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string criterion;  ///< human-readable rule, e.g. "|F - 5/6| <= tol"

  friend bool operator==(const ClaimVerdict&, const ClaimVerdict&) = default;
};

struct Report {
  std::string command;
  int dimension = 0;
  Json parameters = Json::object();
  Json results = Json::object();
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::vector<ClaimVerdict> verdicts;
  std::vector<std::string> warnings;

  bool all_passed() const {
    for (const auto& v : verdicts)
      if (!v.passed) return false;
    return true;
  }

  /// Adds a verdict and records its tolerance under the claim name.
  void judge(std::string claim, bool passed, double measured, double tolerance, std::string criterion) {
    tolerances[claim] = tolerance;
    verdicts.push_back({std::move(claim), passed, measured, tolerance, std::move(criterion)});
  }

  friend bool operator==(const Report&, const Report&) = default;
};

inline void to_json(Json& j, const ClaimVerdict& v) {
  j = Json{{"claim", v.claim},
           {"passed", v.passed},
           {"measured", v.measured},
           {"tolerance", v.tolerance},
           {"criterion", v.criterion}};
}

inline void from_json(const Json& j, ClaimVerdict& v) {
  j.at("claim").get_to(v.claim);
  j.at("passed").get_to(v.passed);
  j.at("measured").get_to(v.measured);
  j.at("tolerance").get_to(v.tolerance);
  j.at("criterion").get_to(v.criterion);
}

inline void to_json(Json& j, const Report& r) {
  j = Json{{"command", r.command},
           {"dimension", r.dimension},
           {"seed", r.seed},
           {"parameters", r.parameters},
           {"results", r.results},
           {"tolerances", r.tolerances},
           {"verdicts", r.verdicts},
           {"warnings", r.warnings},
           {"all_passed", r.all_passed()}};
}

inline void from_json(const Json& j, Report& r) {
  j.at("command").get_to(r.command);
  j.at("dimension").get_to(r.dimension);
  j.at("seed").get_to(r.seed);
  r.parameters = j.at("parameters");
  r.results = j.at("results");
  j.at("tolerances").get_to(r.tolerances);
  j.at("verdicts").get_to(r.verdicts);
  j.at("warnings").get_to(r.warnings);
}

inline std::string to_json_string(const Report& r) { return Json(r).dump(2) + "\n"; }

inline Report report_from_json_string(const std::string& s) { return Json::parse(s).get<Report>(); }

namespace detail {

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string scalar_text(const Json& v) {
  if (v.is_number_float()) return fmt_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void render_value(std::ostringstream& out, const std::string& key, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (v.is_object()) {
    out << pad << key << ":\n";
    for (const auto& [k, sub] : v.items()) render_value(out, k, sub, indent + 2);
  } else if (v.is_array() && !v.empty() && v.front().is_object()) {
    out << pad << key << ":\n";
    for (std::size_t i = 0; i < v.size(); ++i) render_value(out, "[" + std::to_string(i) + "]", v[i], indent + 2);
  } else if (v.is_array()) {
    out << pad << key << ": [";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << scalar_text(v[i]);
    out << "]\n";
  } else {
    out << pad << key << ": " << scalar_text(v) << "\n";
  }
}

}  // namespace detail

inline std::string to_text(const Report& r) {
  std::ostringstream out;
  out << r.command << " (d=" << r.dimension << ", seed=" << r.seed << ")\n";
  for (const auto& [k, v] : r.parameters.items()) detail::render_value(out, k, v, 2);
  out << "results:\n";
  for (const auto& [k, v] : r.results.items()) detail::render_value(out, k, v, 2);
  out << "verdicts:\n";
  for (const auto& v : r.verdicts)
    out << "  [" << (v.passed ? "PASS" : "FAIL") << "] " << v.claim << ": measured " << detail::fmt_double(v.measured)
        << ", tol " << detail::fmt_double(v.tolerance) << " (" << v.criterion << ")\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  out << (r.all_passed() ? "ALL PASS" : "FAILED") << "\n";
  return out.str();
}

/// CSV of results["rows"] when present (an array of flat objects), otherwise
/// one key,value line per scalar result. Verdicts follow as comment lines.
inline std::string to_csv(const Report& r) {
  std::ostringstream out;
  const auto rows = r.results.find("rows");
  if (rows != r.results.end() && rows->is_array() && !rows->empty()) {
    bool first = true;
    for (const auto& [k, v] : rows->front().items()) {
      out << (first ? "" : ",") << k;
      first = false;
    }
    out << "\n";
    for (const auto& row : *rows) {
      first = true;
      for (const auto& [k, v] : row.items()) {
        out << (first ? "" : ",") << detail::scalar_text(v);
        first = false;
      }
      out << "\n";
    }
  } else {
    out << "key,value\n";
    for (const auto& [k, v] : r.results.items())
      if (v.is_primitive()) out << k << "," << detail::scalar_text(v) << "\n";
  }
  for (const auto& v : r.verdicts)
    out << "# " << v.claim << "," << (v.passed ? "pass" : "fail") << "," << detail::fmt_double(v.measured) << ","
        << detail::fmt_double(v.tolerance) << "\n";
  return out.str();
}

enum class Format { text, json, csv };

inline Format parse_format(const std::string& s) {
  if (s == "text") return Format::text;
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw std::invalid_argument("unknown format '" + s + "'");
}

inline std::string render(const Report& r, Format f) {
  switch (f) {
    case Format::text: return to_text(r);
    case Format::json: return to_json_string(r);
    case Format::csv: return to_csv(r);
  }
  return {};
}

}  // namespace ecoclone
