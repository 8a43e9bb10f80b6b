#pragma once

// Check reports and their JSON-lines / CSV / markdown renderings.

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chernlab/chern.hpp"

namespace chernlab {

inline constexpr const char* kVersion = "chernlab 1.0.0";

// relative: pass iff max_rel_err <= tol. absolute: pass iff max_abs_err <= tol.
// negative: a control that must be rejected; pass iff max_rel_err > tol.
enum class CheckMode { Relative, Absolute, Negative };

inline const char* to_string(CheckMode m) {
  switch (m) {
    case CheckMode::Relative: return "relative";
    case CheckMode::Absolute: return "absolute";
    case CheckMode::Negative: return "negative";
  }
  return "relative";
}

struct CheckReport {
  std::string check;
  std::string manifold;
  std::uint64_t seed = 0;
  int samples = 0;
  double max_abs_err = 0;
  double max_rel_err = 0;
  double tol = 0;
  CheckMode mode = CheckMode::Relative;
  bool pass = false;
  double seconds = 0;
  std::map<std::string, double> params;  // extra numeric parameters
  std::string note;

  void finalize() {
    switch (mode) {
      case CheckMode::Relative: pass = max_rel_err <= tol; break;
      case CheckMode::Absolute: pass = max_abs_err <= tol; break;
      case CheckMode::Negative: pass = max_rel_err > tol; break;
    }
    if (!std::isfinite(max_abs_err) || !std::isfinite(max_rel_err)) pass = mode == CheckMode::Negative;
  }
};

namespace detail {

inline std::string num17(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace detail

// One JSON object per report; numbers with 17 significant digits. With
// include_timing = false the "seconds" field is omitted so runs can be
// compared byte for byte.
inline std::string to_jsonl(const CheckReport& r, bool include_timing = true) {
  std::ostringstream os;
  os << "{\"check\":" << detail::json_string(r.check) << ",\"manifold\":" << detail::json_string(r.manifold)
     << ",\"params\":{\"seed\":" << r.seed << ",\"samples\":" << r.samples
     << ",\"mode\":" << detail::json_string(to_string(r.mode));
  for (const auto& [k, v] : r.params) os << "," << detail::json_string(k) << ":" << detail::num17(v);
  if (!r.note.empty()) os << ",\"note\":" << detail::json_string(r.note);
  os << "},\"max_abs_err\":" << detail::num17(r.max_abs_err) << ",\"max_rel_err\":" << detail::num17(r.max_rel_err)
     << ",\"tol\":" << detail::num17(r.tol) << ",\"pass\":" << (r.pass ? "true" : "false");
  if (include_timing) os << ",\"seconds\":" << detail::num17(r.seconds);
  os << ",\"convention\":" << detail::json_string(kConventionHeader) << ",\"version\":" << detail::json_string(kVersion)
     << "}";
  return os.str();
}

inline CheckReport from_json(const nlohmann::json& j) {
  CheckReport r;
  r.check = j.at("check").get<std::string>();
  r.manifold = j.at("manifold").get<std::string>();
  auto num = [](const nlohmann::json& v) {
    if (v.is_null()) return std::nan("");
    return v.get<double>();
  };
  r.max_abs_err = num(j.at("max_abs_err"));
  r.max_rel_err = num(j.at("max_rel_err"));
  r.tol = num(j.at("tol"));
  r.pass = j.at("pass").get<bool>();
  if (j.contains("seconds")) r.seconds = num(j.at("seconds"));
  if (j.contains("params")) {
    const auto& p = j.at("params");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (it.key() == "seed") r.seed = it.value().get<std::uint64_t>();
      else if (it.key() == "samples") r.samples = it.value().get<int>();
      else if (it.key() == "mode") {
        const auto m = it.value().get<std::string>();
        r.mode = m == "absolute" ? CheckMode::Absolute : m == "negative" ? CheckMode::Negative : CheckMode::Relative;
      } else if (it.key() == "note") r.note = it.value().get<std::string>();
      else if (it.value().is_number()) r.params[it.key()] = it.value().get<double>();
    }
  }
  return r;
}

inline std::vector<CheckReport> parse_jsonl(std::istream& in) {
  std::vector<CheckReport> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline void write_csv(std::ostream& os, const std::vector<CheckReport>& rs) {
  os << "check,manifold,seed,samples,mode,max_abs_err,max_rel_err,tol,pass,seconds\n";
  for (const auto& r : rs)
    os << r.check << ',' << r.manifold << ',' << r.seed << ',' << r.samples << ',' << to_string(r.mode) << ','
       << detail::num17(r.max_abs_err) << ',' << detail::num17(r.max_rel_err) << ',' << detail::num17(r.tol) << ','
       << (r.pass ? "true" : "false") << ',' << detail::num17(r.seconds) << '\n';
}

inline void write_markdown(std::ostream& os, const std::vector<CheckReport>& rs) {
  os << "| check | manifold | mode | max abs err | max rel err | tol | result |\n";
  os << "|---|---|---|---|---|---|---|\n";
  char buf[256];
  for (const auto& r : rs) {
    std::snprintf(buf, sizeof buf, "| %s | %s | %s | %.3e | %.3e | %.1e | %s |\n", r.check.c_str(), r.manifold.c_str(),
                  to_string(r.mode), r.max_abs_err, r.max_rel_err, r.tol, r.pass ? "PASS" : "FAIL");
    os << buf;
  }
}

inline bool all_pass(const std::vector<CheckReport>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

}  // namespace chernlab
