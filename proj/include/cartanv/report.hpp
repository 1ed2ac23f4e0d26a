#pragma once

/// JSON and text rendering of a CheckReport.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cartanv/errors.hpp"
#include "cartanv/harness.hpp"

namespace cartanv {

/// Doubles are written in the shortest form that reads back to the same
/// bits (at most 17 significant digits); NaN becomes null.
inline nlohmann::ordered_json report_json(const CheckReport& rep) {
  using J = nlohmann::ordered_json;
  J out;
  out["engine"] = rep.engine;
  J metric;
  metric["label"] = rep.metric_label;
  metric["dim"] = rep.dim;
  metric["flags"] = {{"quadratic", rep.flags.quadratic},
                     {"x_independent", rep.flags.x_independent},
                     {"reinhart", rep.flags.reinhart}};
  if (!rep.expression.empty()) metric["expression"] = rep.expression;
  out["metric"] = metric;
  J config;
  config["seed"] = rep.config.seed;
  config["samples"] = rep.config.samples;
  config["tolerances"] = {{"ad", rep.config.tol_ad}, {"fd", rep.config.tol_fd}, {"curv", rep.config.tol_curv}};
  config["p_floor"] = rep.config.p_floor;
  config["x_box"] = rep.config.x_box;
  config["p_shell"] = {rep.config.p_shell_lo, rep.config.p_shell_hi};
  config["level"] = rep.config.level;
  out["config"] = config;
  out["sampling"] = {{"candidates", rep.candidates}, {"accepted", rep.accepted}};
  J checks = J::array();
  for (const auto& c : rep.checks) {
    J e;
    e["name"] = c.name;
    e["anchor"] = c.anchor;
    e["samples"] = c.samples;
    e["max_residual"] = std::isnan(c.max_residual) ? J(nullptr) : J(c.max_residual);
    e["tolerance"] = c.tolerance;
    e["verdict"] = c.pass ? "pass" : "fail";
    e["skipped"] = c.skipped;
    if (!c.worst_item.empty()) e["worst_item"] = c.worst_item;
    if (!c.first_skip_reason.empty()) e["skip_reason"] = c.first_skip_reason;
    checks.push_back(e);
  }
  out["checks"] = checks;
  if (!rep.error.empty()) out["error"] = rep.error;
  out["exit_code"] = rep.exit_code();
  out["wall_ms"] = rep.wall_ms;
  return out;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Aligned table, one row per check.
inline std::string report_text(const CheckReport& rep) {
  std::ostringstream os;
  os << rep.engine << "  metric " << rep.metric_label << "  dim " << rep.dim << "  seed " << rep.config.seed
     << "  samples " << rep.accepted << "/" << rep.candidates << " candidates\n";
  if (!rep.error.empty()) {
    os << "error: " << rep.error << "\n";
    return os.str();
  }
  std::size_t wn = 5, wa = 6;
  for (const auto& c : rep.checks) {
    wn = std::max(wn, c.name.size());
    wa = std::max(wa, c.anchor.size());
  }
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-*s  %7s  %7s  %11s  %11s  %s\n", static_cast<int>(wn), "check",
                static_cast<int>(wa), "anchor", "samples", "skipped", "residual", "tolerance", "verdict");
  os << line;
  for (const auto& c : rep.checks) {
    std::snprintf(line, sizeof line, "%-*s  %-*s  %7d  %7d  %11s  %11s  %s\n", static_cast<int>(wn),
                  c.name.c_str(), static_cast<int>(wa), c.anchor.c_str(), c.samples, c.skipped,
                  format_number(c.max_residual).c_str(), format_number(c.tolerance).c_str(),
                  c.pass ? "PASS" : "FAIL");
    os << line;
  }
  if (rep.wall_ms > 0.0) os << "wall " << format_number(rep.wall_ms) << " ms\n";
  return os.str();
}

inline std::string render(const CheckReport& rep, const std::string& format) {
  if (format == "json") return report_json(rep).dump(2) + "\n";
  return report_text(rep);
}

inline void emit_report(const CheckReport& rep, const std::string& format, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open report file '" + path + "'");
  f << render(rep, format);
  if (!f) throw ConfigError("failed writing report file '" + path + "'");
}

}  // namespace cartanv
