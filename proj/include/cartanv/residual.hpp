#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cartanv {

/// Named residuals of one suite at one point. Entries added under the same
/// name keep their maximum. Notes are diagnostics that carry no verdict.
struct ResidualRecord {
  std::vector<std::pair<std::string, double>> items;
  std::vector<std::pair<std::string, double>> notes;

  void add(const std::string& name, double value) { upsert(items, name, value); }
  void note(const std::string& name, double value) { upsert(notes, name, value); }

  void merge(const ResidualRecord& other, const std::string& prefix = "") {
    for (const auto& [k, v] : other.items) add(prefix + k, v);
    for (const auto& [k, v] : other.notes) note(prefix + k, v);
  }

  [[nodiscard]] double max() const {
    double m = 0.0;
    for (const auto& [k, v] : items) {
      if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
      m = std::max(m, v);
    }
    return m;
  }

  [[nodiscard]] double get(const std::string& name) const {
    for (const auto& [k, v] : items) {
      if (k == name) return v;
    }
    for (const auto& [k, v] : notes) {
      if (k == name) return v;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  static void upsert(std::vector<std::pair<std::string, double>>& list, const std::string& name,
                     double value) {
    for (auto& [k, v] : list) {
      if (k == name) {
        if (std::isnan(value) || value > v) v = value;
        return;
      }
    }
    list.emplace_back(name, value);
  }
};

}  // namespace cartanv
