#pragma once

#include <map>
#include <string>
#include <vector>

#include "cartanv/harness.hpp"
#include "cartanv/zoo.hpp"

namespace cartanv::testing {

/// Certified built-in metric, loaded once per (label, dim).
inline const CartanStructure& metric(const std::string& label, int dim) {
  static std::map<std::pair<std::string, int>, CartanStructure> cache;
  auto it = cache.find({label, dim});
  if (it == cache.end()) it = cache.emplace(std::make_pair(label, dim), load_builtin(label, dim)).first;
  return it->second;
}

/// Admissible sample points drawn with the harness sampler.
inline std::vector<PhasePoint> points(const CartanStructure& K, int count, std::uint64_t seed = 42) {
  RunConfig cfg;
  cfg.samples = count;
  cfg.seed = seed;
  return sample_points(K, cfg).points;
}

inline PhasePoint point(std::initializer_list<double> x, std::initializer_list<double> p) {
  Eigen::VectorXd xv(static_cast<Eigen::Index>(x.size())), pv(static_cast<Eigen::Index>(p.size()));
  Eigen::Index i = 0;
  for (double v : x) xv(i++) = v;
  i = 0;
  for (double v : p) pv(i++) = v;
  return {xv, pv};
}

}  // namespace cartanv::testing
