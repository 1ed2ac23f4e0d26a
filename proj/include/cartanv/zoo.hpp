#pragma once

/// Built-in Cartan structures and loading of user metrics from expressions.

#include <span>
#include <string>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/expr.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/metric.hpp"

namespace cartanv {

namespace zoo {

template <class S>
S sum_squares(std::span<const S> v) {
  S acc = v[0] * v[0];
  for (std::size_t i = 1; i < v.size(); ++i) acc += v[i] * v[i];
  return acc;
}

/// K^2 = sum p_i^2
struct Euclidean {
  template <class S>
  S operator()(std::span<const S> /*x*/, std::span<const S> p) const {
    return sum_squares(p);
  }
};

/// K^2 = sum (1 + eps x_i^2) p_i^2
struct QuadraticDiag {
  double eps = 0.3;
  template <class S>
  S operator()(std::span<const S> x, std::span<const S> p) const {
    S acc = (1.0 + eps * x[0] * x[0]) * p[0] * p[0];
    for (std::size_t i = 1; i < p.size(); ++i) acc += (1.0 + eps * x[i] * x[i]) * p[i] * p[i];
    return acc;
  }
};

/// K^2 = a^{ij}(x) p_i p_j with
/// a^{ij} = delta^{ij} + c (1 - delta^{ij}) + e x_i x_j / (1 + |x|^2).
/// The constant part has eigenvalues 1 - c and 1 + (n - 1) c, and the
/// rank-one part is positive semidefinite.
struct QuadraticOffdiag {
  double coupling = 0.1;
  double bend = 0.2;
  template <class S>
  S operator()(std::span<const S> x, std::span<const S> p) const {
    S total = p[0];
    S xp = x[0] * p[0];
    for (std::size_t i = 1; i < p.size(); ++i) {
      total += p[i];
      xp += x[i] * p[i];
    }
    const S quad = (1.0 - coupling) * sum_squares(p) + coupling * total * total;
    return quad + bend * xp * xp / (1.0 + sum_squares(x));
  }
};

/// Cotangent Randers metric K = sqrt(a^{ij} p_i p_j) + b^i p_i with
/// a^{ij} = (1 + eps x_i^2) delta^{ij} and
/// b^i = b0 delta^{i1} + c x_i / (1 + |x|^2).
/// Since a >= I and |x| / (1 + |x|^2) <= 1/2, |b|_a <= b0 + c / 2.
struct RandersDual {
  double eps = 0.3;
  double b0 = 0.3;
  double c = 0.1;
  template <class S>
  S operator()(std::span<const S> x, std::span<const S> p) const {
    const S alpha2 = QuadraticDiag{eps}(x, p);
    const S denom = 1.0 + sum_squares(x);
    S beta = b0 * p[0] + c * x[0] * p[0] / denom;
    for (std::size_t i = 1; i < p.size(); ++i) beta += c * x[i] * p[i] / denom;
    S alpha;
    if constexpr (std::is_same_v<S, double>) {
      alpha = std::sqrt(alpha2);
    } else {
      alpha = sqrt(alpha2);
    }
    const S k = alpha + beta;
    return k * k;
  }
};

/// K^2 = sqrt(sum p_i^4)
struct QuarticRoot {
  template <class S>
  S operator()(std::span<const S> /*x*/, std::span<const S> p) const {
    S acc = ipow(p[0], 4);
    for (std::size_t i = 1; i < p.size(); ++i) acc += ipow(p[i], 4);
    if constexpr (std::is_same_v<S, double>) {
      return std::sqrt(acc);
    } else {
      return sqrt(acc);
    }
  }
};

}  // namespace zoo

inline const std::vector<std::string>& builtin_labels() {
  static const std::vector<std::string> labels = {"euclidean", "quadratic-diag",
                                                  "quadratic-offdiag", "randers-dual",
                                                  "quartic-root"};
  return labels;
}

/// Built-in metric by label. Built-ins are certified by the test suite; use
/// load_builtin for a certified copy at runtime.
inline CartanStructure builtin(const std::string& label, int dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw ConfigError("dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  }
  CartanStructure m;
  m.label = label;
  m.dim = dim;
  if (label == "euclidean") {
    m.k_squared = ScalarField::from(zoo::Euclidean{});
    m.flags = {true, true, true};
  } else if (label == "quadratic-diag") {
    m.k_squared = ScalarField::from(zoo::QuadraticDiag{});
    m.flags = {true, false, true};
  } else if (label == "quadratic-offdiag") {
    m.k_squared = ScalarField::from(zoo::QuadraticOffdiag{});
    m.flags = {true, false, true};
  } else if (label == "randers-dual") {
    m.k_squared = ScalarField::from(zoo::RandersDual{});
    m.flags = {false, false, false};
  } else if (label == "quartic-root") {
    m.k_squared = ScalarField::from(zoo::QuarticRoot{});
    m.flags = {false, true, false};
    m.validity.cone = 0.2;
  } else {
    throw UnknownMetric("unknown metric '" + label + "'");
  }
  return m;
}

inline CartanStructure load_builtin(const std::string& label, int dim) {
  CartanStructure m = builtin(label, dim);
  certify_metric(m);
  return m;
}

/// User metric from a K^2 expression. Flags are not trusted from the user:
/// they stay false, and homogeneity is certified before returning.
inline CartanStructure from_expression(const std::string& text, int dim,
                                       const std::string& label = "user") {
  const expr::Expression e = expr::parse(text);
  if (e.max_index > dim) {
    throw ConfigError("expression uses coordinate index " + std::to_string(e.max_index) +
                      " but dimension is " + std::to_string(dim));
  }
  if (dim < 2 || dim > kMaxDim) {
    throw ConfigError("dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  }
  CartanStructure m;
  m.label = label;
  m.dim = dim;
  m.expression = e.text;
  const expr::NodePtr root = e.root;
  m.k_squared = ScalarField(
      [root](std::span<const double> x, std::span<const double> p) {
        return expr::evaluate<double>(*root, x, p);
      },
      [root](std::span<const Jet> x, std::span<const Jet> p) {
        return expr::evaluate<Jet>(*root, x, p);
      });
  certify_metric(m);
  return m;
}

inline CartanStructure load_metric_file(const std::string& path, int dim) {
  const expr::Expression e = expr::parse_file(path);
  return from_expression(e.text, dim, path);
}

}  // namespace cartanv
