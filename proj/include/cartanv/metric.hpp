#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/jet.hpp"

namespace cartanv {

/// A point (x, p) of the cotangent bundle with the zero section removed.
struct PhasePoint {
  Eigen::VectorXd x;
  Eigen::VectorXd p;

  PhasePoint() = default;
  PhasePoint(Eigen::VectorXd x_, Eigen::VectorXd p_) : x(std::move(x_)), p(std::move(p_)) {
    if (x.size() != p.size()) throw ConfigError("x and p must have equal length");
  }

  [[nodiscard]] int dim() const { return static_cast<int>(x.size()); }

  /// Coordinates in the order (x_1..x_n, p_1..p_n).
  [[nodiscard]] std::vector<double> coords() const {
    std::vector<double> z(x.data(), x.data() + x.size());
    z.insert(z.end(), p.data(), p.data() + p.size());
    return z;
  }

  static PhasePoint from_coords(std::span<const double> z) {
    const auto n = static_cast<Eigen::Index>(z.size() / 2);
    return {Eigen::Map<const Eigen::VectorXd>(z.data(), n),
            Eigen::Map<const Eigen::VectorXd>(z.data() + n, n)};
  }

  /// Same base point, momenta scaled by lambda.
  [[nodiscard]] PhasePoint scaled(double lambda) const { return {x, lambda * p}; }

  /// |p_n| >= floor * |p|, the chart condition for the reduced vertical basis.
  [[nodiscard]] bool last_momentum_admissible(double floor) const {
    return std::abs(p(p.size() - 1)) >= floor * p.norm();
  }
};

/// A scalar field on phase space evaluatable both on doubles and on jets.
/// The two instantiations come from one generic callable, so they share the
/// formula but not the arithmetic.
class ScalarField {
 public:
  using RealFn = std::function<double(std::span<const double>, std::span<const double>)>;
  using JetFn = std::function<Jet(std::span<const Jet>, std::span<const Jet>)>;

  ScalarField() = default;
  ScalarField(RealFn real, JetFn jet) : real_(std::move(real)), jet_(std::move(jet)) {}

  /// `f(x, p)` must be callable with spans of double and spans of Jet.
  template <class F>
  static ScalarField from(F f) {
    return ScalarField(
        [f](std::span<const double> x, std::span<const double> p) { return f(x, p); },
        [f](std::span<const Jet> x, std::span<const Jet> p) { return f(x, p); });
  }

  double operator()(std::span<const double> x, std::span<const double> p) const {
    return real_(x, p);
  }
  Jet operator()(std::span<const Jet> x, std::span<const Jet> p) const { return jet_(x, p); }

  double operator()(const PhasePoint& z) const {
    return real_(std::span<const double>(z.x.data(), z.x.size()),
                 std::span<const double>(z.p.data(), z.p.size()));
  }

  /// Convenience: evaluate on 2n coordinate jets (x first).
  [[nodiscard]] Jet on_coordinates(std::span<const Jet> vars) const {
    const auto n = vars.size() / 2;
    return jet_(vars.subspan(0, n), vars.subspan(n, n));
  }

  [[nodiscard]] bool empty() const { return !real_; }

 private:
  RealFn real_;
  JetFn jet_;
};

struct MetricFlags {
  bool quadratic = false;      // K^2 quadratic in p: Cartan tensor vanishes
  bool x_independent = false;  // no position dependence: nonlinear connection vanishes
  bool reinhart = false;       // g^{ij} momentum-independent
};

/// Validity region of a metric: a box for x and an optional momentum cone
/// |p_i| >= cone * |p| for every i.
struct ValidityDomain {
  double x_bound = 1e300;
  double cone = 0.0;

  [[nodiscard]] bool contains(const PhasePoint& z) const {
    if (z.p.norm() == 0.0) return false;
    if (z.x.cwiseAbs().maxCoeff() > x_bound) return false;
    if (cone > 0.0) {
      const double pn = z.p.norm();
      for (int i = 0; i < z.p.size(); ++i) {
        if (std::abs(z.p(i)) < cone * pn) return false;
      }
    }
    return true;
  }
};

/// A fundamental function K(x, p), stored as K^2. Positive homogeneity of
/// degree two in p is certified at load, never assumed.
struct CartanStructure {
  std::string label;
  int dim = 0;
  ScalarField k_squared;
  ValidityDomain validity;
  MetricFlags flags;
  std::string expression;  // source text for user metrics, empty for built-ins

  [[nodiscard]] bool valid_at(const PhasePoint& z) const {
    return z.dim() == dim && validity.contains(z);
  }

  [[nodiscard]] double K(const PhasePoint& z) const { return std::sqrt(k_squared(z)); }

  /// Jet of K^2 at z with the requested derivative content.
  [[nodiscard]] Jet k_squared_jet(const PhasePoint& z, const DerivSpec& spec) const {
    const auto coords = z.coords();
    return lift([&](std::span<const Jet> v) { return k_squared.on_coordinates(v); },
                std::span<const double>(coords), spec);
  }

  /// The same point moved radially onto the level set K = c.
  [[nodiscard]] PhasePoint on_level(const PhasePoint& z, double c) const {
    return z.scaled(c / K(z));
  }
};

using MetricDescriptor = CartanStructure;

}  // namespace cartanv
