#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cartanv/jet.hpp"

using namespace cartanv;

namespace {

std::vector<int> mi(std::initializer_list<int> e) { return std::vector<int>(e); }

// One x and one p coordinate: multi-indices are (x1, p1).
Jet lift1(double x, double p, const DerivSpec& spec, auto f) {
  const std::vector<double> z = {x, p};
  return lift([&](std::span<const Jet> v) { return f(v[0], v[1]); }, z, spec);
}

}  // namespace

TEST(Jet, SquareOfMomentum) {
  const Jet j = lift1(0.0, 3.0, DerivSpec::momenta(2), [](const Jet&, const Jet& p) { return p * p; });
  EXPECT_DOUBLE_EQ(j.value(), 9.0);
  EXPECT_DOUBLE_EQ(j.derivative(mi({0, 1})), 6.0);
  EXPECT_DOUBLE_EQ(j.derivative(mi({0, 2})), 2.0);
}

TEST(Jet, EuclideanNormGradient) {
  const std::vector<double> z = {0.0, 0.0, 3.0, 4.0};
  const Jet j = lift([](std::span<const Jet> v) { return sqrt(v[2] * v[2] + v[3] * v[3]); }, z,
                     DerivSpec::momenta(1));
  EXPECT_DOUBLE_EQ(j.value(), 5.0);
  EXPECT_NEAR(j.derivative(mi({0, 0, 1, 0})), 0.6, 1e-15);
  EXPECT_NEAR(j.derivative(mi({0, 0, 0, 1})), 0.8, 1e-15);
}

TEST(Jet, MixedBilinear) {
  const Jet j = lift1(0.7, -1.3, DerivSpec{1, 1, 2}, [](const Jet& x, const Jet& p) { return x * p; });
  EXPECT_DOUBLE_EQ(j.derivative(mi({1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(j.derivative(mi({1, 0})), -1.3);
  EXPECT_DOUBLE_EQ(j.derivative(mi({0, 1})), 0.7);
}

TEST(Jet, SqrtOfSquareIsAbs) {
  const Jet j = lift1(0.0, 2.0, DerivSpec::momenta(3), [](const Jet&, const Jet& p) { return sqrt(p * p); });
  EXPECT_NEAR(j.value(), 2.0, 1e-15);
  EXPECT_NEAR(j.derivative(mi({0, 1})), 1.0, 1e-15);
  EXPECT_NEAR(j.derivative(mi({0, 2})), 0.0, 1e-15);
  EXPECT_NEAR(j.derivative(mi({0, 3})), 0.0, 1e-15);
}

TEST(Jet, GeometricSeries) {
  const Jet j = lift1(0.0, 0.0, DerivSpec::momenta(3), [](const Jet&, const Jet& p) { return 1.0 / (1.0 + p); });
  EXPECT_DOUBLE_EQ(j.coeff(mi({0, 0})), 1.0);
  EXPECT_DOUBLE_EQ(j.coeff(mi({0, 1})), -1.0);
  EXPECT_DOUBLE_EQ(j.coeff(mi({0, 2})), 1.0);
  EXPECT_DOUBLE_EQ(j.coeff(mi({0, 3})), -1.0);
}

TEST(Jet, PolynomialExactness) {
  // f = x1^2 p1^2 + 3 x1 p2^3 - p1 p2 + 5 p2^4
  const std::vector<double> z = {0.4, -0.2, 1.1, -0.7};
  const Jet j = lift(
      [](std::span<const Jet> v) {
        const Jet& x1 = v[0];
        const Jet& p1 = v[2];
        const Jet& p2 = v[3];
        return x1 * x1 * p1 * p1 + 3.0 * x1 * ipow(p2, 3) - p1 * p2 + 5.0 * ipow(p2, 4);
      },
      z, DerivSpec::full());
  const double x1 = 0.4, p1 = 1.1, p2 = -0.7;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  EXPECT_LE(rel(j.value(), x1 * x1 * p1 * p1 + 3 * x1 * p2 * p2 * p2 - p1 * p2 + 5 * std::pow(p2, 4)), 1e-14);
  EXPECT_LE(rel(j.derivative(mi({1, 0, 1, 0})), 4 * x1 * p1), 1e-14);
  EXPECT_LE(rel(j.derivative(mi({2, 0, 2, 0})), 4.0), 1e-14);
  EXPECT_LE(rel(j.derivative(mi({1, 0, 0, 3})), 18.0), 1e-14);
  EXPECT_LE(rel(j.derivative(mi({0, 0, 0, 4})), 120.0), 1e-14);
  EXPECT_LE(rel(j.derivative(mi({0, 0, 1, 1})), -1.0), 1e-14);
  EXPECT_LE(rel(j.derivative(mi({0, 0, 0, 2})), 18 * x1 * p2 + 60 * p2 * p2), 1e-14);
}

TEST(Jet, ProductThenQuotientRecovers) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<double> z = {u(rng), u(rng), u(rng), u(rng)};
  const auto layout = JetLayout::get(2, DerivSpec::full());
  for (int trial = 0; trial < 20; ++trial) {
    const auto vars = coordinate_jets(layout, z);
    Jet a = Jet::constant(layout, u(rng));
    Jet b = Jet::constant(layout, 0.0);
    for (int k = 0; k < 4; ++k) {
      a += u(rng) * vars[k] * vars[(k + trial) % 4];
      b += u(rng) * vars[k];
    }
    b += 0.1 + std::abs(u(rng)) + std::abs(b.value());
    const Jet r = (a * b) / b;
    // Division amplifies rounding by at most (|b|_1 / |b_0|)^order.
    double b1 = 0.0, a1 = 0.0;
    for (double c : b.coefficients()) b1 += std::abs(c);
    for (double c : a.coefficients()) a1 += std::abs(c);
    const double tol = 1e-15 * a1 * std::pow(b1 / std::abs(b.value()), 4);
    for (std::size_t k = 0; k < r.coefficients().size(); ++k) {
      EXPECT_NEAR(r.coefficients()[k], a.coefficients()[k], tol);
    }
  }
}

TEST(Jet, LeibnizConsistency) {
  const std::vector<double> z = {0.3, -0.5, 0.8, 1.2};
  const DerivSpec spec = DerivSpec::full();
  auto f = [](std::span<const Jet> v) { return sqrt(1.0 + v[0] * v[0] + v[2] * v[2]); };
  auto g = [](std::span<const Jet> v) { return 1.0 / (2.0 + v[1] * v[3] + v[3] * v[3]); };
  const Jet fg = lift([&](std::span<const Jet> v) { return f(v) * g(v); }, z, spec);
  const Jet prod = lift(f, z, spec) * lift(g, z, spec);
  for (std::size_t k = 0; k < fg.coefficients().size(); ++k) {
    EXPECT_NEAR(fg.coefficients()[k], prod.coefficients()[k], 1e-13);
  }
}

TEST(Jet, PrecisionDropsWithDifferentiation) {
  const Jet j = lift1(0.0, 1.0, DerivSpec::momenta(2), [](const Jet&, const Jet& p) { return p * p * p; });
  const Jet d2 = j.partial(1).partial(1);
  EXPECT_DOUBLE_EQ(d2.value(), 6.0);
  EXPECT_THROW((void)d2.coeff(mi({0, 1})), OrderError);
  EXPECT_THROW((void)d2.partial(1).value(), OrderError);
}

TEST(Jet, Errors) {
  EXPECT_THROW(lift1(0.0, 0.0, DerivSpec::momenta(2), [](const Jet&, const Jet& p) { return 1.0 / p; }),
               SingularityError);
  EXPECT_THROW(lift1(0.0, -1.0, DerivSpec::momenta(2), [](const Jet&, const Jet& p) { return sqrt(p); }),
               DomainError);
  EXPECT_THROW((DerivSpec{5, 0, 5}.validate(2)), ConfigError);
  EXPECT_THROW((DerivSpec{2, 0, 2, 0u}.validate(2)), ConfigError);
}
