#include <gtest/gtest.h>

#include "cartanv/indicatrix.hpp"
#include "support.hpp"

using namespace cartanv;
using cartanv::testing::metric;
using cartanv::testing::point;
using cartanv::testing::points;

namespace {

struct Stack {
  Geometry geo;
  PhaseFrames fr;
  Liouville L;
  IndicatrixFrame I;
  Stack(const CartanStructure& K, const PhasePoint& z, double c = 1.0)
      : geo(K, indicatrix_point(K, z, c)), fr(geo), L(fr), I(L) {}
};

double parity(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

}  // namespace

TEST(Indicatrix, CRStructure) {
  for (const auto& label : builtin_labels()) {
    for (int n : {2, 3}) {
      const auto& K = metric(label, n);
      for (const auto& z : points(K, 20)) EXPECT_LE(cr_certificate(Stack(K, z).I).max(), 1e-9) << label << n;
    }
  }
}

TEST(Indicatrix, TangentFrame) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 20)) {
      for (double c : {0.5, 1.0, 2.0}) {
        const Stack s(K, z, c);
        EXPECT_NEAR(s.I.level(), c, 1e-14);
        EXPECT_LE(indicatrix_tangency(s.I).max(), 1e-10) << label;
      }
    }
  }
}

// The relation nu = (-1)^{n-1}/(n-1)! (i*Omega)^{n-1} as stated misses the
// factor det h = det G(dbar^a, dbar^b) and the sign (-1)^{m(m+1)/2}, m = n-1.
// The test pins the measured discrepancy to that analysis.
TEST(Indicatrix, LiteralNuRelationMissesDetH) {
  for (const auto& label : builtin_labels()) {
    for (int n : {2, 3, 4}) {
      const auto& K = metric(label, n);
      const int m = n - 1;
      for (const auto& z : points(K, 5)) {
        const Stack s(K, z);
        const ResidualRecord lit = nu_form_identity(s.I);
        const double deth = reduced_gram(s.I).determinant();
        EXPECT_NEAR(lit.get("nu_main_tuple"), 1.0, 1e-12);
        const double expect = parity(m) * parity(m * (m + 1) / 2) * deth;
        EXPECT_NEAR(lit.get("rhs_main_tuple"), expect, 1e-10 * (1.0 + std::abs(expect))) << label << n;
        EXPECT_LE(lit.get("xi_annihilated"), 1e-12);
        EXPECT_LE(lit.get("alternation"), 1e-12);
      }
    }
  }
}

TEST(Indicatrix, EuclideanDetH) {
  const Stack s(metric("euclidean", 2), point({0.0, 0.0}, {0.6, 0.8}));
  EXPECT_NEAR(reduced_gram(s.I).determinant(), 0.64, 1e-14);
}

TEST(Indicatrix, NormalizedNuRelation) {
  for (const auto& label : builtin_labels()) {
    for (int n : {2, 3, 4}) {
      const auto& K = metric(label, n);
      for (const auto& z : points(K, n == 4 ? 5 : 20)) {
        EXPECT_LE(nu_form_normalized(Stack(K, z).I).max(), 1e-10) << label << n;
      }
    }
  }
}

TEST(Indicatrix, PullbackClosed) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 20)) EXPECT_LE(pullback_closedness(Stack(K, z).I).max(), 1e-8) << label;
  }
}

TEST(Indicatrix, HolomorphicDistributionMinimal) {
  for (const auto& label : builtin_labels()) {
    for (int n : {2, 3}) {
      const auto& K = metric(label, n);
      for (const auto& z : points(K, 20)) {
        EXPECT_LE(holomorphic_minimality(Stack(K, z).I).max(), 1e-6) << label << n;
      }
    }
  }
}

// The pairing G(nabla_X Y, xi*/K) on D is not identically zero: it lives in
// the blocks coupling J dbar with dbar, while the diagonal blocks vanish.
TEST(Indicatrix, SecondFundamentalFormNotIdenticallyZero) {
  const auto& K = metric("randers-dual", 3);
  double coupling = 0.0, diagonal = 0.0;
  for (const auto& z : points(K, 10)) {
    const Stack s(K, z);
    const auto& T = s.I.tangent();
    const int m = s.I.reduced_dim();
    const Tensor3 gam = ambient_christoffel(s.fr);
    const Eigen::VectorXd nu = T[s.I.xi_index()].value() / s.I.level();
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const auto& Ja = T[a];
        const auto& Jb = T[b];
        const auto& da = T[m + 1 + a];
        const auto& db = T[m + 1 + b];
        coupling = std::max(coupling, std::abs(ambient_cov_pairing(gam, s.I.G_natural(), da, Jb, nu)));
        diagonal = std::max({diagonal, std::abs(ambient_cov_pairing(gam, s.I.G_natural(), Ja, Jb, nu)),
                             std::abs(ambient_cov_pairing(gam, s.I.G_natural(), da, db, nu))});
      }
    }
    EXPECT_LE(holomorphic_minimality(s.I).get("trace"), 1e-10);
  }
  EXPECT_GT(coupling, 1e-3);
  EXPECT_LE(diagonal, 1e-12);
}

TEST(Indicatrix, XiLineIntegrable) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    Rng rng(41);
    for (const auto& z : points(K, 20)) EXPECT_LE(xi_line_integrable(Stack(K, z).I, rng).max(), 1e-9) << label;
  }
}

TEST(Indicatrix, RejectsNonPositiveLevel) {
  const auto& K = metric("euclidean", 2);
  EXPECT_THROW(indicatrix_point(K, point({0, 0}, {1, 1}), 0.0), ConfigError);
}

TEST(Indicatrix, Subsets) {
  const auto s = subsets(4, 2);
  ASSERT_EQ(s.size(), 6U);
  EXPECT_EQ(s.front(), (std::vector<int>{0, 1}));
  EXPECT_EQ(s.back(), (std::vector<int>{2, 3}));
}
