#include <gtest/gtest.h>

#include "cartanv/connections.hpp"
#include "cartanv/oracle.hpp"
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
  Stack(const CartanStructure& K, const PhasePoint& z) : geo(K, z), fr(geo), L(fr) {}
};

}  // namespace

TEST(Vranceanu, TorsionAndCoefficients) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 30)) {
      const Stack s(K, z);
      const Vranceanu V(s.fr);
      EXPECT_LE(vranceanu_torsion_suite(V).max(), 1e-9) << label;
      EXPECT_LE(vranceanu_coefficient_suite(V).max(), 1e-9) << label;
    }
  }
}

TEST(Vranceanu, TorsionVanishesForFlatQuadratic) {
  const auto& K = metric("euclidean", 3);
  for (const auto& z : points(K, 5)) {
    const Stack s(K, z);
    EXPECT_EQ(Vranceanu(s.fr).coefficients().torsion.max_abs(), 0.0);
  }
}

TEST(Vranceanu, DCoefficientAgainstOracle) {
  for (const char* label : {"quadratic-diag", "randers-dual"}) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 5)) {
      const Stack s(K, z);
      const VranceanuConnection c = Vranceanu(s.fr).coefficients();
      FDOracle fd(K.validity);
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          const FDOracle::Fn f = [&K, j, k](const PhasePoint& w) { return nonlinear_connection(K, w).N(j, k); };
          for (int i = 0; i < 3; ++i) {
            std::vector<int> e(6, 0);
            e[3 + i] = 1;
            const double ref = -fd.derivative(f, z, e);
            EXPECT_NEAR(c.D_coeff(i, j, k), ref, 1e-6 * (1.0 + std::abs(ref))) << label;
          }
        }
      }
    }
  }
}

TEST(Reinhart, VerdictsSeparate) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 20)) {
      const double r = reinhart_residual(K, z);
      if (K.flags.reinhart) {
        EXPECT_LE(r, kReinhartThreshold * 1e-3) << label;
        EXPECT_TRUE(reinhart_verdict(r));
      } else {
        EXPECT_GE(r, kReinhartThreshold * 1e3) << label;
        EXPECT_FALSE(reinhart_verdict(r));
      }
    }
  }
}

TEST(Reinhart, ResidualScalesInverselyWithMomentum) {
  const auto& K = metric("randers-dual", 2);
  for (const auto& z : points(K, 10)) {
    const double r1 = reinhart_residual(K, z);
    const double r2 = reinhart_residual(K, z.scaled(2.0));
    EXPECT_NEAR(r2, 0.5 * r1, 1e-9 * r1);
  }
}

TEST(Vaisman, AxiomsOnAllMetrics) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 30)) {
      const Stack s(K, z);
      const Vaisman V(s.L);
      EXPECT_LE(vaisman_axiom_certificate(V).max(), 1e-9) << label;
      EXPECT_LE(connection_comparison(Vranceanu(s.fr), V).max(), 1e-9) << label;
    }
  }
}

TEST(Vaisman, CertificateDetectsPerturbation) {
  const auto& K = metric("randers-dual", 3);
  for (const auto& z : points(K, 5)) {
    const Stack s(K, z);
    EXPECT_GT(vaisman_perturbation_probe(s.L, 0, 1, 1, 1e-3), 1e-4);
    EXPECT_LE(vaisman_perturbation_probe(s.L, 0, 1, 1, 0.0), 1e-9);
  }
}

// For quadratic metrics dbar^a(g^bc) = 0, which fixes the s coefficients.
TEST(Vaisman, QuadraticClosedForms) {
  for (const char* label : {"euclidean", "quadratic-diag", "quadratic-offdiag"}) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 10)) {
      const Stack s(K, z);
      const VaismanConnection c = Vaisman(s.L).coefficients();
      const LiouvilleData d = s.L.data();
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          for (int e = 0; e < 2; ++e) {
            const double expect = e == a ? -d.t(b) : 0.0;
            EXPECT_NEAR(c.s_coeff(b, a, e), expect, 1e-10) << label;
          }
        }
      }
    }
  }
}

TEST(Vaisman, SingularBlockRejected) {
  const Stack s(metric("euclidean", 2), point({0.0, 0.0}, {1.0, 1e-3}));
  EXPECT_THROW(Vaisman v(s.L), AdaptedBasisDegenerate);
}
