#include <gtest/gtest.h>

#include "cartanv/fiber.hpp"
#include "cartanv/oracle.hpp"
#include "cartanv/subfoliation.hpp"
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
  FiberGeometry F;
  Stack(const CartanStructure& K, const PhasePoint& z) : geo(K, z), fr(geo), L(fr), F(L) {}
};

Eigen::VectorXd direction(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

TEST(Fiber, ConnectionSuites) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    Rng rng(5);
    for (const auto& z : points(K, 40)) {
      const Stack s(K, z);
      EXPECT_LE(fiber_connection_suite(s.F).max(), 1e-9) << label;
      const VectorField X = random_vertical(s.fr, rng);
      const VectorField Y = random_vertical(s.fr, rng);
      const VectorField Z = random_vertical(s.fr, rng);
      EXPECT_LE(levi_civita_suite(s.F, X, Y, Z).max(), 1e-9) << label;
      EXPECT_LE(covariant_identities(s.F, X, Y).max(), 1e-9) << label;
    }
  }
}

TEST(Fiber, EuclideanRadialField) {
  const Stack s(metric("euclidean", 2), point({0.1, 0.3}, {0.6, -1.1}));
  Rng rng(9);
  const VectorField X = random_vertical(s.fr, rng);
  const VectorField d = s.F.cov(X, s.L.C_star()) - X;
  EXPECT_LE(d.value().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Fiber, LiouvilleCurvesAreGeodesics) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 40)) EXPECT_LE(geodesic_residual(Stack(K, z).F), 1e-10) << label;
  }
}

TEST(Fiber, UmbilicOnSeveralLevels) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 20)) {
      for (double c : {0.5, 1.0, 2.0}) {
        const Stack s(K, K.on_level(z, c));
        EXPECT_LE(umbilic_suite(s.F).max(), 1e-10) << label << " level " << c;
      }
    }
  }
}

TEST(Fiber, FlatSectionsQuadratic) {
  for (const char* label : {"euclidean", "quadratic-diag", "quadratic-offdiag"}) {
    const auto& K = metric(label, 3);
    Rng rng(13);
    for (const auto& z : points(K, 20)) {
      const Stack s(K, z);
      EXPECT_LE(std::abs(s.F.curvature_slice(direction(rng, 3)).sectional_numerator), 1e-12) << label;
    }
  }
}

TEST(Fiber, FlatSectionsNonQuadratic) {
  for (const char* label : {"randers-dual", "quartic-root"}) {
    const auto& K = metric(label, 3);
    Rng rng(17);
    for (const auto& z : points(K, 20)) {
      EXPECT_LE(flat_section_residual(Stack(K, z).F, direction(rng, 3)), 1e-7) << label;
    }
  }
}

TEST(Fiber, CurvatureSliceTensorial) {
  const auto& K = metric("randers-dual", 3);
  Rng rng(19);
  for (const auto& z : points(K, 10)) {
    const Stack s(K, z);
    const Eigen::VectorXd X = direction(rng, 3);
    const FiberCurvatureSlice a = s.F.curvature_slice(X);
    const FiberCurvatureSlice b = s.F.curvature_slice(2.5 * X);
    EXPECT_LE((b.R_X - 2.5 * a.R_X).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + a.magnitude));
    EXPECT_NEAR(b.sectional_numerator, 6.25 * a.sectional_numerator, 1e-9 * (1.0 + b.magnitude));
    const FiberCurvatureSlice c = s.F.curvature_slice(z.p);
    EXPECT_LE(c.R_X.cwiseAbs().maxCoeff(), 1e-9 * (1.0 + c.magnitude));
  }
}

// Fourth momentum derivatives of K^2 enter through dC/dp; they are compared
// with central differences of the jet-computed C_i^{jk}.
TEST(Fiber, CartanDerivativeAgainstOracle) {
  for (const char* label : {"randers-dual", "quartic-root"}) {
    const auto& K = metric(label, 2);
    int used = 0;
    for (const auto& z : points(K, 20)) {
      const Stack s(K, z);
      const FiberConnection fc = s.F.connection();
      FDOracle fd(K.validity);
      bool inside = true;
      for (int i = 0; i < 2 && inside; ++i) {
        for (int j = 0; j < 2 && inside; ++j) {
          for (int k = 0; k < 2 && inside; ++k) {
            const FDOracle::Fn f = [&K, i, j, k](const PhasePoint& w) {
              const Geometry g(K, w, DerivSpec::momenta(3));
              double acc = 0.0;
              for (int r = 0; r < 2; ++r) acc += g.g_lower()(i, r).value() * g.cartan()(r, j, k).value();
              return acc;
            };
            for (int l = 0; l < 2; ++l) {
              std::vector<int> e(4, 0);
              e[2 + l] = 1;
              double ref = 0.0;
              try {
                ref = fd.derivative(f, z, e);
              } catch (const DomainError&) {
                inside = false;
                break;
              }
              EXPECT_NEAR(fc.dC_dp[l](i, j, k), ref, 1e-5 * (1.0 + std::abs(ref))) << label;
            }
          }
        }
      }
      used += inside ? 1 : 0;
    }
    EXPECT_GE(used, 10) << label;
  }
}
