#include <gtest/gtest.h>

#include <cmath>

#include "cartanv/checks.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/oracle.hpp"
#include "cartanv/zoo.hpp"
#include "support.hpp"

using namespace cartanv;
using cartanv::testing::metric;
using cartanv::testing::point;
using cartanv::testing::points;

TEST(Fundamental, EuclideanClosedForm) {
  const auto t = fundamental_tensors(metric("euclidean", 2), point({0.1, 0.2}, {3.0, 4.0}));
  EXPECT_DOUBLE_EQ(t.K, 5.0);
  EXPECT_DOUBLE_EQ(t.K2, 25.0);
  EXPECT_LE((t.g_upper - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(t.p_upper(0), 3.0, 1e-15);
  EXPECT_NEAR(t.p_upper(1), 4.0, 1e-15);
  EXPECT_EQ(t.cartan.max_abs(), 0.0);
}

TEST(Fundamental, BuiltinValues) {
  EXPECT_NEAR(metric("randers-dual", 3).K(point({0, 0, 0}, {1, 0, 0})), 1.3, 1e-15);
  EXPECT_NEAR(metric("quartic-root", 2).K(point({0, 0}, {1, 1})), std::pow(2.0, 0.25), 1e-15);
}

TEST(Fundamental, QuadraticMetricsHaveNoCartanTensor) {
  for (const char* label : {"euclidean", "quadratic-diag", "quadratic-offdiag"}) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 20)) EXPECT_LE(fundamental_tensors(K, z).cartan.max_abs(), 1e-13) << label;
  }
}

TEST(Fundamental, IdentitiesOnAllMetrics) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    double worst = 0.0;
    for (const auto& z : points(K, 100)) worst = std::max(worst, fundamental_identities(Geometry(K, z)).max());
    EXPECT_LE(worst, 1e-10) << label;
  }
}

TEST(Fundamental, ScaleEquivariance) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 2);
    for (const auto& z : points(K, 20)) {
      EXPECT_LE(scale_equivariance(K, z, 0.37).max(), 1e-10) << label;
      EXPECT_LE(scale_equivariance(K, z, 2.9).max(), 1e-10) << label;
    }
  }
}

TEST(Fundamental, ChristoffelSymmetricAndZeroWhenFlat) {
  const auto& E = metric("euclidean", 3);
  for (const auto& z : points(E, 10)) {
    const auto c = formal_christoffel(E, z);
    EXPECT_EQ(c.gamma.max_abs(), 0.0);
  }
  const auto& R = metric("randers-dual", 3);
  for (const auto& z : points(R, 20)) {
    const auto c = formal_christoffel(R, z);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) EXPECT_EQ(c.gamma(i, j, k), c.gamma(i, k, j));
  }
}

TEST(Homogeneity, BuiltinsCertify) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 30)) EXPECT_LE(homogeneity_residuals(K, z).max(), 1e-10) << label;
  }
}

TEST(Homogeneity, BrokenMetricRejected) {
  EXPECT_THROW(from_expression("p1^2 + p2^2 + p1", 2), HomogeneityViolation);
}

TEST(Homogeneity, IndefiniteMetricRejected) {
  CartanStructure K;
  K.label = "lorentz";
  K.dim = 2;
  K.k_squared = ScalarField::from([](auto, auto p) { return p[0] * p[0] - p[1] * p[1]; });
  EXPECT_THROW(Geometry(K, point({0, 0}, {1.0, 0.3})), NotPositiveDefinite);
}

// The oracle differentiates K^2 by central differences only.
TEST(Oracle, FundamentalTensorsAgree) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    int used = 0;
    for (const auto& z : points(K, 20)) {
      const Geometry geo(K, z);
      OracleGeometry o;
      try {
        o = oracle_geometry(K, z, false);
      } catch (const DomainError&) {
        continue;  // stencil crosses the edge of the domain
      }
      ++used;
      EXPECT_LE(relative_gap(values(geo.p_upper()), o.p_upper), 1e-6) << label;
      EXPECT_LE(relative_gap(geo.g_upper().values(), o.g_upper), 1e-6) << label;
      EXPECT_LE(relative_gap(geo.cartan().values(), o.cartan), 1e-5) << label;
    }
    EXPECT_GE(used, 10) << label;
  }
}

TEST(Oracle, RandersAtAxisMomentum) {
  const auto& K = metric("randers-dual", 2);
  const PhasePoint z = point({0.0, 0.0}, {1.0, 0.0});
  const Geometry geo(K, z);
  const OracleGeometry o = oracle_geometry(K, z, false);
  EXPECT_LE(relative_gap(geo.g_upper().values(), o.g_upper), 1e-6);
  EXPECT_LE(relative_gap(geo.cartan().values(), o.cartan), 1e-5);
}

TEST(Oracle, ChristoffelOfQuadraticMetric) {
  const CartanStructure K = from_expression("(1 + x1^2)*p1^2 + p2^2", 2);
  for (const auto& z : points(K, 10)) {
    const ChristoffelData c = formal_christoffel(K, z);
    const OracleGeometry o = oracle_geometry(K, z, true);
    EXPECT_LE(relative_gap(c.gamma, o.gamma), 1e-6);
    EXPECT_LE(relative_gap(nonlinear_connection(K, z).N, o.N), 1e-5);
  }
}

TEST(Oracle, ConnectionAgreesOnAllMetrics) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    int used = 0;
    for (const auto& z : points(K, 20)) {
      const Geometry geo(K, z);
      OracleGeometry o;
      try {
        o = oracle_geometry(K, z, true);
      } catch (const DomainError&) {
        continue;
      }
      ++used;
      EXPECT_LE(connection_oracle(geo, o).max(), 1e-5) << label;
    }
    EXPECT_GE(used, 10) << label;
  }
}

// dN/dp from jets against central differences of the jet-computed N.
TEST(Oracle, MomentumDerivativeOfN) {
  for (const char* label : {"quadratic-offdiag", "randers-dual"}) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 10)) {
      const NonlinearConnection nc = nonlinear_connection(K, z);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const FDOracle::Fn f = [&K, i, j](const PhasePoint& w) { return nonlinear_connection(K, w).N(i, j); };
          FDOracle fd(K.validity);
          for (int k = 0; k < 3; ++k) {
            std::vector<int> e(6, 0);
            e[3 + k] = 1;
            const double ref = fd.derivative(f, z, e);
            EXPECT_NEAR(nc.dN_dp(i, j, k), ref, 1e-5 * (1.0 + std::abs(ref))) << label;
          }
        }
      }
    }
  }
}

TEST(Oracle, ThirdDerivativeOfCube) {
  const FDOracle::Fn f = [](const PhasePoint& z) { return z.p(0) * z.p(0) * z.p(0); };
  const std::vector<int> e = {0, 3};
  EXPECT_NEAR(fd_derivative(f, point({0.2}, {0.7}), e), 6.0, 1e-5);
}

TEST(Connection, SymmetricAndHomogeneous) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 50)) EXPECT_LE(connection_structure(Geometry(K, z)).max(), 1e-10) << label;
  }
}

TEST(Connection, VanishesWithoutPositionDependence) {
  for (const char* label : {"euclidean", "quartic-root"}) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 10)) EXPECT_LE(nonlinear_connection(K, z).N.cwiseAbs().maxCoeff(), 1e-15);
  }
}

// Transformation laws under a nonlinear change of base coordinates,
// including the inhomogeneous term in the law for N.
TEST(CoordinateChange, TransformationLaws) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 20)) EXPECT_LE(coordinate_invariance(K, Geometry(K, z)).max(), 1e-10) << label;
  }
}

TEST(CoordinateChange, DetectsWrongLaw) {
  // Dropping the Hessian term must be visible for a nonzero momentum.
  const auto& K = metric("euclidean", 2);
  const CoordinateChange c;
  const PhasePoint z = point({0.3, 0.1}, {0.5, 0.9});
  const CartanStructure Kt = changed_coordinates(K, c);
  const Eigen::MatrixXd J = c.jacobian(z.x);
  const Eigen::VectorXd pt = J.transpose().lu().solve(z.p);
  std::vector<double> xs = {0.3, 0.1};
  const auto xt = c.forward(std::span<const double>(xs));
  const Geometry gt(Kt, PhasePoint(Eigen::Vector2d(xt[0], xt[1]), pt));
  const Eigen::MatrixXd tensorial = J.transpose() * gt.N().values() * J;
  EXPECT_GT(tensorial.cwiseAbs().maxCoeff(), 1e-2);
}

TEST(AlmostKaehler, ModelOnAllMetrics) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 30)) {
      const Geometry geo(K, z);
      EXPECT_LE(almost_kaehler(PhaseFrames(geo)).max(), 1e-9) << label;
    }
  }
}

TEST(AlmostKaehler, AdaptedFrameMatrix) {
  const auto& K = metric("randers-dual", 2);
  const Geometry geo(K, point({0.2, -0.1}, {0.6, 0.8}));
  const Eigen::MatrixXd F = adapted_frame(geo);
  const Eigen::MatrixXd N = geo.N().values();
  EXPECT_LE((F.bottomLeftCorner(2, 2) - N.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((F * PhaseFrames(geo).coframe_matrix() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(),
            1e-15);
}

// delta_k N_ij from jets against finite differences of the jet-computed N.
TEST(Oracle, HorizontalDerivativeOfN) {
  for (const char* label : {"quadratic-offdiag", "randers-dual"}) {
    const auto& K = metric(label, 2);
    for (const auto& z : points(K, 10)) {
      const NonlinearConnection nc = nonlinear_connection(K, z);
      FDOracle fd(K.validity);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const FDOracle::Fn f = [&K, i, j](const PhasePoint& w) { return nonlinear_connection(K, w).N(i, j); };
          for (int k = 0; k < 2; ++k) {
            std::vector<int> ex(4, 0);
            ex[k] = 1;
            double ref = fd.derivative(f, z, ex);
            for (int h = 0; h < 2; ++h) {
              std::vector<int> ep(4, 0);
              ep[2 + h] = 1;
              ref += nc.N(k, h) * fd.derivative(f, z, ep);
            }
            EXPECT_NEAR(nc.dN_dx(i, j, k), ref, 1e-5 * (1.0 + std::abs(ref))) << label;
          }
        }
      }
    }
  }
}
