#include <gtest/gtest.h>

#include "cartanv/checks.hpp"
#include "cartanv/liouville.hpp"
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
  Stack(const CartanStructure& K, const PhasePoint& z) : geo(K, z), fr(geo), L(fr) {}
};

}  // namespace

TEST(Liouville, EuclideanClosedForms) {
  const PhasePoint z = point({0.4, -0.2, 0.1}, {1.0, 2.0, 2.0});
  const Stack s(metric("euclidean", 3), z);
  const LiouvilleData d = s.L.data();
  const Eigen::VectorXd p = z.p;
  EXPECT_LE((d.zeta - p / 3.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((d.t - p / 9.0).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(3, 3) - p * p.transpose() / 9.0;
  EXPECT_LE((d.P - P).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Liouville, IdentitiesOnAllMetrics) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    Rng rng(7);
    for (const auto& z : points(K, 50)) {
      const Stack s(K, z);
      EXPECT_LE(t_identities(s.L).max(), 1e-10) << label;
      EXPECT_LE(dbar_brackets(s.L).max(), 1e-10) << label;
      EXPECT_LE(reduced_basis_suite(s.L).max(), 1e-10) << label;
      EXPECT_LE(frame_decomposition(s.L).max(), 1e-10) << label;
      const VectorField X = random_vertical(s.fr, rng);
      const VectorField Y = random_vertical(s.fr, rng);
      EXPECT_LE(projector_suite(s.L, X, Y).max(), 1e-10) << label;
    }
  }
}

TEST(Liouville, ReducedBasisHasFullRank) {
  const auto& K = metric("randers-dual", 3);
  for (const auto& z : points(K, 20)) {
    const Stack s(K, z);
    const ResidualRecord r = reduced_basis_suite(s.L);
    EXPECT_EQ(r.get("adapted_rank"), 3.0);
    EXPECT_GT(r.get("min_singular_value"), 0.0);
  }
}

TEST(Liouville, DistributionIntegrable) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    for (const auto& z : points(K, 50)) EXPECT_LE(integrability_residual(Stack(K, z).L), 1e-10) << label;
  }
}

// A pairing the integrability statement says nothing about stays nonzero.
TEST(Liouville, IntegrabilityControlIsNonzero) {
  const auto& K = metric("randers-dual", 3);
  double largest = 0.0;
  for (const auto& z : points(K, 10)) largest = std::max(largest, integrability_control(Stack(K, z).L));
  EXPECT_GT(largest, 1e-3);
}

TEST(Liouville, TAgainstOracle) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    int used = 0;
    for (const auto& z : points(K, 20)) {
      const Stack s(K, z);
      try {
        EXPECT_LE(t_oracle(s.L), 1e-5) << label;
        ++used;
      } catch (const DomainError&) {
      }
    }
    EXPECT_GE(used, 10) << label;
  }
}

TEST(Liouville, SmallLastMomentumRejected) {
  const Stack s(metric("euclidean", 2), point({0.0, 0.0}, {1.0, 0.01}));
  EXPECT_FALSE(s.L.reduced_available());
  EXPECT_THROW(reduced_basis_suite(s.L), AdaptedBasisDegenerate);
  EXPECT_THROW(s.L.reduced_basis(), AdaptedBasisDegenerate);
}

TEST(Liouville, SplitReassembles) {
  const auto& K = metric("quartic-root", 3);
  Rng rng(3);
  for (const auto& z : points(K, 10)) {
    const Stack s(K, z);
    const VectorField Y = random_vertical(s.fr, rng);
    const VerticalSplit sp = s.L.split(Y);
    const auto red = s.L.reduced_basis();
    VectorField back = sp.liouville * s.L.C_star();
    for (std::size_t a = 0; a < red.size(); ++a) back += sp.reduced[a] * red[a];
    EXPECT_LE((back - Y).value().cwiseAbs().maxCoeff(), 1e-10 * (1.0 + magnitude(Y)));
  }
}
