#include <gtest/gtest.h>

#include "cartanv/subfoliation.hpp"
#include "support.hpp"

using namespace cartanv;
using cartanv::testing::metric;
using cartanv::testing::points;

namespace {

struct Stack {
  Geometry geo;
  PhaseFrames fr;
  Liouville L;
  Vranceanu vr;
  Vaisman va;
  BasicTriple T;
  Stack(const CartanStructure& K, const PhasePoint& z)
      : geo(K, z), fr(geo), L(fr), vr(fr), va(L), T(vr, va) {}
};

}  // namespace

TEST(Subfoliation, BasicConnections) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    Rng rng(23);
    for (const auto& z : points(K, 20)) {
      const Stack s(K, z);
      EXPECT_LE(basic_check_L(s.T, rng).max(), 1e-9) << label;
      EXPECT_LE(basic_check_H(s.T, rng).max(), 1e-9) << label;
      EXPECT_LE(basic_check_perp(s.T, rng).max(), 1e-9) << label;
    }
  }
}

TEST(Subfoliation, TripleCompatibility) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    Rng rng(29);
    for (const auto& z : points(K, 20)) EXPECT_LE(triple_compatibility(Stack(K, z).T, rng).max(), 1e-9) << label;
  }
}

TEST(Subfoliation, LineCurvature) {
  for (const auto& label : builtin_labels()) {
    const auto& K = metric(label, 3);
    Rng rng(31);
    for (const auto& z : points(K, 20)) EXPECT_LE(line_curvature_check(Stack(K, z).T, rng).max(), 1e-10) << label;
  }
}

TEST(Subfoliation, ProjectorsSplitTheComplement) {
  const auto& K = metric("randers-dual", 3);
  Rng rng(37);
  for (const auto& z : points(K, 10)) {
    const Stack s(K, z);
    const VectorField Y = random_field(s.fr, rng);
    const VectorField Z = s.T.pi2(Y);
    EXPECT_LE(std::abs(s.fr.G(Z, s.L.C_star()).value()), 1e-12 * (1.0 + magnitude(Y)));
    const VectorField back = s.T.pi1(Z) + s.T.pi0(Z - s.T.pi1(Z));
    EXPECT_LE((back - Z).value().cwiseAbs().maxCoeff(), 1e-12 * (1.0 + magnitude(Y)));
  }
}
