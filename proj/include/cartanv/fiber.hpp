#pragma once

/// Geometry of a fiber leaf (x frozen) with the metric g^{ij}: Levi-Civita
/// connection, covariant-derivative identities for C*/K, zeta and P, the
/// umbilic indicatrix and the curvature through C*.
///
/// The Christoffel symbols of g^{ij} along the fiber are
///   nabla_{d/dp_i} d/dp_j = -C_k^{ij} d/dp_k,   C_k^{ij} = g_ks C^{sij},
/// which is what metric compatibility forces given dg^{ij}/dp_k = -2 C^{ijk}.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "cartanv/frames.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/liouville.hpp"
#include "cartanv/residual.hpp"
#include "cartanv/tensor.hpp"

namespace cartanv {

struct FiberConnection {
  Tensor3 C_low;                // C_low(i, j, k) = C_i^{jk}
  std::vector<Tensor3> dC_dp;   // dC_dp[l](i, j, k) = dC_i^{jk}/dp_l
};

struct FiberCurvatureSlice {
  Eigen::VectorXd R_X;        // R(X, C*)C* as d/dp components
  double sectional_numerator = 0.0;  // G(R(X, C*)C*, X)
  double magnitude = 0.0;     // sum of absolute contributions, for normalization
};

class FiberGeometry {
 public:
  explicit FiberGeometry(const Liouville& L) : L_(&L), fr_(&L.frames()), geo_(&L.geometry()), n_(L.dim()) {
    const auto& C = geo_->cartan();
    c_low_ = JetTensor3(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
          Jet acc = geo_->g_lower()(i, 0) * C(0, j, k);
          for (int s = 1; s < n_; ++s) acc += geo_->g_lower()(i, s) * C(s, j, k);
          c_low_(i, j, k) = acc;
        }
      }
    }
  }

  [[nodiscard]] const Liouville& liouville() const { return *L_; }

  /// C_i^{jk} = g_is C^{sjk}
  [[nodiscard]] const JetTensor3& C_low() const { return c_low_; }

  /// Gamma^{ij}_k = -C_k^{ij}
  [[nodiscard]] Jet Gamma(int i, int j, int k) const { return -c_low_(k, i, j); }

  /// (nabla_X Y)_k = X(Y_k) - C_k^{ij} X_i Y_j for vertical X, Y.
  [[nodiscard]] VectorField cov(const VectorField& X, const VectorField& Y) const {
    VectorField out = fr_->zero();
    for (int k = 0; k < n_; ++k) {
      Jet acc = apply(X, Y.p(k));
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) acc -= c_low_(k, i, j) * X.p(i) * Y.p(j);
      }
      out.c[n_ + k] = acc;
    }
    return out;
  }

  /// Fiber metric g^{ij} X_i Y_j.
  [[nodiscard]] Jet G(const VectorField& X, const VectorField& Y) const {
    Jet acc = geo_->constant(0.0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) acc += geo_->g_upper()(i, j) * X.p(i) * Y.p(j);
    }
    return acc;
  }

  [[nodiscard]] FiberConnection connection() const {
    FiberConnection fc;
    fc.C_low = c_low_.values();
    for (int l = 0; l < n_; ++l) {
      Tensor3 d(n_);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          for (int k = 0; k < n_; ++k) d(i, j, k) = c_low_(i, j, k).partial(geo_->pvar(l)).value();
        }
      }
      fc.dC_dp.push_back(d);
    }
    return fc;
  }

  /// R(X, Y)Z for constant-coefficient vertical vectors at the base point,
  ///   R(d^a, d^b) d^c = (d^a Gamma^{bc}_d - d^b Gamma^{ac}_d
  ///                      + Gamma^{bc}_e Gamma^{ae}_d - Gamma^{ac}_e Gamma^{be}_d) d^d.
  /// Returns the d/dp components and, in `abs_out`, the sum of absolute
  /// contributions.
  [[nodiscard]] Eigen::VectorXd curvature(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                                          const Eigen::VectorXd& Z, Eigen::VectorXd* abs_out = nullptr) const {
    Tensor3 gam(n_);
    std::vector<Tensor3> dgam(n_, Tensor3(n_));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
          const Jet g = Gamma(i, j, k);
          gam(i, j, k) = g.value();
          for (int l = 0; l < n_; ++l) dgam[l](i, j, k) = g.partial(geo_->pvar(l)).value();
        }
      }
    }
    Eigen::VectorXd R = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd A = Eigen::VectorXd::Zero(n_);
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        const double xy = X(a) * Y(b) - X(b) * Y(a);
        if (xy == 0.0) continue;
        for (int c = 0; c < n_; ++c) {
          const double w = 0.5 * xy * Z(c);
          if (w == 0.0) continue;
          for (int d = 0; d < n_; ++d) {
            double term = dgam[a](b, c, d) - dgam[b](a, c, d);
            double mag = std::abs(dgam[a](b, c, d)) + std::abs(dgam[b](a, c, d));
            for (int e = 0; e < n_; ++e) {
              term += gam(b, c, e) * gam(a, e, d) - gam(a, c, e) * gam(b, e, d);
              mag += std::abs(gam(b, c, e) * gam(a, e, d)) + std::abs(gam(a, c, e) * gam(b, e, d));
            }
            R(d) += w * term;
            A(d) += std::abs(w) * mag;
          }
        }
      }
    }
    if (abs_out != nullptr) *abs_out = A;
    return R;
  }

  [[nodiscard]] FiberCurvatureSlice curvature_slice(const Eigen::VectorXd& X) const {
    const Eigen::VectorXd C = geo_->point().p;
    Eigen::VectorXd A;
    FiberCurvatureSlice s;
    s.R_X = curvature(X, C, C, &A);
    const Eigen::MatrixXd g = geo_->g_upper().values();
    s.sectional_numerator = s.R_X.dot(g * X);
    s.magnitude = A.dot((g * X).cwiseAbs());
    return s;
  }

 private:
  const Liouville* L_;
  const PhaseFrames* fr_;
  const Geometry* geo_;
  int n_;
  JetTensor3 c_low_;
};

/// Both expressions of the fiber coefficients agree
/// (g_is C^{sjk} and -1/2 g_is dg^{sk}/dp_j), symmetry in (j, k), and the
/// contraction C_i^{jk} p_j = 0.
inline ResidualRecord fiber_connection_suite(const FiberGeometry& F) {
  const Geometry& geo = F.liouville().geometry();
  const int n = geo.dim();
  ResidualRecord r;
  const Tensor3 C = F.C_low().values();
  const double scale = C.max_abs();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double alt = 0.0;
        for (int s = 0; s < n; ++s) {
          alt += -0.5 * geo.g_lower()(i, s).value() * geo.g_upper()(s, k).partial(geo.pvar(j)).value();
        }
        r.add("alternate_form", normalized(C(i, j, k) - alt, scale));
        r.add("symmetry", normalized(C(i, j, k) - C(i, k, j), scale));
      }
      double contraction = 0.0;
      for (int jj = 0; jj < n; ++jj) contraction += C(i, jj, j) * geo.point().p(jj);
      r.add("contraction", normalized(contraction, scale * geo.point().p.norm()));
    }
  }
  return r;
}

/// Levi-Civita certification on vertical fields X, Y, Z:
/// metric compatibility and vanishing torsion.
inline ResidualRecord levi_civita_suite(const FiberGeometry& F, const VectorField& X,
                                        const VectorField& Y, const VectorField& Z) {
  ResidualRecord r;
  const double lhs = apply(X, F.G(Y, Z)).value();
  const double a = F.G(F.cov(X, Y), Z).value();
  const double b = F.G(Y, F.cov(X, Z)).value();
  r.add("metric", normalized(lhs - a - b, std::abs(lhs) + std::abs(a) + std::abs(b)));
  const VectorField xy = F.cov(X, Y);
  const VectorField yx = F.cov(Y, X);
  const VectorField br = lie_bracket(X, Y);
  r.add("torsion", field_residual(xy - yx - br, magnitude(xy) + magnitude(yx) + magnitude(br)));
  return r;
}

/// For vertical X, Y:
///   nabla_X(C*/K) = PX/K,
///   (nabla_X zeta)Y = G(PX, PY)/K,
///   (nabla_X P)Y = -[G(PX, PY) C* + K zeta(Y) PX]/K^2.
inline ResidualRecord covariant_identities(const FiberGeometry& F, const VectorField& X,
                                           const VectorField& Y) {
  const Liouville& L = F.liouville();
  const Geometry& geo = L.geometry();
  const Jet& K = geo.K();
  ResidualRecord r;
  const VectorField C = L.C_star();
  const VectorField U = (1.0 / K) * C;
  const VectorField PX = L.project(X);
  const VectorField PY = L.project(Y);
  {
    const VectorField lhs = F.cov(X, U);
    const VectorField rhs = (1.0 / K) * PX;
    r.add("radial", field_residual(lhs - rhs, magnitude(lhs) + magnitude(rhs)));
  }
  const VectorField nXY = F.cov(X, Y);
  {
    // (nabla_X zeta)Y = X(zeta(Y)) - zeta(nabla_X Y)
    const double lhs = (apply(X, L.zeta_of(Y)) - L.zeta_of(nXY)).value();
    const double rhs = (F.G(PX, PY) / K).value();
    r.add("zeta", normalized(lhs - rhs, std::abs(lhs) + std::abs(rhs)));
  }
  {
    // (nabla_X P)Y = nabla_X(PY) - P(nabla_X Y)
    const VectorField lhs = F.cov(X, PY) - L.project(nXY);
    const VectorField rhs = -(1.0 / geo.K2()) * (F.G(PX, PY) * C + (K * L.zeta_of(Y)) * PX);
    r.add("projector", field_residual(lhs - rhs, magnitude(lhs) + magnitude(rhs)));
  }
  return r;
}

/// |nabla_{C*/K}(C*/K)|_G
inline double geodesic_residual(const FiberGeometry& F) {
  const Liouville& L = F.liouville();
  const Geometry& geo = L.geometry();
  const VectorField U = (1.0 / geo.K()) * L.C_star();
  const VectorField a = F.cov(U, U);
  return normalized(std::sqrt(std::max(0.0, F.G(a, a).value())), 1.0);
}

/// zeta(nabla_X Y) + G(PX, PY)/K for X, Y among the reduced fields. The
/// second fundamental form along the unit normal C*/K is then -G(X, Y)/K.
inline ResidualRecord umbilic_suite(const FiberGeometry& F) {
  const Liouville& L = F.liouville();
  const Geometry& geo = L.geometry();
  const auto red = L.reduced_basis();
  ResidualRecord r;
  for (std::size_t a = 0; a < red.size(); ++a) {
    for (std::size_t b = 0; b < red.size(); ++b) {
      const double lhs = L.zeta_of(F.cov(red[a], red[b])).value();
      const double rhs = -(F.G(L.project(red[a]), L.project(red[b])) / geo.K()).value();
      r.add(a == b ? "diagonal" : "off_diagonal", normalized(lhs - rhs, std::abs(lhs) + std::abs(rhs)));
    }
  }
  return r;
}

/// |G(R(X, C*)C*, X)| for a constant vertical vector X.
inline double flat_section_residual(const FiberGeometry& F, const Eigen::VectorXd& X) {
  const FiberCurvatureSlice s = F.curvature_slice(X);
  return normalized(s.sectional_numerator, s.magnitude);
}

}  // namespace cartanv
