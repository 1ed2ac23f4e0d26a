#pragma once

/// Point-level residual suites for the fundamental tensors, the canonical
/// nonlinear connection, the almost Kaehler model and coordinate changes,
/// including comparisons against the finite-difference oracle.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

#include "cartanv/frames.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/indicatrix.hpp"
#include "cartanv/liouville.hpp"
#include "cartanv/metric.hpp"
#include "cartanv/oracle.hpp"
#include "cartanv/residual.hpp"

namespace cartanv {

/// g^ij p_j = p^i, p_i p^i = K^2, C^ijk p_k = 0, total symmetry of C,
/// g^ij g_jk = delta, symmetry of gamma^i_jk.
inline ResidualRecord fundamental_identities(const Geometry& geo) {
  const int n = geo.dim();
  const Eigen::VectorXd p = geo.point().p;
  const Eigen::MatrixXd gu = geo.g_upper().values();
  const Eigen::MatrixXd gl = geo.g_lower().values();
  const Eigen::VectorXd pu = values(geo.p_upper());
  const double K2 = geo.K2().value();
  ResidualRecord r;
  r.add("p_upper", (gu * p - pu).cwiseAbs().maxCoeff() / (1.0 + p.norm()));
  r.add("k_squared", std::abs(p.dot(pu) - K2) / (1.0 + K2));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gu);
  const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  r.add("inverse", (gu * gl - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() / cond);
  if (geo.has_cartan()) {
    const Tensor3 C = geo.cartan().values();
    const double scale = 1.0 + C.max_abs();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double contraction = 0.0;
        for (int k = 0; k < n; ++k) {
          contraction += C(i, j, k) * p(k);
          r.add("cartan_symmetry", std::max({std::abs(C(i, j, k) - C(j, i, k)),
                                             std::abs(C(i, j, k) - C(i, k, j))}) / scale);
        }
        r.add("cartan_contraction", std::abs(contraction) / scale);
      }
    }
  }
  if (geo.has_connection()) {
    const Tensor3 g = geo.gamma().values();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          r.add("christoffel_symmetry", std::abs(g(i, j, k) - g(i, k, j)) / (1.0 + g.max_abs()));
        }
      }
    }
  }
  return r;
}

/// Under p -> lambda p: g^ij unchanged, p^i scaled by lambda, K^2 by lambda^2.
inline ResidualRecord scale_equivariance(const CartanStructure& K, const PhasePoint& z, double lambda) {
  const FundamentalTensors a = fundamental_tensors(K, z);
  const FundamentalTensors b = fundamental_tensors(K, z.scaled(lambda));
  ResidualRecord r;
  r.add("metric", (b.g_upper - a.g_upper).cwiseAbs().maxCoeff() / (1.0 + a.g_upper.cwiseAbs().maxCoeff()));
  r.add("p_upper", (b.p_upper - lambda * a.p_upper).cwiseAbs().maxCoeff() / (1.0 + b.p_upper.norm()));
  r.add("k_squared", std::abs(b.K2 - lambda * lambda * a.K2) / (1.0 + b.K2));
  return r;
}

/// Elementwise |a - b| / (1 + |b|).
inline double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return ((a - b).array().abs() / (1.0 + b.array().abs())).maxCoeff();
}

inline double relative_gap(const Tensor3& a, const Tensor3& b) {
  double m = 0.0;
  const int n = a.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)) / (1.0 + std::abs(b(i, j, k))));
    }
  }
  return m;
}

/// Jet-computed p^i, g^ij, C^ijk against finite differences of K^2.
inline ResidualRecord tensor_oracle(const Geometry& geo, const OracleGeometry& o) {
  ResidualRecord r;
  r.add("p_upper", relative_gap(values(geo.p_upper()), o.p_upper));
  r.add("g_upper", relative_gap(geo.g_upper().values(), o.g_upper));
  r.add("g_lower", relative_gap(geo.g_lower().values(), o.g_lower));
  r.add("cartan", relative_gap(geo.cartan().values(), o.cartan));
  return r;
}

/// Jet-computed gamma^i_jk and N_ij against finite differences of K^2.
inline ResidualRecord connection_oracle(const Geometry& geo, const OracleGeometry& o) {
  ResidualRecord r;
  r.add("christoffel", relative_gap(geo.gamma().values(), o.gamma));
  r.add("N", relative_gap(geo.N().values(), o.N));
  return r;
}

/// N_ij = N_ji and p_k dN_ij/dp_k = N_ij.
inline ResidualRecord connection_structure(const Geometry& geo) {
  const int n = geo.dim();
  const Eigen::MatrixXd N = geo.N().values();
  const double scale = 1.0 + N.cwiseAbs().maxCoeff();
  ResidualRecord r;
  r.add("symmetry", (N - N.transpose()).cwiseAbs().maxCoeff() / scale);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double e = -N(i, j);
      for (int k = 0; k < n; ++k) e += geo.point().p(k) * geo.N()(i, j).partial(geo.pvar(k)).value();
      r.add("homogeneity", std::abs(e) / scale);
    }
  }
  return r;
}

/// dt^j/dp_k from jets against central differences of t^j = p^j / K^2,
/// where p^j at each stencil point comes from a first-order jet of K^2.
inline double t_oracle(const Liouville& L) {
  const Geometry& geo = L.geometry();
  const CartanStructure& K = geo.metric();
  const int n = geo.dim();
  FDOracle fd(K.validity);
  double m = 0.0;
  for (int j = 0; j < n; ++j) {
    const FDOracle::Fn t = [&K, n, j](const PhasePoint& w) {
      const Jet k2 = K.k_squared_jet(w, DerivSpec::momenta(1));
      return 0.5 * k2.partial(n + j).value() / k2.value();
    };
    for (int k = 0; k < n; ++k) {
      std::vector<int> exps(2 * n, 0);
      exps[n + k] = 1;
      const double ref = fd.derivative(t, geo.point(), exps);
      const double jet = L.t()[j].partial(geo.pvar(k)).value();
      m = std::max(m, std::abs(jet - ref) / (1.0 + std::abs(ref)));
    }
  }
  return m;
}

/// J^2 = -I, Omega(X, Y) = G(JX, Y), G(JX, JY) = G(X, Y) on the adapted
/// frame, the natural-coordinate matrices, and dOmega = 0 on frame triples.
inline ResidualRecord almost_kaehler(const PhaseFrames& fr) {
  const auto A = fr.adapted_frame();
  ResidualRecord r;
  for (const auto& X : A) {
    VectorField jj = fr.J(fr.J(X));
    jj += X;
    r.add("J_squared", magnitude(jj) / (1.0 + magnitude(X)));
    for (const auto& Y : A) {
      const double om = fr.Omega(X, Y).value();
      const double gj = fr.G(fr.J(X), Y).value();
      r.add("omega_G", normalized(om - gj, om));
      const double gx = fr.G(X, Y).value();
      r.add("G_hermitian", normalized(fr.G(fr.J(X), fr.J(Y)).value() - gx, gx));
    }
  }
  const SasakiData s = fr.sasaki();
  const auto d = s.J_natural.rows();
  r.add("J_natural", (s.J_natural * s.J_natural + Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff());
  r.add("omega_natural", (s.Omega_natural - s.J_natural.transpose() * s.G_natural).cwiseAbs().maxCoeff() /
                             (1.0 + s.Omega_natural.cwiseAbs().maxCoeff()));
  const Form omega = [&fr](std::span<const VectorField> f) { return fr.Omega(f[0], f[1]); };
  for (const auto& idx : subsets(static_cast<int>(A.size()), 3)) {
    const std::vector<VectorField> args{A[idx[0]], A[idx[1]], A[idx[2]]};
    r.add("d_omega", std::abs(exterior_derivative(omega, args).value()));
  }
  return r;
}

/// The triangular change of base coordinates
///   xt_1 = x_1,  xt_i = x_i + eps x_{i-1}^2,
/// with the induced momenta pt = J^{-T} p, J = dxt/dx.
struct CoordinateChange {
  double eps = 0.2;

  template <class S>
  std::vector<S> forward(std::span<const S> x) const {
    std::vector<S> out(x.begin(), x.end());
    for (std::size_t i = 1; i < x.size(); ++i) out[i] = x[i] + eps * x[i - 1] * x[i - 1];
    return out;
  }

  template <class S>
  std::vector<S> inverse(std::span<const S> xt) const {
    std::vector<S> out(xt.begin(), xt.end());
    for (std::size_t i = 1; i < xt.size(); ++i) out[i] = xt[i] - eps * out[i - 1] * out[i - 1];
    return out;
  }

  /// p_k = J_ik pt_i
  template <class S>
  std::vector<S> pull_momenta(std::span<const S> x, std::span<const S> pt) const {
    std::vector<S> out(pt.begin(), pt.end());
    for (std::size_t k = 0; k + 1 < pt.size(); ++k) out[k] = pt[k] + (2.0 * eps) * x[k] * pt[k + 1];
    return out;
  }

  [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    const auto n = x.size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 1; i < n; ++i) J(i, i - 1) = 2.0 * eps * x(i - 1);
    return J;
  }

  /// d^2 xt^h / dx^i dx^k, entry (h, i, k).
  [[nodiscard]] Tensor3 hessian(int n) const {
    Tensor3 H(n);
    for (int h = 1; h < n; ++h) H(h, h - 1, h - 1) = 2.0 * eps;
    return H;
  }
};

namespace detail {
struct PulledMetric {
  ScalarField base;
  CoordinateChange change;
  template <class S>
  S operator()(std::span<const S> xt, std::span<const S> pt) const {
    const auto x = change.inverse(xt);
    const auto p = change.pull_momenta(std::span<const S>(x), pt);
    return base(std::span<const S>(x), std::span<const S>(p));
  }
};
}  // namespace detail

/// K expressed in the changed coordinates: Kt(xt, pt) = K(x(xt), J^T pt).
inline CartanStructure changed_coordinates(const CartanStructure& K, const CoordinateChange& c) {
  CartanStructure out;
  out.label = K.label + "@changed";
  out.dim = K.dim;
  out.k_squared = ScalarField::from(detail::PulledMetric{K.k_squared, c});
  out.flags = K.flags;
  return out;
}

/// Transformation laws under the change of coordinates: K scalar,
/// g^ij -> J g J^T, p^i -> J p^, C^ijk tensorial, and
///   N_ik = J_ji Nt_jh J_hk + pt_h d^2 xt^h / dx^i dx^k.
inline ResidualRecord coordinate_invariance(const CartanStructure& K, const Geometry& geo,
                                            const CoordinateChange& change = {}) {
  const int n = geo.dim();
  const PhasePoint& z = geo.point();
  const Eigen::MatrixXd J = change.jacobian(z.x);
  const auto xs = std::vector<double>(z.x.data(), z.x.data() + n);
  const auto xt = change.forward(std::span<const double>(xs));
  const Eigen::VectorXd pt = J.transpose().lu().solve(z.p);
  const PhasePoint zt(Eigen::Map<const Eigen::VectorXd>(xt.data(), n), pt);
  const CartanStructure Kt = changed_coordinates(K, change);
  const Geometry gt(Kt, zt);

  ResidualRecord r;
  r.add("k_squared", normalized(gt.K2().value() - geo.K2().value(), geo.K2().value()));
  const Eigen::MatrixXd g = geo.g_upper().values();
  const Eigen::MatrixXd gexp = J * g * J.transpose();
  r.add("g_upper", (gt.g_upper().values() - gexp).cwiseAbs().maxCoeff() / (1.0 + gexp.cwiseAbs().maxCoeff()));
  const Eigen::VectorXd pexp = J * values(geo.p_upper());
  r.add("p_upper", (values(gt.p_upper()) - pexp).cwiseAbs().maxCoeff() / (1.0 + pexp.norm()));

  const Tensor3 C = geo.cartan().values();
  const Tensor3 Ct = gt.cartan().values();
  double cscale = 1.0 + C.max_abs();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) acc += J(a, i) * J(b, j) * J(c, k) * C(i, j, k);
          }
        }
        r.add("cartan", std::abs(Ct(a, b, c) - acc) / cscale);
      }
    }
  }

  const Eigen::MatrixXd N = geo.N().values();
  const Eigen::MatrixXd Nt = gt.N().values();
  const Tensor3 H = change.hessian(n);
  Eigen::MatrixXd rhs = J.transpose() * Nt * J;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      for (int h = 0; h < n; ++h) rhs(i, k) += pt(h) * H(h, i, k);
    }
  }
  r.add("N", (N - rhs).cwiseAbs().maxCoeff() / (1.0 + N.cwiseAbs().maxCoeff()));
  return r;
}

}  // namespace cartanv
