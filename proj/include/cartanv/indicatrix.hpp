#pragma once

/// The c-indicatrix {K = c} inside one fiber: its tangent frame
/// {Xbar^a, xi*, dbar^a}, the CR structure, the form
/// nu = omega_1 ^ .. ^ omega_{n-1} ^ theta_1 ^ .. ^ theta_{n-1}, the pulled
/// back symplectic form and the minimality of D = L_xi* (+) L_C*.
///
/// Wedge products use the determinant convention
/// (a_1 ^ .. ^ a_k)(v_1..v_k) = det[a_r(v_s)], under which a 2-form w gives
/// w^k(v_1..v_2k) = k! Pf[w(v_r, v_s)].

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/frames.hpp"
#include "cartanv/liouville.hpp"
#include "cartanv/random.hpp"
#include "cartanv/residual.hpp"
#include "cartanv/tensor.hpp"

namespace cartanv {

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Tangent frame of the indicatrix through the point of L, in the order
/// Xbar^1..Xbar^{n-1}, xi*, dbar^1..dbar^{n-1}.
class IndicatrixFrame {
 public:
  explicit IndicatrixFrame(const Liouville& L) : L_(&L), n_(L.dim()) {
    const auto& fr = L.frames();
    const auto red = L.reduced_basis();
    for (const auto& d : red) tangent_.push_back(fr.J(d));
    tangent_.push_back(L.xi_star());
    for (const auto& d : red) tangent_.push_back(d);
    G_ = fr.sasaki().G_natural;
    V_.resize(2 * n_, static_cast<Eigen::Index>(tangent_.size()));
    for (std::size_t k = 0; k < tangent_.size(); ++k) V_.col(static_cast<Eigen::Index>(k)) = tangent_[k].value();
    const Eigen::MatrixXd gram = V_.transpose() * G_ * V_;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (lu.rank() < gram.rows()) throw AdaptedBasisDegenerate("indicatrix tangent frame is degenerate");
    coframe_ = lu.solve(V_.transpose() * G_);
  }

  [[nodiscard]] const Liouville& liouville() const { return *L_; }
  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] int reduced_dim() const { return n_ - 1; }
  [[nodiscard]] const std::vector<VectorField>& tangent() const { return tangent_; }
  [[nodiscard]] int xi_index() const { return n_ - 1; }
  [[nodiscard]] double level() const { return L_->geometry().K().value(); }

  /// Natural components of the tangent fields, one per column.
  [[nodiscard]] const Eigen::MatrixXd& components() const { return V_; }
  [[nodiscard]] const Eigen::MatrixXd& G_natural() const { return G_; }

  /// Rows: the dual coframe, extended to the ambient space by G-orthogonal
  /// projection onto the tangent space.
  [[nodiscard]] const Eigen::MatrixXd& coframe() const { return coframe_; }

  /// Rows omega_1..omega_{n-1}, theta_1..theta_{n-1} of the coframe.
  [[nodiscard]] Eigen::MatrixXd nu_coframe() const {
    const int m = n_ - 1;
    Eigen::MatrixXd out(2 * m, 2 * n_);
    out.topRows(m) = coframe_.topRows(m);
    out.bottomRows(m) = coframe_.bottomRows(m);
    return out;
  }

 private:
  const Liouville* L_;
  int n_;
  std::vector<VectorField> tangent_;
  Eigen::MatrixXd G_;
  Eigen::MatrixXd V_;
  Eigen::MatrixXd coframe_;
};

/// Omega(u, v) = u^T Omega v on value vectors.
inline Eigen::MatrixXd omega_gram(const PhaseFrames& fr, const Eigen::MatrixXd& vectors) {
  return vectors.transpose() * fr.sasaki().Omega_natural * vectors;
}

/// G-orthogonal residual of w off the span of the columns of B, relative to |w|.
inline double outside_span(const Eigen::MatrixXd& G, const Eigen::MatrixXd& B, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd gram = B.transpose() * G * B;
  const Eigen::VectorXd coeff = gram.ldlt().solve(B.transpose() * G * w);
  const Eigen::VectorXd r = w - B * coeff;
  const double rr = std::sqrt(std::max(0.0, r.dot(G * r)));
  const double ww = std::sqrt(std::max(0.0, w.dot(G * w)));
  return rr / (1.0 + ww);
}

inline ResidualRecord cr_certificate(const IndicatrixFrame& I) {
  const auto& L = I.liouville();
  const auto& fr = L.frames();
  const int m = I.reduced_dim();
  const auto& G = I.G_natural();
  const auto& V = I.components();
  Eigen::MatrixXd D(2 * I.dim(), 2 * m);
  D.leftCols(m) = V.leftCols(m);
  D.rightCols(m) = V.rightCols(m);
  ResidualRecord r;
  for (int a = 0; a < m; ++a) {
    const VectorField& xbar = I.tangent()[a];
    const VectorField& dbar = I.tangent()[m + 1 + a];
    const Eigen::VectorXd jx = fr.J(xbar).value();
    r.add("J_xbar_in_D", outside_span(G, D, jx));
    r.add("J_xbar", (jx + dbar.value()).cwiseAbs().maxCoeff());
    r.add("J_dbar_in_D", outside_span(G, D, fr.J(dbar).value()));
  }
  const Eigen::VectorXd jxi = fr.J(L.xi_star()).value();
  const Eigen::MatrixXd C = L.C_star().value();
  r.add("J_xi_normal", outside_span(G, C, jxi));
  r.add("J_xi", (jxi + C).cwiseAbs().maxCoeff());
  return r;
}

/// All k-subsets of {0..size-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets(int size, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (k <= size) {
    out.push_back(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == size - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// nu and (i*Omega)^{n-1} on one tuple of tangent vectors.
struct NuPair {
  double nu = 0.0;
  double omega_power = 0.0;
};

inline NuPair nu_pair(const IndicatrixFrame& I, const Eigen::MatrixXd& coframe, const Eigen::MatrixXd& tuple) {
  const int m = I.reduced_dim();
  NuPair out;
  out.nu = (coframe * tuple).determinant();
  out.omega_power = factorial(m) * pfaffian(omega_gram(I.liouville().frames(), tuple));
  return out;
}

inline Eigen::MatrixXd columns(const Eigen::MatrixXd& V, const std::vector<int>& idx) {
  Eigen::MatrixXd out(V.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = V.col(idx[k]);
  return out;
}

/// nu against (-1)^{n-1} / (n-1)! (i*Omega)^{n-1} on every (2n-2)-subtuple
/// of the tangent frame, with nu built from the coframe dual to
/// {Xbar^a, xi*, dbar^a}.
inline ResidualRecord nu_form_identity(const IndicatrixFrame& I) {
  const int m = I.reduced_dim();
  const Eigen::MatrixXd cof = I.nu_coframe();
  const double factor = ((m % 2 == 0) ? 1.0 : -1.0) / factorial(m);
  ResidualRecord r;
  for (const auto& idx : subsets(2 * m + 1, 2 * m)) {
    const auto pr = nu_pair(I, cof, columns(I.components(), idx));
    r.add("identity", std::abs(pr.nu - factor * pr.omega_power));
    if (std::find(idx.begin(), idx.end(), I.xi_index()) != idx.end()) {
      r.add("xi_annihilated", std::abs(pr.nu));
    } else {
      r.note("nu_main_tuple", pr.nu);
      r.note("rhs_main_tuple", factor * pr.omega_power);
    }
  }
  if (m >= 1) {
    std::vector<int> rep(2 * m);
    for (int k = 0; k < 2 * m; ++k) rep[k] = k % (2 * m + 1);
    rep.back() = rep.front();
    const auto pr = nu_pair(I, cof, columns(I.components(), rep));
    r.add("alternation", std::max(std::abs(pr.nu), std::abs(pr.omega_power)));
  }
  return r;
}

/// Gram matrix h^{ab} = G(dbar^a, dbar^b) of the reduced vertical basis.
inline Eigen::MatrixXd reduced_gram(const IndicatrixFrame& I) {
  const int m = I.reduced_dim();
  const Eigen::MatrixXd B = I.components().rightCols(m);
  return B.transpose() * I.G_natural() * B;
}

/// The relation between nu and (i*Omega)^{n-1} that does hold pointwise:
///   nu = (-1)^{n(n-1)/2} / ((n-1)! det h) (i*Omega)^{n-1}
/// for the coframe dual to {Xbar^a, xi*, dbar^a}, and the same without the
/// det h factor for the coframe dual to a unitary frame {J e_a, xi*/K, e_a}
/// with e_a G-orthonormal in L_C*.
inline ResidualRecord nu_form_normalized(const IndicatrixFrame& I) {
  const int m = I.reduced_dim();
  const int n = I.dim();
  const auto& fr = I.liouville().frames();
  const double sign = ((m * (m + 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  const Eigen::MatrixXd h = reduced_gram(I);
  const double deth = h.determinant();

  const Eigen::MatrixXd& V = I.components();
  const Eigen::MatrixXd& G = I.G_natural();
  const Eigen::MatrixXd B = V.rightCols(m);
  Eigen::MatrixXd E = B;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < a; ++b) E.col(a) -= E.col(b).dot(G * E.col(a)) * E.col(b);
    const double nrm = std::sqrt(std::max(0.0, E.col(a).dot(G * E.col(a))));
    if (!(nrm > 1e-8 * (1.0 + std::sqrt(std::abs(B.col(a).dot(G * B.col(a))))))) {
      throw IllConditioned("orthonormalization of L_C* degenerates");
    }
    E.col(a) /= nrm;
  }
  const Eigen::MatrixXd Jn = fr.sasaki().J_natural;
  Eigen::MatrixXd U(2 * n, 2 * m + 1);
  U.leftCols(m) = Jn * E;
  U.col(m) = V.col(I.xi_index()) / I.level();
  U.rightCols(m) = E;
  const Eigen::MatrixXd gram = U.transpose() * G * U;
  const Eigen::MatrixXd ucof_full = gram.fullPivLu().solve(U.transpose() * G);
  Eigen::MatrixXd ucof(2 * m, 2 * n);
  ucof.topRows(m) = ucof_full.topRows(m);
  ucof.bottomRows(m) = ucof_full.bottomRows(m);

  const Eigen::MatrixXd cof = I.nu_coframe();
  ResidualRecord r;
  for (const auto& idx : subsets(2 * m + 1, 2 * m)) {
    const Eigen::MatrixXd tuple = columns(V, idx);
    const auto pr = nu_pair(I, cof, tuple);
    const double rhs = sign / (factorial(m) * deth) * pr.omega_power;
    r.add("frame", normalized(pr.nu - rhs, pr.nu));
    const double nu_u = (ucof * tuple).determinant();
    const double rhs_u = sign / factorial(m) * pr.omega_power;
    r.add("unitary", normalized(nu_u - rhs_u, nu_u));
  }
  r.note("det_h", deth);
  return r;
}

/// d(i*Omega) on every triple of tangent fields, and dOmega on triples of the
/// adapted frame.
inline ResidualRecord pullback_closedness(const IndicatrixFrame& I) {
  const auto& fr = I.liouville().frames();
  const Form omega = [&fr](std::span<const VectorField> f) { return fr.Omega(f[0], f[1]); };
  const auto& T = I.tangent();
  ResidualRecord r;
  for (const auto& idx : subsets(static_cast<int>(T.size()), 3)) {
    const std::vector<VectorField> args{T[idx[0]], T[idx[1]], T[idx[2]]};
    r.add("pullback", std::abs(exterior_derivative(omega, args).value()));
  }
  const auto A = fr.adapted_frame();
  for (const auto& idx : subsets(static_cast<int>(A.size()), 3)) {
    const std::vector<VectorField> args{A[idx[0]], A[idx[1]], A[idx[2]]};
    r.add("ambient", std::abs(exterior_derivative(omega, args).value()));
  }
  return r;
}

/// Lowered Christoffel symbols Gamma_{k,ij} of the Levi-Civita connection of
/// G in natural coordinates, entry (k, i, j).
inline Tensor3 ambient_christoffel(const PhaseFrames& fr) {
  const int d = 2 * fr.dim();
  std::vector<std::vector<Jet>> Gn(d, std::vector<Jet>(d));
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      Gn[a][b] = fr.G(fr.coordinate(a), fr.coordinate(b));
      Gn[b][a] = Gn[a][b];
    }
  }
  Tensor3 gam(d);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        gam(k, i, j) = 0.5 * (Gn[j][k].partial(i).value() + Gn[i][k].partial(j).value() -
                              Gn[i][j].partial(k).value());
      }
    }
  }
  return gam;
}

/// G(Levi-Civita derivative of Y along X, Z) at the point.
inline double ambient_cov_pairing(const Tensor3& gam, const Eigen::MatrixXd& G, const VectorField& X,
                                  const VectorField& Y, const Eigen::VectorXd& Z) {
  const int d = static_cast<int>(Y.c.size());
  Eigen::VectorXd dy(d);
  for (int l = 0; l < d; ++l) dy(l) = apply(X, Y.c[l]).value();
  const Eigen::VectorXd x = X.value();
  const Eigen::VectorXd y = Y.value();
  double out = Z.dot(G * dy);
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) out += gam(k, i, j) * x(i) * y(j) * Z(k);
    }
  }
  return out;
}

/// Trace over a G-orthonormal basis of D of the component along xi*/K of the
/// induced derivative of the basis along itself. The second fundamental form
/// is tensorial on sections of D since D is G-orthogonal to xi*, so the
/// basis is taken as constant combinations of {Xbar^a, dbar^a}.
inline ResidualRecord holomorphic_minimality(const IndicatrixFrame& I) {
  const auto& fr = I.liouville().frames();
  const int m = I.reduced_dim();
  const auto& T = I.tangent();
  std::vector<VectorField> D;
  for (int a = 0; a < m; ++a) D.push_back(T[a]);
  for (int a = 0; a < m; ++a) D.push_back(T[m + 1 + a]);
  const int q = static_cast<int>(D.size());
  const Eigen::MatrixXd& G = I.G_natural();
  const Tensor3 gam = ambient_christoffel(fr);
  const Eigen::VectorXd nu = T[I.xi_index()].value() / I.level();

  Eigen::MatrixXd S(q, q);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) S(a, b) = ambient_cov_pairing(gam, G, D[a], D[b], nu);
  }
  Eigen::MatrixXd Vd(G.rows(), q);
  for (int a = 0; a < q; ++a) Vd.col(a) = D[a].value();
  const Eigen::MatrixXd gram = Vd.transpose() * G * Vd;

  // Gram-Schmidt coefficients: e_a = sum_b A(a, b) D_b.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(q, q);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < a; ++b) {
      const double proj = A.row(b).dot(gram * A.row(a).transpose());
      A.row(a) -= proj * A.row(b);
    }
    const double nrm2 = A.row(a).dot(gram * A.row(a).transpose());
    if (!(nrm2 > 1e-16 * (1.0 + gram(a, a)))) throw IllConditioned("orthonormalization of D degenerates");
    A.row(a) /= std::sqrt(nrm2);
  }
  double trace = 0.0;
  for (int a = 0; a < q; ++a) trace += A.row(a).dot(S * A.row(a).transpose());

  double scale = 0.0;
  for (int a = 0; a < q; ++a) scale = std::max(scale, std::abs(A.row(a).dot(S * A.row(a).transpose())));
  ResidualRecord r;
  r.add("trace", std::abs(trace));
  r.add("orthonormal", (A * gram * A.transpose() - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff());
  r.add("xi_orthogonal", (Vd.transpose() * G * nu).cwiseAbs().maxCoeff());
  r.note("largest_diagonal_term", scale);
  return r;
}

/// |dK(X)| / (1 + K) for every tangent field.
inline ResidualRecord indicatrix_tangency(const IndicatrixFrame& I) {
  const Jet& K = I.liouville().geometry().K();
  ResidualRecord r;
  for (const auto& X : I.tangent()) r.add("tangency", std::abs(apply(X, K).value()) / (1.0 + K.value()));
  r.add("normal_unit", std::abs(std::sqrt(I.liouville().frames().G(I.liouville().C_star(),
                                                                       I.liouville().C_star())
                                                     .value()) /
                                    K.value() -
                                1.0));
  return r;
}

/// [xi*, f xi*] - xi*(f) xi* for random polynomial f.
inline ResidualRecord xi_line_integrable(const IndicatrixFrame& I, Rng& rng, int trials = 3) {
  const auto& geo = I.liouville().geometry();
  const VectorField xi = I.liouville().xi_star();
  ResidualRecord r;
  for (int t = 0; t < trials; ++t) {
    const Jet f = random_polynomial(geo.coords(), rng);
    VectorField fx = xi;
    fx *= f;
    VectorField res = lie_bracket(xi, fx);
    VectorField along = xi;
    along *= apply(xi, f);
    const double mag = magnitude(res);
    res -= along;
    r.add("bracket", magnitude(res) / (1.0 + mag));
  }
  return r;
}

/// Geometry on the level set K = c through the momentum direction of z.
inline PhasePoint indicatrix_point(const CartanStructure& K, const PhasePoint& z, double c = 1.0) {
  if (!(c > 0.0)) throw ConfigError("indicatrix level must be positive");
  return K.on_level(z, c);
}

/// Every indicatrix suite at one point, keyed by suite.
inline ResidualRecord indicatrix_suite(const IndicatrixFrame& I, Rng& rng) {
  ResidualRecord r;
  r.merge(cr_certificate(I), "cr.");
  r.merge(nu_form_identity(I), "nu.");
  r.merge(nu_form_normalized(I), "nu_normalized.");
  r.merge(pullback_closedness(I), "closed.");
  r.merge(holomorphic_minimality(I), "minimal.");
  r.merge(indicatrix_tangency(I), "tangent.");
  r.merge(xi_line_integrable(I, rng), "xi_line.");
  return r;
}

}  // namespace cartanv
