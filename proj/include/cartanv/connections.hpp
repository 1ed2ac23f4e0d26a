#pragma once

/// Linear connections on phase space attached to the vertical foliation:
/// the canonical metrical N-linear coefficients H, the Vranceanu connection
/// and the Vaisman connection on the vertical bundle.
///
/// Both connections are available as operators on vector fields so that
/// torsion and metric compatibility are measured from their definitions
/// rather than read off the coefficient formulas. Coefficients enter the
/// operators at their base-point accuracy only, so operator outputs are
/// exact in value and in first derivatives along C*.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/frames.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/liouville.hpp"
#include "cartanv/residual.hpp"
#include "cartanv/tensor.hpp"

namespace cartanv {

inline constexpr double kReinhartThreshold = 1e-6;

inline bool is_zero(const Jet& f) {
  for (double c : f.coefficients()) {
    if (c != 0.0) return false;
  }
  return true;
}

/// H(i, j, k) = H^i_{jk} = 1/2 g^{is}(delta_j g_{sk} + delta_k g_{js} - delta_s g_{jk})
inline JetTensor3 canonical_h_jets(const Geometry& geo) {
  const int n = geo.dim();
  // dg(s, j, k) = delta_s g_{jk}
  JetTensor3 dg(n);
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        dg(s, j, k) = geo.delta(s, geo.g_lower()(j, k));
        dg(s, k, j) = dg(s, j, k);
      }
    }
  }
  JetTensor3 H(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      std::vector<Jet> low(n);
      for (int s = 0; s < n; ++s) low[s] = 0.5 * (dg(j, s, k) + dg(k, j, s) - dg(s, j, k));
      for (int i = 0; i < n; ++i) {
        Jet acc = geo.g_upper()(i, 0) * low[0];
        for (int s = 1; s < n; ++s) acc += geo.g_upper()(i, s) * low[s];
        H(i, j, k) = acc;
        H(i, k, j) = acc;
      }
    }
  }
  return H;
}

inline Tensor3 canonical_h_coeffs(const CartanStructure& K, const PhasePoint& z) {
  return canonical_h_jets(Geometry(K, z)).values();
}

/// delta_k g_ij - H^s_ik g_sj - H^s_jk g_is
inline double h_metric_residual(const Geometry& geo, const JetTensor3& H) {
  const int n = geo.dim();
  const Eigen::MatrixXd g = geo.g_lower().values();
  const Tensor3 h = H.values();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double d = geo.delta(k, geo.g_lower()(i, j)).value();
        double a = 0.0, m = std::abs(d);
        for (int s = 0; s < n; ++s) {
          a += h(s, i, k) * g(s, j) + h(s, j, k) * g(i, s);
          m += std::abs(h(s, i, k) * g(s, j)) + std::abs(h(s, j, k) * g(i, s));
        }
        worst = std::max(worst, normalized(d - a, m));
      }
    }
  }
  return worst;
}

struct VranceanuConnection {
  Tensor3 C_coeff;  // C_coeff(i, j, k) = C^{ij}_k = -C_k^{ij}
  Tensor3 D_coeff;  // D_coeff(i, j, k) = D^i_{jk} = -dN_jk/dp_i
  Tensor3 L_coeff;  // identically zero
  Tensor3 F_coeff;  // F_coeff(k, i, j) = F^k_{ij} = H^k_{ij}
  Tensor3 torsion;  // torsion(i, j, k) = delta_i N_jk - delta_j N_ik
};

/// Vranceanu connection:
///   nabla_{d^j} d^i = C^{ij}_k d^k,      nabla_{delta_j} d^i = D^i_{jk} d^k,
///   nabla_{d^j} delta_i = 0,             nabla_{delta_j} delta_i = H^k_{ij} delta_k.
class Vranceanu {
 public:
  explicit Vranceanu(const PhaseFrames& frames) : fr_(&frames), geo_(&frames.geometry()), n_(frames.dim()) {
    H_ = canonical_h_jets(*geo_);
    C_ = JetTensor3(n_);
    D_ = JetTensor3(n_);
    const auto& cartan = geo_->cartan();
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
          Jet acc = geo_->g_lower()(k, 0) * cartan(0, i, j);
          for (int s = 1; s < n_; ++s) acc += geo_->g_lower()(k, s) * cartan(s, i, j);
          C_(i, j, k) = -acc;
          D_(i, j, k) = -geo_->N()(j, k).partial(geo_->pvar(i));
        }
      }
    }
  }

  [[nodiscard]] const PhaseFrames& frames() const { return *fr_; }
  [[nodiscard]] const JetTensor3& H() const { return H_; }

  /// nabla_X Y in natural components. Terms along an identically vanishing
  /// horizontal component of X are skipped, so that derivatives along
  /// vertical directions do not inherit the lower accuracy of H and D.
  [[nodiscard]] VectorField cov(const VectorField& X, const VectorField& Y) const {
    const auto xh = fr_->horizontal(X), xv = fr_->vertical_part(X);
    const auto yh = fr_->horizontal(Y), yv = fr_->vertical_part(Y);
    std::vector<bool> live(n_);
    for (int j = 0; j < n_; ++j) live[j] = !is_zero(xh[j]);
    std::vector<Jet> oh(n_), ov(n_);
    for (int k = 0; k < n_; ++k) {
      Jet h = apply(X, yh[k]);
      Jet v = apply(X, yv[k]);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          v += yv[i] * xv[j] * C_(i, j, k);
          if (!live[j]) continue;
          h += yh[i] * xh[j] * H_(k, i, j);
          v += yv[i] * xh[j] * D_(i, j, k);
        }
      }
      oh[k] = h;
      ov[k] = v;
    }
    return fr_->from_adapted(oh, ov);
  }

  /// Restriction to the horizontal bundle: nabla_X of the horizontal part of Y.
  [[nodiscard]] VectorField cov_horizontal(const VectorField& X, const VectorField& Y) const {
    return cov(X, horizontal_part(Y));
  }

  [[nodiscard]] VectorField horizontal_part(const VectorField& Y) const {
    std::vector<Jet> zero(n_, geo_->constant(0.0));
    return fr_->from_adapted(fr_->horizontal(Y), zero);
  }

  /// T(X, Y) = nabla_X Y - nabla_Y X - [X, Y]
  [[nodiscard]] VectorField torsion(const VectorField& X, const VectorField& Y) const {
    return cov(X, Y) - cov(Y, X) - lie_bracket(X, Y);
  }

  /// Torsion coefficients delta_i N_jk - delta_j N_ik. With this index order
  /// T_ijk d^k is the torsion T(delta_j, delta_i).
  [[nodiscard]] Tensor3 torsion_coeffs() const {
    Tensor3 T(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
          T(i, j, k) = (geo_->delta(i, geo_->N()(j, k)) - geo_->delta(j, geo_->N()(i, k))).value();
        }
      }
    }
    return T;
  }

  [[nodiscard]] VranceanuConnection coefficients() const {
    VranceanuConnection v;
    v.C_coeff = C_.values();
    v.D_coeff = D_.values();
    v.L_coeff = Tensor3(n_);
    v.F_coeff = H_.values();
    v.torsion = torsion_coeffs();
    return v;
  }

 private:
  const PhaseFrames* fr_;
  const Geometry* geo_;
  int n_;
  JetTensor3 H_;
  JetTensor3 C_;
  JetTensor3 D_;
};

inline VranceanuConnection vranceanu(const CartanStructure& K, const PhasePoint& z) {
  const Geometry geo(K, z);
  const PhaseFrames fr(geo);
  return Vranceanu(fr).coefficients();
}

/// max_{ijk} |dg_ij/dp_k|; zero exactly when g does not depend on p.
inline double reinhart_residual(const Geometry& geo) {
  return geo.dg_lower_dp().values().max_abs();
}

inline double reinhart_residual(const CartanStructure& K, const PhasePoint& z) {
  return reinhart_residual(Geometry(K, z, DerivSpec{3, 1, 3}));
}

inline bool reinhart_verdict(double residual) { return residual <= kReinhartThreshold; }

/// Torsion of the Vranceanu connection: the coefficient table against the
/// vertical part of [delta_i, delta_j], the operator torsion T(delta_j,
/// delta_i) against the table, and the vanishing of every other component.
inline ResidualRecord vranceanu_torsion_suite(const Vranceanu& V) {
  const PhaseFrames& fr = V.frames();
  const int n = fr.dim();
  const Tensor3 T = V.torsion_coeffs();
  ResidualRecord r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const VectorField br = lie_bracket(fr.delta(i), fr.delta(j));
      const auto bv = fr.vertical_part(br);
      const auto bh = fr.horizontal(br);
      const VectorField op = V.torsion(fr.delta(j), fr.delta(i));
      const auto ov = fr.vertical_part(op);
      const auto oh = fr.horizontal(op);
      double scale = 0.0;
      for (int k = 0; k < n; ++k) scale = std::max({scale, std::abs(T(i, j, k)), std::abs(bv[k].value())});
      for (int k = 0; k < n; ++k) {
        r.add("bracket", normalized(T(i, j, k) - bv[k].value(), scale));
        r.add("bracket_horizontal", normalized(bh[k].value(), scale));
        r.add("operator", normalized(ov[k].value() - T(i, j, k), scale));
        r.add("operator_horizontal", normalized(oh[k].value(), scale));
        r.add("antisymmetry", normalized(T(i, j, k) + T(j, i, k), scale));
      }
      const VectorField mixed = V.torsion(fr.delta(i), fr.vertical(j));
      const VectorField vert = V.torsion(fr.vertical(i), fr.vertical(j));
      r.add("mixed", field_residual(mixed, magnitude(V.cov(fr.delta(i), fr.vertical(j)))));
      r.add("vertical", field_residual(vert, magnitude(V.cov(fr.vertical(i), fr.vertical(j)))));
    }
  }
  r.note("torsion_magnitude", T.max_abs());
  return r;
}

/// H symmetry and metric compatibility, L = 0 through the operator, and
/// (nabla_{d^k} G)(delta_i, delta_j) = dg_ij/dp_k.
inline ResidualRecord vranceanu_coefficient_suite(const Vranceanu& V) {
  const PhaseFrames& fr = V.frames();
  const Geometry& geo = fr.geometry();
  const int n = fr.dim();
  ResidualRecord r;
  const Tensor3 H = V.H().values();
  const double hs = H.max_abs();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) r.add("h_symmetry", normalized(H(i, j, k) - H(i, k, j), hs));
    }
  }
  r.add("h_metric", h_metric_residual(geo, V.H()));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      r.add("l_zero", field_residual(V.cov(fr.vertical(j), fr.delta(i)), 1.0));
    }
  }
  const double dg = reinhart_residual(geo);
  for (int k = 0; k < n; ++k) {
    const VectorField X = fr.vertical(k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const VectorField di = fr.delta(i), dj = fr.delta(j);
        const double lhs = (apply(X, fr.G(di, dj)) - fr.G(V.cov(X, di), dj) - fr.G(di, V.cov(X, dj))).value();
        const double rhs = geo.dg_lower_dp()(i, j, k).value();
        r.add("reinhart_covariant", normalized(lhs - rhs, dg));
      }
    }
  }
  return r;
}

/// The coefficient tables of the Vaisman connection in the frame
/// {dbar^1..dbar^{n-1}, C*} and its action on vector fields:
///   nabla_{dbar^b} dbar^a = s^{ab}_c dbar^c,   nabla_{C*} dbar^a = s^a_c dbar^c,
///   nabla_{dbar^a} C* = s^a C*,                nabla_{C*} C* = s C*,
///   nabla_{delta_i} dbar^a = beta^a_{bi} dbar^b,   nabla_{delta_i} C* = beta_i C*.
struct VaismanConnection {
  Eigen::MatrixXd h_block;    // h^{ab} = g^{ab} - K^2 t^a t^b
  Eigen::MatrixXd h_inverse;  // h_{ab}
  Tensor3 s_coeff;            // s_coeff(a, b, c) = s^{ab}_c, size n-1
  Eigen::MatrixXd s_mixed;    // s^a_b
  Eigen::VectorXd s_single;   // s^a
  double s_scalar = 0.0;      // s
  std::vector<Eigen::MatrixXd> beta;  // beta[i](a, b) = beta^a_{bi}
  Eigen::VectorXd beta_scalar;        // beta_i
  double projection_defect = 0.0;     // max |p^j dbar^a(N_ij)|
};

class Vaisman {
 public:
  explicit Vaisman(const Liouville& L) : L_(&L), fr_(&L.frames()), geo_(&L.geometry()), n_(L.dim()), m_(n_ - 1) {
    L.require_reduced();
    const auto& t = L.t();
    const Jet& K2 = geo_->K2();
    h_up_ = JetMat(m_, m_);
    for (int a = 0; a < m_; ++a) {
      for (int b = 0; b < m_; ++b) h_up_(a, b) = geo_->g_upper()(a, b) - K2 * t[a] * t[b];
    }
    const Eigen::MatrixXd hv = h_up_.values();
    Eigen::LLT<Eigen::MatrixXd> llt(hv);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hv, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    if (llt.info() != Eigen::Success || !(lo > 0.0) || hi / lo > kConditionLimit) {
      throw HBlockSingular("reduced block h^{ab} is singular or ill-conditioned");
    }
    h_low_ = inverse(h_up_);
    const auto red = L.reduced_basis();
    // s(b, a, d) = s^{ba}_d = 1/2 h_{dc} dbar^a(g^{bc}) - t^b delta^a_d
    s_ = std::vector<Jet>(m_ * m_ * m_);
    for (int a = 0; a < m_; ++a) {
      std::vector<Jet> D(m_ * m_);
      for (int b = 0; b < m_; ++b) {
        for (int c = 0; c < m_; ++c) D[b * m_ + c] = apply(red[a], geo_->g_upper()(b, c));
      }
      for (int b = 0; b < m_; ++b) {
        for (int d = 0; d < m_; ++d) {
          Jet acc = 0.5 * h_low_(d, 0) * D[b * m_];
          for (int c = 1; c < m_; ++c) acc += 0.5 * h_low_(d, c) * D[b * m_ + c];
          if (d == a) acc -= t[b];
          s(b, a, d) = acc;
        }
      }
    }
    // beta^a_{bi} dbar^b = P(dbar^a(N_ij) d^j)
    beta_ = std::vector<Jet>(m_ * m_ * n_);
    for (int i = 0; i < n_; ++i) {
      for (int a = 0; a < m_; ++a) {
        std::vector<Jet> Y(n_);
        for (int j = 0; j < n_; ++j) Y[j] = apply(red[a], geo_->N()(i, j));
        double defect = 0.0, size = 0.0;
        for (int j = 0; j < n_; ++j) {
          defect += geo_->p_upper()[j].value() * Y[j].value();
          size += std::abs(geo_->p_upper()[j].value() * Y[j].value());
        }
        defect_ = std::max(defect_, std::abs(defect));
        std::vector<Jet> PY(n_);
        for (int k = 0; k < n_; ++k) {
          Jet acc = Y[0] * L.P(0, k);
          for (int j = 1; j < n_; ++j) acc += Y[j] * L.P(j, k);
          PY[k] = acc;
        }
        const VerticalSplit sp = L.split(PY);
        for (int b = 0; b < m_; ++b) beta(a, b, i) = sp.reduced[b];
      }
    }
    s_mixed_ = -Eigen::MatrixXd::Identity(m_, m_);
    s_single_ = Eigen::VectorXd::Zero(m_);
    s_scalar_ = 1.0;
    beta_scalar_ = Eigen::VectorXd::Zero(n_);
  }

  [[nodiscard]] const Liouville& liouville() const { return *L_; }
  [[nodiscard]] int reduced_dim() const { return m_; }

  [[nodiscard]] const JetMat& h_upper() const { return h_up_; }
  [[nodiscard]] const JetMat& h_lower() const { return h_low_; }

  /// s^{ab}_c: nabla_{dbar^b} dbar^a = s^{ab}_c dbar^c
  [[nodiscard]] Jet& s(int a, int b, int c) { return s_[(a * m_ + b) * m_ + c]; }
  [[nodiscard]] const Jet& s(int a, int b, int c) const { return s_[(a * m_ + b) * m_ + c]; }
  /// beta^a_{bi}
  [[nodiscard]] Jet& beta(int a, int b, int i) { return beta_[(a * m_ + b) * n_ + i]; }
  [[nodiscard]] const Jet& beta(int a, int b, int i) const { return beta_[(a * m_ + b) * n_ + i]; }

  [[nodiscard]] double s_mixed(int a, int b) const { return s_mixed_(a, b); }
  [[nodiscard]] double s_single(int a) const { return s_single_(a); }
  [[nodiscard]] double s_scalar() const { return s_scalar_; }
  [[nodiscard]] double beta_scalar(int i) const { return beta_scalar_(i); }

  /// Overrides used to probe that the axioms pin the coefficients down.
  void perturb_s(int a, int b, int c, double eps) { s(a, b, c) += eps; }
  void set_s_mixed(const Eigen::MatrixXd& m) { s_mixed_ = m; }
  void set_s_scalar(double v) { s_scalar_ = v; }
  void set_s_single(const Eigen::VectorXd& v) { s_single_ = v; }

  /// nabla_X Y for a vertical Y (the horizontal part of Y is ignored).
  [[nodiscard]] VectorField cov(const VectorField& X, const VectorField& Y) const {
    const VerticalSplit xs = L_->split(X);
    const auto xh = fr_->horizontal(X);
    const VerticalSplit ys = L_->split(Y);
    std::vector<Jet> z(m_);
    for (int c = 0; c < m_; ++c) z[c] = apply(X, ys.reduced[c]);
    Jet z0 = apply(X, ys.liouville) + s_scalar_ * xs.liouville * ys.liouville;
    for (int a = 0; a < m_; ++a) {
      const Jet& ya = ys.reduced[a];
      for (int c = 0; c < m_; ++c) {
        Jet acc = s_mixed_(a, c) * xs.liouville;
        for (int b = 0; b < m_; ++b) acc += xs.reduced[b] * s(a, b, c);
        for (int i = 0; i < n_; ++i) {
          if (!is_zero(xh[i])) acc += xh[i] * beta(a, c, i);
        }
        z[c] += ya * acc;
      }
      z0 += s_single_(a) * xs.reduced[a] * ys.liouville;
    }
    for (int i = 0; i < n_; ++i) {
      if (beta_scalar_(i) != 0.0) z0 += beta_scalar_(i) * xh[i] * ys.liouville;
    }
    VectorField out = z0 * L_->C_star();
    const auto red = L_->reduced_basis();
    for (int c = 0; c < m_; ++c) out += z[c] * red[c];
    return out;
  }

  [[nodiscard]] VaismanConnection coefficients() const {
    VaismanConnection v;
    v.h_block = h_up_.values();
    v.h_inverse = h_low_.values();
    v.s_coeff = Tensor3(m_);
    for (int a = 0; a < m_; ++a) {
      for (int b = 0; b < m_; ++b) {
        for (int c = 0; c < m_; ++c) v.s_coeff(a, b, c) = s(a, b, c).value();
      }
    }
    v.s_mixed = s_mixed_;
    v.s_single = s_single_;
    v.s_scalar = s_scalar_;
    for (int i = 0; i < n_; ++i) {
      Eigen::MatrixXd b(m_, m_);
      for (int a = 0; a < m_; ++a) {
        for (int c = 0; c < m_; ++c) b(a, c) = beta(a, c, i).value();
      }
      v.beta.push_back(b);
    }
    v.beta_scalar = beta_scalar_;
    v.projection_defect = defect_;
    return v;
  }

 private:
  const Liouville* L_;
  const PhaseFrames* fr_;
  const Geometry* geo_;
  int n_;
  int m_;
  JetMat h_up_;
  JetMat h_low_;
  std::vector<Jet> s_;
  std::vector<Jet> beta_;
  Eigen::MatrixXd s_mixed_;
  Eigen::VectorXd s_single_;
  double s_scalar_ = 1.0;
  Eigen::VectorXd beta_scalar_;
  double defect_ = 0.0;
};

inline VaismanConnection vaisman(const CartanStructure& K, const PhasePoint& z,
                                 double p_floor = kDefaultPFloor) {
  const Geometry geo(K, z);
  const PhaseFrames fr(geo);
  const Liouville L(fr, p_floor);
  return Vaisman(L).coefficients();
}

/// Gram-measured size of a field.
inline double g_norm(const PhaseFrames& fr, const VectorField& X) {
  return std::sqrt(std::max(0.0, fr.G(X, X).value()));
}

/// Axioms a) to d) for the Vaisman connection, the explicit torsion
/// relations among the s coefficients, and dbar^a(K^2) = 0.
inline ResidualRecord vaisman_axiom_certificate(const Vaisman& V) {
  const Liouville& L = V.liouville();
  const PhaseFrames& fr = L.frames();
  const Geometry& geo = L.geometry();
  const int n = L.dim();
  const int m = V.reduced_dim();
  const auto red = L.reduced_basis();
  const VectorField C = L.C_star();
  const double K = geo.K().value();
  ResidualRecord r;

  std::vector<VectorField> dirs;
  for (int i = 0; i < n; ++i) dirs.push_back(fr.delta(i));
  for (const auto& d : red) dirs.push_back(d);
  dirs.push_back(C);

  // a) L_C* and {C*} are preserved
  for (const auto& X : dirs) {
    for (const auto& Y : red) {
      const VectorField out = V.cov(X, Y);
      const double size = g_norm(fr, out) + g_norm(fr, X) * g_norm(fr, Y);
      r.add("a_preserve_L", normalized(fr.G(out, C).value() / K, size));
    }
    const VectorField out = V.cov(X, C);
    r.add("a_preserve_C", normalized(g_norm(fr, L.project(out)), g_norm(fr, out) + g_norm(fr, X) * K));
  }

  // b) torsion projections
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const VectorField T = V.cov(red[a], red[b]) - V.cov(red[b], red[a]) - lie_bracket(red[a], red[b]);
      const double size = g_norm(fr, V.cov(red[a], red[b])) + g_norm(fr, V.cov(red[b], red[a])) + 1.0;
      r.add("b_torsion_L", normalized(g_norm(fr, L.project(T)), size));
    }
    const VectorField T = V.cov(red[a], C) - V.cov(C, red[a]) - lie_bracket(red[a], C);
    r.add("b_torsion_C", normalized(g_norm(fr, T), g_norm(fr, red[a]) * (1.0 + K)));
  }
  const auto& t = L.t();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int c = 0; c < m; ++c) {
        const double sab = V.s(a, b, c).value(), sba = V.s(b, a, c).value();
        const double size = std::abs(sab) + std::abs(sba) + std::abs(t[a].value());
        if (c != a && c != b) r.add("b_relations", normalized(sab - sba, size));
        if (c == b && a != b) r.add("b_relations", normalized(sba - sab - t[a].value(), size));
      }
    }
  }

  // c) metric compatibility on each block
  auto metric_defect = [&](const VectorField& X, const VectorField& Y, const VectorField& Z) {
    const double d = apply(X, fr.G(Y, Z)).value();
    const double u = fr.G(V.cov(X, Y), Z).value();
    const double w = fr.G(Y, V.cov(X, Z)).value();
    return normalized(d - u - w, std::abs(d) + std::abs(u) + std::abs(w));
  };
  for (const auto& X : red) {
    for (const auto& Y : red) {
      for (const auto& Z : red) r.add("c_metric_L", metric_defect(X, Y, Z));
    }
  }
  r.add("c_metric_C", metric_defect(C, C, C));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const double hv = V.h_upper()(a, b).value();
      r.add("h_block", normalized(hv - fr.G(red[a], red[b]).value(), std::abs(hv)));
    }
  }

  // d) beta_i = 0 and the beta table reproduces P(dbar^a(N_ij) d^j)
  for (int i = 0; i < n; ++i) {
    r.add("d_beta_scalar", std::abs(V.beta_scalar(i)));
    const VectorField out = V.cov(fr.delta(i), C);
    r.add("d_delta_C", normalized(g_norm(fr, out), K));
    for (int a = 0; a < m; ++a) {
      VectorField target = fr.zero();
      for (int j = 0; j < n; ++j) target += apply(red[a], geo.N()(i, j)) * fr.vertical(j);
      target = L.project(target);
      VectorField expanded = fr.zero();
      for (int b = 0; b < m; ++b) expanded += V.beta(a, b, i) * red[b];
      r.add("d_beta_relation", normalized(g_norm(fr, expanded - target), g_norm(fr, target) + 1.0));
      const VectorField via = V.cov(fr.delta(i), red[a]);
      r.add("d_beta_relation", normalized(g_norm(fr, via - target), g_norm(fr, target) + 1.0));
    }
  }
  r.note("projection_defect", V.coefficients().projection_defect);
  // Reading d) as v(T(delta_i, dbar^a)) = 0 with nabla_{dbar^a} delta_i = 0
  // would give beta from P[delta_i, dbar^a]; its distance to the table above
  // is recorded, not asserted.
  double gap = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < m; ++a) {
      const VectorField alt = L.project(lie_bracket(fr.delta(i), red[a]));
      const VectorField via = V.cov(fr.delta(i), red[a]);
      gap = std::max(gap, g_norm(fr, via - alt));
    }
  }
  r.note("beta_torsion_gap", gap);

  // dbar^a(K^2) = 0, i.e. (nabla_{dbar^a} G)(C*, C*) = 0
  for (const auto& X : red) {
    r.add("reinhart_liouville", metric_defect(X, C, C));
    r.add("reinhart_liouville", normalized(apply(X, geo.K2()).value(), geo.K2().value()));
  }
  return r;
}

/// Vranceanu gives nabla_{dbar^a} C* = dbar^a, Vaisman gives 0.
inline ResidualRecord connection_comparison(const Vranceanu& Vr, const Vaisman& Va) {
  const Liouville& L = Va.liouville();
  const VectorField C = L.C_star();
  ResidualRecord r;
  for (const auto& d : L.reduced_basis()) {
    r.add("vranceanu_dbar_C", field_residual(Vr.cov(d, C) - d, magnitude(d)));
    r.add("vaisman_dbar_C", field_residual(Va.cov(d, C), magnitude(d)));
  }
  return r;
}

/// Largest axiom residual after adding eps to s^{ab}_c.
inline double vaisman_perturbation_probe(const Liouville& L, int a, int b, int c, double eps) {
  Vaisman V(L);
  V.perturb_s(a, b, c, eps);
  return vaisman_axiom_certificate(V).max();
}

}  // namespace cartanv
