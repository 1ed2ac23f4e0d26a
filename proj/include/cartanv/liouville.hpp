#pragma once

/// The vertical Liouville apparatus: C*, xi*, zeta, t, the projector P onto
/// the Liouville distribution, the vertical fields dbar^j = d/dp_j - t^j C*
/// and the frame {Xbar^a, xi*, dbar^a, C*}.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/frames.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/residual.hpp"

namespace cartanv {

inline constexpr double kDefaultPFloor = 0.05;

struct LiouvilleData {
  Eigen::VectorXd zeta;  // zeta^i = p^i / K
  Eigen::VectorXd t;     // t^j = p^j / K^2
  Eigen::MatrixXd P;     // P(i, j) = P^i_j = delta^i_j - zeta^i p_j / K
  Eigen::MatrixXd E;     // row j: dbar^j in the d/dp basis
};

/// Decomposition of a vertical vector Y = c_a dbar^a + c0 C* (a < n).
struct VerticalSplit {
  std::vector<Jet> reduced;  // c_1..c_{n-1}
  Jet liouville;             // c0
};

class Liouville {
 public:
  explicit Liouville(const PhaseFrames& frames, double p_floor = kDefaultPFloor)
      : fr_(&frames), geo_(&frames.geometry()), n_(frames.dim()), p_floor_(p_floor) {
    const Jet K = geo_->K();
    const Jet K2 = geo_->K2();
    zeta_.resize(n_);
    t_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      zeta_[i] = geo_->p_upper()[i] / K;
      t_[i] = geo_->p_upper()[i] / K2;
    }
    reduced_ok_ = geo_->point().last_momentum_admissible(p_floor_);
  }

  [[nodiscard]] const PhaseFrames& frames() const { return *fr_; }
  [[nodiscard]] const Geometry& geometry() const { return *geo_; }
  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] double p_floor() const { return p_floor_; }

  [[nodiscard]] const std::vector<Jet>& zeta() const { return zeta_; }
  [[nodiscard]] const std::vector<Jet>& t() const { return t_; }

  /// P^i_j
  [[nodiscard]] Jet P(int i, int j) const {
    Jet out = -(zeta_[i] * geo_->p(j)) / geo_->K();
    if (i == j) out += 1.0;
    return out;
  }

  [[nodiscard]] VectorField C_star() const { return fr_->C_star(); }
  [[nodiscard]] VectorField xi_star() const { return fr_->xi_star(); }

  /// dbar^j = d/dp_j - t^j C*
  [[nodiscard]] VectorField dbar(int j) const {
    VectorField X = fr_->vertical(j);
    X -= t_[j] * fr_->C_star();
    return X;
  }

  [[nodiscard]] bool reduced_available() const { return reduced_ok_; }
  void require_reduced() const {
    if (!reduced_ok_) {
      throw AdaptedBasisDegenerate("|p_n| below p_floor * |p|: reduced vertical basis unavailable");
    }
  }

  /// dbar^1..dbar^{n-1}
  [[nodiscard]] std::vector<VectorField> reduced_basis() const {
    require_reduced();
    std::vector<VectorField> out;
    for (int a = 0; a + 1 < n_; ++a) out.push_back(dbar(a));
    return out;
  }

  /// Coefficients d_a with dbar^n = d_a dbar^a, d_a = -p_a / p_n.
  [[nodiscard]] Eigen::VectorXd dependency() const {
    require_reduced();
    const auto& p = geo_->point().p;
    Eigen::VectorXd d(n_ - 1);
    for (int a = 0; a + 1 < n_; ++a) d(a) = -p(a) / p(n_ - 1);
    return d;
  }

  /// zeta(X) = G(X, C*) / K; only the vertical part of X contributes.
  [[nodiscard]] Jet zeta_of(const VectorField& X) const {
    const auto v = fr_->vertical_part(X);
    Jet acc = zeta_[0] * v[0];
    for (int i = 1; i < n_; ++i) acc += zeta_[i] * v[i];
    return acc;
  }

  /// P applied to the vertical part of X: X_v - zeta(X) C* / K.
  [[nodiscard]] VectorField project(const VectorField& X) const {
    const auto v = fr_->vertical_part(X);
    VectorField out = fr_->zero();
    for (int j = 0; j < n_; ++j) {
      Jet acc = v[0] * P(0, j);
      for (int i = 1; i < n_; ++i) acc += v[i] * P(i, j);
      out.c[n_ + j] = acc;
    }
    return out;
  }

  /// Coefficients of a vertical vector (given by its d/dp components) in
  /// the frame {dbar^1..dbar^{n-1}, C*}.
  [[nodiscard]] VerticalSplit split(const std::vector<Jet>& Y) const {
    require_reduced();
    VerticalSplit s;
    const Jet& pn = geo_->p(n_ - 1);
    for (int a = 0; a + 1 < n_; ++a) s.reduced.push_back(Y[a] - Y[n_ - 1] * geo_->p(a) / pn);
    Jet c0 = t_[0] * Y[0];
    for (int j = 1; j < n_; ++j) c0 += t_[j] * Y[j];
    s.liouville = c0;
    return s;
  }

  [[nodiscard]] VerticalSplit split(const VectorField& Y) const {
    return split(fr_->vertical_part(Y));
  }

  /// {Xbar^1..Xbar^{n-1}, xi*, dbar^1..dbar^{n-1}, C*}
  [[nodiscard]] std::vector<VectorField> full_frame() const {
    const auto red = reduced_basis();
    std::vector<VectorField> out;
    for (const auto& d : red) out.push_back(fr_->J(d));
    out.push_back(xi_star());
    for (const auto& d : red) out.push_back(d);
    out.push_back(C_star());
    return out;
  }

  [[nodiscard]] LiouvilleData data() const {
    LiouvilleData d;
    d.zeta = values(zeta_);
    d.t = values(t_);
    d.P.resize(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) d.P(i, j) = P(i, j).value();
    }
    const Eigen::VectorXd p = geo_->point().p;
    d.E = Eigen::MatrixXd::Identity(n_, n_) - d.t * p.transpose();
    return d;
  }

 private:
  const PhaseFrames* fr_;
  const Geometry* geo_;
  int n_;
  double p_floor_;
  std::vector<Jet> zeta_;
  std::vector<Jet> t_;
  bool reduced_ok_ = false;
};

/// Max-abs of the natural components of a field, for normalization.
inline double magnitude(const VectorField& X) { return X.value().cwiseAbs().maxCoeff(); }

/// Residual of a field that should vanish, normalized by a reference size.
inline double field_residual(const VectorField& X, double scale) {
  return normalized(X.value().cwiseAbs().maxCoeff(), scale);
}

/// p_i t^i = 1, p_i dbar^i = 0, dt^i/dp_j = -2 t^i t^j + g^ij / K^2,
/// C*(t^j) = -t^j.
inline ResidualRecord t_identities(const Liouville& L) {
  const Geometry& geo = L.geometry();
  const int n = L.dim();
  ResidualRecord r;
  double pt = 0.0;
  for (int i = 0; i < n; ++i) pt += geo.point().p(i) * L.t()[i].value();
  r.add("p_t", normalized(pt - 1.0, 1.0));
  VectorField sum = L.frames().zero();
  for (int i = 0; i < n; ++i) sum += geo.p(i) * L.dbar(i);
  r.add("p_dbar", field_residual(sum, geo.point().p.squaredNorm()));
  const double k2 = geo.K2().value();
  const VectorField C = L.C_star();
  for (int i = 0; i < n; ++i) {
    const double ti = L.t()[i].value();
    for (int j = 0; j < n; ++j) {
      const double lhs = L.t()[i].partial(geo.pvar(j)).value();
      const double rhs = -2.0 * ti * L.t()[j].value() + geo.g_upper()(i, j).value() / k2;
      r.add("dt_dp", normalized(lhs - rhs, std::abs(lhs) + std::abs(rhs)));
    }
    const double ct = apply(C, L.t()[i]).value();
    r.add("euler_t", normalized(ct + ti, std::abs(ti)));
  }
  return r;
}

/// [dbar^i, dbar^j] = t^i dbar^j - t^j dbar^i and [dbar^i, C*] = dbar^i.
inline ResidualRecord dbar_brackets(const Liouville& L) {
  const int n = L.dim();
  ResidualRecord r;
  const VectorField C = L.C_star();
  std::vector<VectorField> d;
  for (int i = 0; i < n; ++i) d.push_back(L.dbar(i));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const VectorField lhs = lie_bracket(d[i], d[j]);
      const VectorField rhs = L.t()[i] * d[j] - L.t()[j] * d[i];
      r.add("dbar_dbar", field_residual(lhs - rhs, magnitude(lhs) + magnitude(rhs)));
    }
    const VectorField lhs = lie_bracket(d[i], C);
    r.add("dbar_C", field_residual(lhs - d[i], magnitude(lhs) + magnitude(d[i])));
    // [dbar^i, C*] has no C* component
    r.add("dbar_C_zeta", normalized(L.zeta_of(lhs).value(), magnitude(lhs)));
  }
  return r;
}

/// dbar^n + (p_a / p_n) dbar^a = 0, rank of the retained rows, smallest
/// singular value, and G(dbar^j, C*) = 0.
inline ResidualRecord reduced_basis_suite(const Liouville& L) {
  L.require_reduced();
  const int n = L.dim();
  const Geometry& geo = L.geometry();
  const auto& p = geo.point().p;
  ResidualRecord r;
  VectorField dep = L.dbar(n - 1);
  for (int a = 0; a + 1 < n; ++a) dep += (p(a) / p(n - 1)) * L.dbar(a);
  r.add("dependency", field_residual(dep, magnitude(L.dbar(n - 1))));
  const VectorField C = L.C_star();
  for (int j = 0; j < n; ++j) {
    r.add("orthogonal_C", normalized(L.frames().G(L.dbar(j), C).value(), geo.K2().value()));
  }
  const LiouvilleData d = L.data();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d.E.topRows(n - 1));
  r.note("min_singular_value", svd.singularValues().minCoeff());
  // Together with C*, the retained fields span the vertical space.
  Eigen::MatrixXd basis(n, n);
  basis.topRows(n - 1) = d.E.topRows(n - 1);
  basis.row(n - 1) = p.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> full(basis);
  r.note("adapted_rank", static_cast<double>(full.rank()));
  return r;
}

/// max_{a,b} |G([dbar^a, dbar^b], C*)|; zero certifies integrability of the
/// Liouville distribution.
inline double integrability_residual(const Liouville& L) {
  const auto red = L.reduced_basis();
  const VectorField C = L.C_star();
  const double k2 = L.geometry().K2().value();
  double worst = 0.0;
  for (std::size_t a = 0; a < red.size(); ++a) {
    for (std::size_t b = a + 1; b < red.size(); ++b) {
      const VectorField br = lie_bracket(red[a], red[b]);
      worst = std::max(worst, normalized(L.frames().G(br, C).value(),
                                         std::sqrt(k2) * magnitude(br) + k2));
    }
  }
  return worst;
}

/// Control quantity: G([dbar^a, C*], dbar^b) is not predicted to vanish.
inline double integrability_control(const Liouville& L) {
  const auto red = L.reduced_basis();
  const VectorField C = L.C_star();
  double m = 0.0;
  for (const auto& a : red) {
    for (const auto& b : red) m = std::max(m, std::abs(L.frames().G(lie_bracket(a, C), b).value()));
  }
  return m;
}

/// Gram structure of the frame {Xbar^a, xi*, dbar^a, C*}: the four blocks
/// are mutually G-orthogonal, G(xi*, xi*) = K^2 and J(xi*) = -C*.
inline ResidualRecord frame_decomposition(const Liouville& L) {
  const int n = L.dim();
  const auto frame = L.full_frame();
  const PhaseFrames& fr = L.frames();
  const double k2 = L.geometry().K2().value();
  ResidualRecord r;
  const int m = 2 * n;
  Eigen::MatrixXd gram(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) gram(i, j) = fr.G(frame[i], frame[j]).value();
  }
  auto block = [n](int k) {
    if (k < n - 1) return 0;
    if (k == n - 1) return 1;
    if (k < 2 * n - 1) return 2;
    return 3;
  };
  const double scale = gram.cwiseAbs().maxCoeff();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (block(i) != block(j)) r.add("block_orthogonality", normalized(gram(i, j), scale));
    }
  }
  r.add("xi_norm", normalized(gram(n - 1, n - 1) - k2, k2));
  r.add("C_norm", normalized(gram(m - 1, m - 1) - k2, k2));
  const VectorField jxi = fr.J(frame[n - 1]);
  r.add("J_xi", field_residual(jxi + frame[m - 1], magnitude(frame[m - 1])));
  Eigen::MatrixXd comps(m, m);
  for (int i = 0; i < m; ++i) comps.col(i) = frame[i].value();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(comps);
  r.note("frame_rank", static_cast<double>(svd.rank()));
  r.add("rank_defect", static_cast<double>(m - svd.rank()));
  return r;
}

/// For vertical X, Y: G(PX, PY) = G(X, Y) - zeta(X) zeta(Y), P^2 = P, P kills
/// C*, X = PX + zeta(X) C* / K, and the two expressions of P agree.
inline ResidualRecord projector_suite(const Liouville& L, const VectorField& X, const VectorField& Y) {
  const Geometry& geo = L.geometry();
  const PhaseFrames& fr = L.frames();
  const int n = L.dim();
  ResidualRecord r;
  const VectorField px = L.project(X);
  const VectorField py = L.project(Y);
  const double lhs = fr.G(px, py).value();
  const double rhs = fr.G(X, Y).value() - L.zeta_of(X).value() * L.zeta_of(Y).value();
  r.add("metric", normalized(lhs - rhs, magnitude(X) * magnitude(Y) * geo.g_upper().values().norm()));
  r.add("idempotent", field_residual(L.project(px) - px, magnitude(px)));
  r.add("kills_C", field_residual(L.project(L.C_star()), magnitude(L.C_star())));
  const VectorField rebuilt = px + (L.zeta_of(X) / geo.K()) * L.C_star();
  r.add("reconstruction", field_residual(rebuilt - X, magnitude(X)));
  const double k2 = geo.K2().value();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double alt = (i == j ? 1.0 : 0.0) - geo.p_upper()[i].value() * geo.point().p(j) / k2;
      r.add("alternate_form", normalized(L.P(i, j).value() - alt, 1.0));
    }
  }
  // L_C* membership: g^ij (PX)_i p_j = 0
  double mem = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) mem += geo.g_upper()(i, j).value() * px.p(i).value() * geo.point().p(j);
  }
  r.add("membership", normalized(mem, magnitude(px) * geo.point().p.norm()));
  return r;
}

inline LiouvilleData liouville_data(const Liouville& L) { return L.data(); }

}  // namespace cartanv
