#pragma once

/// Basic connections for the subfoliation (F_V, F_C*): the Vaisman
/// connection on L_C*, the Vranceanu connection restricted to the horizontal
/// bundle, and their direct sum on {C*}^perp.
///
/// The normal bundles are realized as G-orthogonal complements:
///   pi0: V -> L_C*          (the projector P),
///   pi1: T -> H             (drop the vertical adapted components),
///   pi2: T -> {C*}^perp     (remove the G-component along C*).

#include <cmath>
#include <vector>

#include "cartanv/connections.hpp"
#include "cartanv/frames.hpp"
#include "cartanv/liouville.hpp"
#include "cartanv/random.hpp"
#include "cartanv/residual.hpp"

namespace cartanv {

class BasicTriple {
 public:
  BasicTriple(const Vranceanu& vr, const Vaisman& va)
      : vr_(&vr), va_(&va), L_(&va.liouville()), fr_(&va.liouville().frames()) {}

  [[nodiscard]] const Liouville& liouville() const { return *L_; }
  [[nodiscard]] const PhaseFrames& frames() const { return *fr_; }
  [[nodiscard]] const Vranceanu& vranceanu() const { return *vr_; }
  [[nodiscard]] const Vaisman& vaisman() const { return *va_; }

  [[nodiscard]] VectorField pi0(const VectorField& Y) const { return L_->project(Y); }
  [[nodiscard]] VectorField pi1(const VectorField& Y) const { return vr_->horizontal_part(Y); }
  [[nodiscard]] VectorField pi2(const VectorField& Y) const {
    const VectorField C = L_->C_star();
    return Y - (fr_->G(Y, C) / L_->geometry().K2()) * C;
  }

  /// nabla^v on L_C*
  [[nodiscard]] VectorField nabla_L(const VectorField& X, const VectorField& Y) const {
    return va_->cov(X, pi0(Y));
  }
  /// Vranceanu restricted to H
  [[nodiscard]] VectorField nabla_H(const VectorField& X, const VectorField& Y) const {
    return pi1(vr_->cov(X, pi1(Y)));
  }
  /// nabla-bar on {C*}^perp = H + L_C*
  [[nodiscard]] VectorField nabla_perp(const VectorField& X, const VectorField& Z) const {
    const VectorField zh = pi1(Z);
    const VectorField zl = pi0(Z - zh);
    return nabla_H(X, zh) + va_->cov(X, zl);
  }

 private:
  const Vranceanu* vr_;
  const Vaisman* va_;
  const Liouville* L_;
  const PhaseFrames* fr_;
};

/// Random fields with polynomial coefficients of degree <= 2.
inline VectorField random_field(const PhaseFrames& fr, Rng& rng) {
  const auto& coords = fr.geometry().coords();
  VectorField X = fr.zero();
  for (auto& c : X.c) c = random_polynomial(coords, rng);
  return X;
}

inline VectorField random_vertical(const PhaseFrames& fr, Rng& rng) {
  const auto& coords = fr.geometry().coords();
  VectorField X = fr.zero();
  for (int i = 0; i < fr.dim(); ++i) X.c[fr.dim() + i] = random_polynomial(coords, rng);
  return X;
}

inline Jet random_x_polynomial(const PhaseFrames& fr, Rng& rng) {
  const auto& coords = fr.geometry().coords();
  return random_polynomial(std::span<const Jet>(coords.data(), static_cast<std::size_t>(fr.dim())), rng);
}

inline double relative_field(const PhaseFrames& fr, const VectorField& diff,
                             std::initializer_list<const VectorField*> terms) {
  double size = 0.0;
  for (const VectorField* t : terms) size += g_norm(fr, *t);
  return normalized(g_norm(fr, diff), size);
}

/// nabla^1_{C*} dbar^i = -dbar^i, and nabla^1_{C*} Z = [C*, Z] on L_C*.
inline ResidualRecord basic_check_L(const BasicTriple& T, Rng& rng) {
  const Liouville& L = T.liouville();
  const PhaseFrames& fr = T.frames();
  L.require_reduced();
  const int n = L.dim();
  const VectorField C = L.C_star();
  ResidualRecord r;
  for (int i = 0; i < n; ++i) {
    const VectorField d = L.dbar(i);
    const VectorField lhs = T.nabla_L(C, d);
    r.add("adapted", relative_field(fr, lhs + d, {&lhs, &d}));
  }
  auto field_level = [&](const VectorField& Z, const char* name) {
    const VectorField lhs = T.nabla_L(C, Z);
    const VectorField br = lie_bracket(C, Z);
    r.add(name, relative_field(fr, lhs - br, {&lhs, &br}));
    // [C*, Z] = (C*(Z_a) - Z_a) dbar^a with Z = Z_a dbar^a
    const VerticalSplit s = L.split(Z);
    const auto red = L.reduced_basis();
    VectorField expanded = fr.zero();
    for (std::size_t a = 0; a < red.size(); ++a) expanded += (apply(C, s.reduced[a]) - s.reduced[a]) * red[a];
    r.add("bracket_expansion", relative_field(fr, expanded - br, {&expanded, &br}));
  };
  field_level(L.project(random_vertical(fr, rng)), "field");
  {
    VectorField Z = fr.zero();
    const auto red = L.reduced_basis();
    const Jet f = random_x_polynomial(fr, rng);
    for (std::size_t a = 0; a < red.size(); ++a) Z += (fr.geometry().p(static_cast<int>(a)) * f) * red[a];
    field_level(Z, "p_coefficients");
  }
  {
    const VectorField Z = L.project(random_vertical(fr, rng));
    const Jet a = random_polynomial(fr.geometry().coords(), rng);
    const Jet b = random_polynomial(fr.geometry().coords(), rng);
    const VectorField X = a * C;
    const VectorField Zt = Z + b * C;
    const VectorField lhs = T.pi0(lie_bracket(X, Zt));
    const VectorField rhs = a * lie_bracket(C, Z);
    const VectorField nab = T.nabla_L(X, Z);
    r.add("scaling", relative_field(fr, lhs - rhs, {&lhs, &rhs}));
    r.add("scaling", relative_field(fr, nab - lhs, {&nab, &lhs}));
  }
  return r;
}

/// nabla^2_{d^j} delta_i = 0 and nabla^2_X Y = pi1[X, Y~] for vertical X.
inline ResidualRecord basic_check_H(const BasicTriple& T, Rng& rng) {
  const PhaseFrames& fr = T.frames();
  const int n = fr.dim();
  ResidualRecord r;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const VectorField d = T.nabla_H(fr.vertical(j), fr.delta(i));
      r.add("adapted", normalized(g_norm(fr, d), 1.0));
      const VectorField br = lie_bracket(fr.vertical(j), fr.delta(i));
      const VectorField h = T.pi1(br);
      r.add("bracket_vertical", relative_field(fr, h, {&br}));
    }
  }
  auto field_level = [&](const VectorField& X, const VectorField& Yt, const char* name) {
    const VectorField lhs = T.nabla_H(X, T.pi1(Yt));
    const VectorField rhs = T.pi1(lie_bracket(X, Yt));
    r.add(name, relative_field(fr, lhs - rhs, {&lhs, &rhs}));
  };
  field_level(random_vertical(fr, rng), random_field(fr, rng), "field");
  field_level(random_vertical(fr, rng), random_vertical(fr, rng), "field");
  {
    std::vector<Jet> h(n), v(n);
    for (int i = 0; i < n; ++i) {
      h[i] = fr.geometry().p(i);
      v[i] = random_polynomial(fr.geometry().coords(), rng);
    }
    field_level(random_vertical(fr, rng), fr.from_adapted(h, v), "p_coefficients");
  }
  return r;
}

/// nabla-bar_{C*} delta_i = 0, nabla-bar_{C*} dbar^i = -dbar^i, C*(N_ji) = N_ji,
/// and nabla-bar_{aC*} Y = pi2[aC*, Y~].
inline ResidualRecord basic_check_perp(const BasicTriple& T, Rng& rng) {
  const Liouville& L = T.liouville();
  const PhaseFrames& fr = T.frames();
  const Geometry& geo = L.geometry();
  L.require_reduced();
  const int n = L.dim();
  const VectorField C = L.C_star();
  ResidualRecord r;
  for (int i = 0; i < n; ++i) {
    const VectorField d = fr.delta(i);
    const VectorField lhs = T.nabla_perp(C, d);
    r.add("delta", relative_field(fr, lhs, {&d}));
    const VectorField db = L.dbar(i);
    const VectorField out = T.nabla_perp(C, db);
    r.add("dbar", relative_field(fr, out + db, {&out, &db}));
    for (int j = 0; j < n; ++j) {
      const Jet& N = geo.N()(j, i);
      r.add("homogeneity", normalized((apply(C, N) - N).value(), std::abs(N.value())));
    }
  }
  for (int trial = 0; trial < 2; ++trial) {
    const Jet a = random_polynomial(geo.coords(), rng);
    const Jet f = random_polynomial(geo.coords(), rng);
    const VectorField Y = T.pi2(random_field(fr, rng));
    const VectorField Yt = Y + f * C;
    const VectorField X = a * C;
    const VectorField lhs = T.nabla_perp(X, Y);
    const VectorField rhs = T.pi2(lie_bracket(X, Yt));
    r.add("field", relative_field(fr, lhs - rhs, {&lhs, &rhs}));
  }
  return r;
}

/// i(nabla^v_X Y) = nabla-bar_X i(Y) for Y in L_C*, and
/// pi(nabla-bar_X Z) = nabla^1_X pi(Z) for Z in {C*}^perp.
inline ResidualRecord triple_compatibility(const BasicTriple& T, Rng& rng) {
  const Liouville& L = T.liouville();
  const PhaseFrames& fr = T.frames();
  ResidualRecord r;
  std::vector<VectorField> dirs{random_field(fr, rng), random_field(fr, rng), L.C_star()};
  for (const auto& X : dirs) {
    const VectorField Y = L.project(random_vertical(fr, rng));
    const VectorField a = T.nabla_L(X, Y);
    const VectorField b = T.nabla_perp(X, Y);
    r.add("inclusion", relative_field(fr, a - b, {&a, &b}));
    const VectorField Z = T.pi2(random_field(fr, rng));
    const VectorField c = T.pi1(T.nabla_perp(X, Z));
    const VectorField d = T.nabla_H(X, T.pi1(Z));
    r.add("projection", relative_field(fr, c - d, {&c, &d}));
    const VectorField Zh = T.pi1(Z);
    const VectorField e = T.pi1(T.nabla_perp(X, Zh));
    const VectorField f = T.nabla_H(X, Zh);
    r.add("projection_horizontal", relative_field(fr, e - f, {&e, &f}));
  }
  // Each connection maps into its own bundle.
  for (const auto& X : dirs) {
    const VectorField Y = L.project(random_vertical(fr, rng));
    const VectorField a = T.nabla_L(X, Y);
    const VectorField out_L = a - T.pi0(a);
    r.add("bundle_L", relative_field(fr, out_L, {&a}));
    const VectorField Z = T.pi2(random_field(fr, rng));
    const VectorField b = T.nabla_perp(X, Z);
    const VectorField out_perp = b - T.pi2(b);
    r.add("bundle_perp", relative_field(fr, out_perp, {&b}));
    const VectorField c = T.vranceanu().cov(X, T.pi1(Z));
    const VectorField out_H = c - T.pi1(c);
    r.add("bundle_H", relative_field(fr, out_H, {&c}));
  }
  return r;
}

/// A section of {C*}^perp by its coefficients in the frame
/// {delta_1..delta_n, dbar^1..dbar^{n-1}}.
struct PerpCoefficients {
  std::vector<Jet> h;
  std::vector<Jet> l;
};

inline PerpCoefficients perp_coefficients(const BasicTriple& T, const VectorField& Z) {
  const VectorField zh = T.pi1(Z);
  return {T.frames().horizontal(Z), T.liouville().split(T.pi0(Z - zh)).reduced};
}

inline VectorField perp_field(const BasicTriple& T, const PerpCoefficients& w) {
  const PhaseFrames& fr = T.frames();
  VectorField out = fr.zero();
  for (int i = 0; i < fr.dim(); ++i) out += w.h[i] * fr.delta(i);
  const auto red = T.liouville().reduced_basis();
  for (std::size_t a = 0; a < red.size(); ++a) out += w.l[a] * red[a];
  return out;
}

/// nabla-bar_X on coefficients: only the coefficients are differentiated,
/// the frame enters through the connection tables.
inline PerpCoefficients nabla_perp_coefficients(const BasicTriple& T, const VectorField& X,
                                                const PerpCoefficients& w) {
  const PhaseFrames& fr = T.frames();
  const Vaisman& va = T.vaisman();
  const JetTensor3& H = T.vranceanu().H();
  const int n = fr.dim();
  const int m = va.reduced_dim();
  const auto xh = fr.horizontal(X);
  const VerticalSplit xs = T.liouville().split(X);
  PerpCoefficients out;
  for (int k = 0; k < n; ++k) {
    Jet acc = apply(X, w.h[k]);
    for (int j = 0; j < n; ++j) {
      if (is_zero(xh[j])) continue;
      for (int i = 0; i < n; ++i) acc += w.h[i] * xh[j] * H(k, i, j);
    }
    out.h.push_back(acc);
  }
  for (int c = 0; c < m; ++c) {
    Jet acc = apply(X, w.l[c]);
    for (int a = 0; a < m; ++a) {
      Jet coef = va.s_mixed(a, c) * xs.liouville;
      for (int b = 0; b < m; ++b) coef += xs.reduced[b] * va.s(a, b, c);
      for (int i = 0; i < n; ++i) {
        if (!is_zero(xh[i])) coef += xh[i] * va.beta(a, c, i);
      }
      acc += w.l[a] * coef;
    }
    out.l.push_back(acc);
  }
  return out;
}

inline PerpCoefficients operator-(PerpCoefficients a, const PerpCoefficients& b) {
  for (std::size_t i = 0; i < a.h.size(); ++i) a.h[i] -= b.h[i];
  for (std::size_t i = 0; i < a.l.size(); ++i) a.l[i] -= b.l[i];
  return a;
}

/// K(X, Y)W = nabla_X nabla_Y W - nabla_Y nabla_X W - nabla_[X,Y] W for
/// the connection nabla-bar on {C*}^perp.
inline VectorField perp_curvature(const BasicTriple& T, const VectorField& X, const VectorField& Y,
                                  const PerpCoefficients& W) {
  const PerpCoefficients k = nabla_perp_coefficients(T, X, nabla_perp_coefficients(T, Y, W)) -
                             nabla_perp_coefficients(T, Y, nabla_perp_coefficients(T, X, W)) -
                             nabla_perp_coefficients(T, lie_bracket(X, Y), W);
  return perp_field(T, k);
}

inline PerpCoefficients random_perp(const BasicTriple& T, Rng& rng) {
  const auto& coords = T.liouville().geometry().coords();
  PerpCoefficients w;
  for (int i = 0; i < T.frames().dim(); ++i) w.h.push_back(random_polynomial(coords, rng));
  for (int a = 0; a < T.vaisman().reduced_dim(); ++a) w.l.push_back(random_polynomial(coords, rng));
  return w;
}

/// K(aC*, bC*)W = 0 for random a, b, W, with the a = b = 1 and W = delta_1
/// cases. The coefficient form of nabla-bar is first checked against the
/// field form.
inline ResidualRecord line_curvature_check(const BasicTriple& T, Rng& rng) {
  const Liouville& L = T.liouville();
  const PhaseFrames& fr = T.frames();
  const Geometry& geo = L.geometry();
  const VectorField C = L.C_star();
  ResidualRecord r;
  {
    const VectorField X = random_field(fr, rng);
    const VectorField Z = T.pi2(random_field(fr, rng));
    const VectorField a = T.nabla_perp(X, Z);
    const VectorField b = perp_field(T, nabla_perp_coefficients(T, X, perp_coefficients(T, Z)));
    r.add("coefficient_form", relative_field(fr, a - b, {&a, &b}));
  }
  auto measure = [&](const Jet& a, const Jet& b, const PerpCoefficients& W, const char* name) {
    const VectorField X = a * C, Y = b * C;
    const VectorField k = perp_curvature(T, X, Y, W);
    const VectorField t1 = perp_field(T, nabla_perp_coefficients(T, X, nabla_perp_coefficients(T, Y, W)));
    const VectorField t2 = perp_field(T, nabla_perp_coefficients(T, Y, nabla_perp_coefficients(T, X, W)));
    r.add(name, relative_field(fr, k, {&t1, &t2}));
  };
  const Jet one = geo.constant(1.0);
  measure(one, one, random_perp(T, rng), "unit");
  measure(random_polynomial(geo.coords(), rng), random_polynomial(geo.coords(), rng), random_perp(T, rng),
          "random");
  PerpCoefficients d1;
  for (int i = 0; i < fr.dim(); ++i) d1.h.push_back(geo.constant(i == 0 ? 1.0 : 0.0));
  for (int a = 0; a < T.vaisman().reduced_dim(); ++a) d1.l.push_back(geo.constant(0.0));
  measure(random_polynomial(geo.coords(), rng), random_polynomial(geo.coords(), rng), d1, "delta");
  return r;
}

}  // namespace cartanv
