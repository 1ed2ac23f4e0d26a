#pragma once

/// Vector fields on phase space, the adapted frame {delta_i, d/dp_i}, the
/// lifted metric G, the almost complex structure J and the symplectic form.
///
/// A vector field is stored as its 2n natural components (d/dx^1..d/dx^n,
/// d/dp_1..d/dp_n), each a jet at the base point. Brackets and directional
/// derivatives consume one order of every component.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

#include "cartanv/geometry.hpp"
#include "cartanv/jet.hpp"
#include "cartanv/tensor.hpp"

namespace cartanv {

struct VectorField {
  std::vector<Jet> c;

  VectorField() = default;
  explicit VectorField(std::vector<Jet> comps) : c(std::move(comps)) {}

  static VectorField zero(const LayoutPtr& layout) {
    return VectorField(std::vector<Jet>(layout->num_vars(), Jet::constant(layout, 0.0)));
  }

  [[nodiscard]] int dim() const { return static_cast<int>(c.size() / 2); }
  [[nodiscard]] const Jet& x(int i) const { return c[i]; }
  [[nodiscard]] const Jet& p(int i) const { return c[dim() + i]; }

  [[nodiscard]] Eigen::VectorXd value() const { return values(c); }

  VectorField& operator+=(const VectorField& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.c[k];
    return *this;
  }
  VectorField& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  VectorField& operator*=(const Jet& f) {
    for (auto& v : c) v *= f;
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator-(VectorField a) { return a *= -1.0; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }
  friend VectorField operator*(const Jet& f, VectorField a) { return a *= f; }
};

/// X(f) = sum_v X^v df/dz^v
inline Jet apply(const VectorField& X, const Jet& f) {
  Jet out = X.c[0] * f.partial(0);
  for (std::size_t v = 1; v < X.c.size(); ++v) out += X.c[v] * f.partial(static_cast<int>(v));
  return out;
}

/// [A, B]^k = A(B^k) - B(A^k)
inline VectorField lie_bracket(const VectorField& A, const VectorField& B) {
  VectorField out;
  out.c.reserve(A.c.size());
  for (std::size_t k = 0; k < A.c.size(); ++k) out.c.push_back(apply(A, B.c[k]) - apply(B, A.c[k]));
  return out;
}

/// A k-form given by its values on k vector fields.
using Form = std::function<Jet(std::span<const VectorField>)>;

/// (dw)(X_0..X_k) by the invariant formula
///   sum_i (-1)^i X_i(w(..^i..)) + sum_{i<j} (-1)^{i+j} w([X_i, X_j], ..^i..^j..).
inline Jet exterior_derivative(const Form& w, std::span<const VectorField> fields) {
  const int k1 = static_cast<int>(fields.size());
  Jet out;
  auto add = [&out](const Jet& term, double sign) {
    if (out.empty()) {
      out = sign * term;
    } else {
      out += sign * term;
    }
  };
  for (int i = 0; i < k1; ++i) {
    std::vector<VectorField> rest;
    for (int m = 0; m < k1; ++m) {
      if (m != i) rest.push_back(fields[m]);
    }
    add(apply(fields[i], w(rest)), (i % 2 == 0) ? 1.0 : -1.0);
  }
  for (int i = 0; i < k1; ++i) {
    for (int j = i + 1; j < k1; ++j) {
      std::vector<VectorField> args{lie_bracket(fields[i], fields[j])};
      for (int m = 0; m < k1; ++m) {
        if (m != i && m != j) args.push_back(fields[m]);
      }
      add(w(args), ((i + j) % 2 == 0) ? 1.0 : -1.0);
    }
  }
  return out;
}

struct SasakiData {
  Eigen::MatrixXd G_adapted;      // g_ij (+) g^ij in the coframe {dx^i, delta p_i}
  Eigen::MatrixXd G_natural;
  Eigen::MatrixXd J_natural;
  Eigen::MatrixXd Omega_natural;  // Omega(X, Y) = X^T Omega Y
};

/// Frame fields and the almost Kaehler structure built on a Geometry.
class PhaseFrames {
 public:
  explicit PhaseFrames(const Geometry& geo) : geo_(&geo), n_(geo.dim()) {}

  [[nodiscard]] const Geometry& geometry() const { return *geo_; }
  [[nodiscard]] int dim() const { return n_; }

  [[nodiscard]] VectorField zero() const { return VectorField::zero(geo_->layout()); }

  [[nodiscard]] VectorField coordinate(int var) const {
    VectorField X = zero();
    X.c[var] = geo_->constant(1.0);
    return X;
  }

  /// delta_i = d/dx^i + N_ij d/dp_j
  [[nodiscard]] VectorField delta(int i) const {
    VectorField X = coordinate(i);
    for (int j = 0; j < n_; ++j) X.c[n_ + j] = geo_->N()(i, j);
    return X;
  }

  /// d/dp_i
  [[nodiscard]] VectorField vertical(int i) const { return coordinate(n_ + i); }

  /// C* = p_i d/dp_i
  [[nodiscard]] VectorField C_star() const {
    VectorField X = zero();
    for (int i = 0; i < n_; ++i) X.c[n_ + i] = geo_->p(i);
    return X;
  }

  /// xi* = p^j delta_j
  [[nodiscard]] VectorField xi_star() const {
    VectorField X = zero();
    for (int j = 0; j < n_; ++j) X += geo_->p_upper()[j] * delta(j);
    return X;
  }

  /// Adapted components: horizontal h^i = dx^i(X), vertical v_k = delta p_k(X).
  [[nodiscard]] std::vector<Jet> horizontal(const VectorField& X) const {
    return {X.c.begin(), X.c.begin() + n_};
  }
  [[nodiscard]] std::vector<Jet> vertical_part(const VectorField& X) const {
    std::vector<Jet> v(n_);
    for (int k = 0; k < n_; ++k) {
      Jet acc = X.c[n_ + k];
      for (int j = 0; j < n_; ++j) acc -= geo_->N()(j, k) * X.c[j];
      v[k] = acc;
    }
    return v;
  }

  /// Field from adapted components h^i delta_i + v_k d/dp_k.
  [[nodiscard]] VectorField from_adapted(const std::vector<Jet>& h, const std::vector<Jet>& v) const {
    VectorField X = zero();
    for (int i = 0; i < n_; ++i) X.c[i] = h[i];
    for (int k = 0; k < n_; ++k) {
      Jet acc = v[k];
      for (int j = 0; j < n_; ++j) acc += geo_->N()(j, k) * h[j];
      X.c[n_ + k] = acc;
    }
    return X;
  }

  /// J(delta_i) = -g_ij d/dp_j, J(d/dp_i) = g^ij delta_j
  [[nodiscard]] VectorField J(const VectorField& X) const {
    const auto h = horizontal(X);
    const auto v = vertical_part(X);
    std::vector<Jet> jh(n_), jv(n_);
    for (int l = 0; l < n_; ++l) {
      Jet a = geo_->g_upper()(l, 0) * v[0];
      Jet b = geo_->g_lower()(l, 0) * h[0];
      for (int k = 1; k < n_; ++k) {
        a += geo_->g_upper()(l, k) * v[k];
        b += geo_->g_lower()(l, k) * h[k];
      }
      jh[l] = a;
      jv[l] = -b;
    }
    return from_adapted(jh, jv);
  }

  /// G = g_ij dx^i dx^j + g^ij delta p_i delta p_j
  [[nodiscard]] Jet G(const VectorField& X, const VectorField& Y) const {
    const auto hx = horizontal(X), hy = horizontal(Y);
    const auto vx = vertical_part(X), vy = vertical_part(Y);
    Jet acc = geo_->constant(0.0);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        acc += geo_->g_lower()(i, j) * hx[i] * hy[j];
        acc += geo_->g_upper()(i, j) * vx[i] * vy[j];
      }
    }
    return acc;
  }

  /// Omega = dp_i ^ dx^i
  [[nodiscard]] Jet Omega(const VectorField& X, const VectorField& Y) const {
    Jet acc = geo_->constant(0.0);
    for (int i = 0; i < n_; ++i) acc += X.p(i) * Y.x(i) - Y.p(i) * X.x(i);
    return acc;
  }

  /// Columns delta_1..delta_n, d/dp_1..d/dp_n in natural components.
  [[nodiscard]] Eigen::MatrixXd frame_matrix() const {
    const Eigen::MatrixXd N = geo_->N().values();
    Eigen::MatrixXd F = Eigen::MatrixXd::Identity(2 * n_, 2 * n_);
    F.bottomLeftCorner(n_, n_) = N.transpose();
    return F;
  }

  /// Rows dx^1..dx^n, delta p_1..delta p_n in natural components.
  [[nodiscard]] Eigen::MatrixXd coframe_matrix() const {
    const Eigen::MatrixXd N = geo_->N().values();
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(2 * n_, 2 * n_);
    C.bottomLeftCorner(n_, n_) = -N.transpose();
    return C;
  }

  [[nodiscard]] SasakiData sasaki() const {
    const Eigen::MatrixXd gl = geo_->g_lower().values();
    const Eigen::MatrixXd gu = geo_->g_upper().values();
    SasakiData s;
    s.G_adapted = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
    s.G_adapted.topLeftCorner(n_, n_) = gl;
    s.G_adapted.bottomRightCorner(n_, n_) = gu;
    Eigen::MatrixXd J_adapted = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
    J_adapted.topRightCorner(n_, n_) = gu;
    J_adapted.bottomLeftCorner(n_, n_) = -gl;
    const Eigen::MatrixXd C = coframe_matrix();
    const Eigen::MatrixXd F = frame_matrix();
    s.G_natural = C.transpose() * s.G_adapted * C;
    s.J_natural = F * J_adapted * C;
    s.Omega_natural = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
    s.Omega_natural.topRightCorner(n_, n_) = -Eigen::MatrixXd::Identity(n_, n_);
    s.Omega_natural.bottomLeftCorner(n_, n_) = Eigen::MatrixXd::Identity(n_, n_);
    return s;
  }

  /// The 2n adapted frame fields delta_1..delta_n, d/dp_1..d/dp_n.
  [[nodiscard]] std::vector<VectorField> adapted_frame() const {
    std::vector<VectorField> out;
    for (int i = 0; i < n_; ++i) out.push_back(delta(i));
    for (int i = 0; i < n_; ++i) out.push_back(vertical(i));
    return out;
  }

 private:
  const Geometry* geo_;
  int n_;
};

inline Eigen::MatrixXd adapted_frame(const Geometry& geo) { return PhaseFrames(geo).frame_matrix(); }

inline SasakiData sasaki_structures(const Geometry& geo) { return PhaseFrames(geo).sasaki(); }

}  // namespace cartanv
