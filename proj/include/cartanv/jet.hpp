#pragma once

/// Truncated multivariate Taylor jets.
///
/// A Jet stores the Taylor expansion of a scalar function of the phase
/// coordinates (x_1..x_n, p_1..p_n) around a base point. The coefficient of
/// the multi-index a is d^a f / a!, so products are truncated polynomial
/// convolutions and derivatives are recovered as a! * coeff(a).
///
/// The monomial set of a layout is bounded separately in momentum degree,
/// position degree and total degree. Each jet additionally carries its own
/// Precision: differentiating lowers it, binary operations take the
/// componentwise minimum. Coefficients outside the precision are kept at
/// zero and never read.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cartanv/errors.hpp"

namespace cartanv {

inline constexpr int kMaxDim = 8;
inline constexpr int kMaxTotalOrder = 5;
inline constexpr int kMaxPOrder = 4;
inline constexpr int kMaxXOrder = 2;

/// Which derivatives a jet must carry. Coordinate v < n is x_{v+1},
/// coordinate v >= n is p_{v-n+1}.
struct DerivSpec {
  int p_order = 0;
  int x_order = 0;
  int total_order = -1;  // negative: min(p_order + x_order, kMaxTotalOrder)
  std::uint32_t active = ~std::uint32_t{0};

  [[nodiscard]] int total() const {
    return total_order >= 0 ? total_order
                            : std::min(p_order + x_order, kMaxTotalOrder);
  }

  void validate(int dim) const {
    if (dim < 1 || dim > kMaxDim) {
      throw ConfigError("jet dimension must be in [1, " +
                        std::to_string(kMaxDim) + "]");
    }
    if (p_order < 0 || p_order > kMaxPOrder || x_order < 0 ||
        x_order > kMaxXOrder) {
      throw ConfigError("jet orders out of range (p <= 4, x <= 2)");
    }
    if (total() > kMaxTotalOrder || total() > p_order + x_order) {
      throw ConfigError("jet total order must be <= 5 and <= p_order + x_order");
    }
    const std::uint32_t used =
        (2 * dim >= 32) ? ~std::uint32_t{0} : ((std::uint32_t{1} << (2 * dim)) - 1);
    if (total() > 0 && (active & used) == 0) {
      throw ConfigError("a jet with nonzero order needs an active variable");
    }
  }

  /// Layout used for everything that needs first derivatives of the
  /// canonical nonlinear connection and of the fiber Christoffel symbols.
  static DerivSpec full() { return {4, 2, 4}; }
  static DerivSpec momenta(int order) { return {order, 0, order}; }
};

/// Orders up to which the coefficients of a jet are exact.
struct Precision {
  int p = 0;
  int x = 0;
  int t = 0;

  friend Precision min(const Precision& a, const Precision& b) {
    return {std::min(a.p, b.p), std::min(a.x, b.x), std::min(a.t, b.t)};
  }
  friend bool operator==(const Precision&, const Precision&) = default;
};

class JetLayout {
 public:
  using Exponents = std::array<std::uint8_t, 2 * kMaxDim>;

  struct MulEntry {
    std::uint32_t a;
    std::uint32_t b;
    std::uint32_t out;
  };
  struct DerivEntry {
    std::uint32_t out;
    std::uint32_t src;
    double factor;
  };

  /// Layouts are immutable and shared; identical requests return the same
  /// object.
  static std::shared_ptr<const JetLayout> get(int dim, const DerivSpec& spec) {
    spec.validate(dim);
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int, int, std::uint32_t>,
                    std::shared_ptr<const JetLayout>>
        cache;
    const std::uint32_t mask = spec.active & active_bits(dim);
    const auto key =
        std::make_tuple(dim, spec.p_order, spec.x_order, spec.total(), mask);
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto layout = std::shared_ptr<const JetLayout>(new JetLayout(dim, spec, mask));
    cache.emplace(key, layout);
    return layout;
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int num_vars() const { return 2 * dim_; }
  [[nodiscard]] std::size_t size() const { return exps_.size(); }
  [[nodiscard]] const DerivSpec& spec() const { return spec_; }
  [[nodiscard]] bool is_active(int var) const { return (mask_ >> var) & 1u; }
  [[nodiscard]] bool is_momentum(int var) const { return var >= dim_; }
  [[nodiscard]] Precision full_precision() const {
    return {spec_.p_order, spec_.x_order, spec_.total()};
  }

  [[nodiscard]] const Exponents& exponents(std::size_t k) const { return exps_[k]; }
  [[nodiscard]] int degree_p(std::size_t k) const { return deg_p_[k]; }
  [[nodiscard]] int degree_x(std::size_t k) const { return deg_x_[k]; }
  [[nodiscard]] int degree(std::size_t k) const { return deg_t_[k]; }

  [[nodiscard]] bool within(std::size_t k, const Precision& prec) const {
    return deg_t_[k] <= prec.t && deg_p_[k] <= prec.p && deg_x_[k] <= prec.x;
  }

  /// Index of a monomial, or -1 when it is not part of the layout.
  [[nodiscard]] long index_of(std::span<const int> exps) const {
    if (static_cast<int>(exps.size()) != num_vars()) return -1;
    Exponents e{};
    for (int v = 0; v < num_vars(); ++v) {
      if (exps[v] < 0 || exps[v] > kMaxTotalOrder) return -1;
      e[v] = static_cast<std::uint8_t>(exps[v]);
    }
    auto it = index_.find(pack(e));
    return it == index_.end() ? -1 : static_cast<long>(it->second);
  }

  /// Product table entries whose output has total degree <= t.
  [[nodiscard]] std::span<const MulEntry> products_up_to(int t) const {
    if (t < 0) return {};
    const std::size_t end = mul_end_[std::min<std::size_t>(t, mul_end_.size() - 1)];
    return {mul_.data(), end};
  }

  [[nodiscard]] std::span<const DerivEntry> derivative_table(int var) const {
    return deriv_[var];
  }

 private:
  JetLayout(int dim, const DerivSpec& spec, std::uint32_t mask)
      : dim_(dim), spec_(spec), mask_(mask) {
    spec_.total_order = spec.total();
    enumerate();
    build_products();
    build_derivatives();
  }

  static std::uint32_t active_bits(int dim) {
    return (2 * dim >= 32) ? ~std::uint32_t{0}
                           : ((std::uint32_t{1} << (2 * dim)) - 1);
  }

  static std::uint64_t pack(const Exponents& e) {
    std::uint64_t key = 0;
    for (int v = 0; v < 2 * kMaxDim; ++v) key |= std::uint64_t(e[v] & 7u) << (3 * v);
    return key;
  }

  // Monomials are ordered by total degree, then lexicographically.
  void enumerate() {
    const int nv = num_vars();
    const int total = spec_.total();
    for (int t = 0; t <= total; ++t) {
      Exponents e{};
      recurse(e, 0, t, nv);
    }
    for (std::size_t k = 0; k < exps_.size(); ++k) index_.emplace(pack(exps_[k]), k);
  }

  void recurse(Exponents& e, int var, int remaining, int nv) {
    if (var == nv) {
      if (remaining != 0) return;
      int dp = 0;
      int dx = 0;
      for (int v = 0; v < nv; ++v) (v >= dim_ ? dp : dx) += e[v];
      if (dp > spec_.p_order || dx > spec_.x_order) return;
      exps_.push_back(e);
      deg_p_.push_back(static_cast<std::uint8_t>(dp));
      deg_x_.push_back(static_cast<std::uint8_t>(dx));
      deg_t_.push_back(static_cast<std::uint8_t>(dp + dx));
      return;
    }
    const int hi = is_active(var) ? remaining : 0;
    for (int k = hi; k >= 0; --k) {
      e[var] = static_cast<std::uint8_t>(k);
      recurse(e, var + 1, remaining - k, nv);
    }
    e[var] = 0;
  }

  void build_products() {
    const std::size_t m = exps_.size();
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (deg_t_[a] + deg_t_[b] > spec_.total()) continue;
        Exponents e{};
        for (int v = 0; v < num_vars(); ++v) e[v] = exps_[a][v] + exps_[b][v];
        auto it = index_.find(pack(e));
        if (it == index_.end()) continue;
        mul_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                        it->second});
      }
    }
    std::stable_sort(mul_.begin(), mul_.end(), [&](const MulEntry& l, const MulEntry& r) {
      return deg_t_[l.out] < deg_t_[r.out];
    });
    mul_end_.assign(spec_.total() + 1, 0);
    for (int t = 0; t <= spec_.total(); ++t) {
      mul_end_[t] = static_cast<std::size_t>(
          std::partition_point(mul_.begin(), mul_.end(),
                               [&](const MulEntry& e) { return deg_t_[e.out] <= t; }) -
          mul_.begin());
    }
  }

  void build_derivatives() {
    deriv_.resize(num_vars());
    for (int v = 0; v < num_vars(); ++v) {
      if (!is_active(v)) continue;
      for (std::size_t k = 0; k < exps_.size(); ++k) {
        Exponents e = exps_[k];
        e[v] += 1;
        auto it = index_.find(pack(e));
        if (it == index_.end()) continue;
        deriv_[v].push_back({static_cast<std::uint32_t>(k), it->second,
                             static_cast<double>(e[v])});
      }
    }
  }

  int dim_;
  DerivSpec spec_;
  std::uint32_t mask_;
  std::vector<Exponents> exps_;
  std::vector<std::uint8_t> deg_p_, deg_x_, deg_t_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<MulEntry> mul_;
  std::vector<std::size_t> mul_end_;
  std::vector<std::vector<DerivEntry>> deriv_;
};

using LayoutPtr = std::shared_ptr<const JetLayout>;

class Jet {
 public:
  Jet() = default;

  static Jet constant(const LayoutPtr& layout, double value) {
    Jet j(layout, layout->full_precision());
    j.c_[0] = value;
    return j;
  }

  /// The coordinate function `var` expanded at `value`.
  static Jet variable(const LayoutPtr& layout, int var, double value) {
    Jet j = constant(layout, value);
    if (!layout->is_active(var) || layout->spec().total() == 0) return j;
    std::vector<int> e(layout->num_vars(), 0);
    e[var] = 1;
    const long k = layout->index_of(e);
    if (k >= 0) j.c_[k] = 1.0;
    return j;
  }

  [[nodiscard]] bool empty() const { return !layout_; }
  [[nodiscard]] const LayoutPtr& layout() const { return layout_; }
  [[nodiscard]] const Precision& precision() const { return prec_; }
  [[nodiscard]] std::span<const double> coefficients() const { return c_; }

  [[nodiscard]] double value() const {
    require_layout();
    if (prec_.t < 0 || prec_.p < 0 || prec_.x < 0) {
      throw OrderError("jet carries no exact coefficients");
    }
    return c_[0];
  }

  /// Taylor coefficient d^a f / a! for the multi-index `exps` (length 2n).
  [[nodiscard]] double coeff(std::span<const int> exps) const {
    require_layout();
    const long k = layout_->index_of(exps);
    if (k < 0 || !layout_->within(static_cast<std::size_t>(k), prec_)) {
      throw OrderError("requested coefficient beyond jet precision");
    }
    return c_[k];
  }

  /// Partial derivative d^a f at the base point.
  [[nodiscard]] double derivative(std::span<const int> exps) const {
    double fact = 1.0;
    for (int e : exps) {
      for (int i = 2; i <= e; ++i) fact *= i;
    }
    return fact * coeff(exps);
  }

  /// Jet of df/d(coordinate var), one order lower.
  [[nodiscard]] Jet partial(int var) const {
    require_layout();
    Precision prec = prec_;
    prec.t -= 1;
    (layout_->is_momentum(var) ? prec.p : prec.x) -= 1;
    Jet out(layout_, prec);
    if (!layout_->is_active(var)) return out;
    for (const auto& d : layout_->derivative_table(var)) {
      if (layout_->within(d.out, prec)) out.c_[d.out] = d.factor * c_[d.src];
    }
    return out;
  }

  Jet& operator+=(const Jet& o) { return accumulate(o, 1.0); }
  Jet& operator-=(const Jet& o) { return accumulate(o, -1.0); }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }
  Jet& operator+=(double s) {
    require_layout();
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) { return *this += -s; }
  Jet& operator*=(double s) {
    require_layout();
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator/=(double s) { return *this *= 1.0 / s; }

  friend Jet operator-(Jet a) {
    for (double& v : a.c_) v = -v;
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, Jet a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const Precision prec = a.joint_precision(b);
    Jet out(a.layout_, prec);
    const JetLayout& lay = *a.layout_;
    const bool full = prec.p >= lay.spec().p_order && prec.x >= lay.spec().x_order;
    const double* ac = a.c_.data();
    const double* bc = b.c_.data();
    double* oc = out.c_.data();
    for (const auto& e : lay.products_up_to(prec.t)) {
      if (!full && !lay.within(e.out, prec)) continue;
      oc[e.out] += ac[e.a] * bc[e.b];
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

  /// f(a) for a univariate f given by its Taylor coefficients at a.value():
  /// taylor[k] = f^(k)(a0) / k!.
  [[nodiscard]] Jet compose(std::span<const double> taylor) const {
    require_layout();
    const int order = std::max(prec_.t, 0);
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet out(layout_, prec_);
    const auto top = std::min<std::size_t>(order, taylor.size() - 1);
    out.c_[0] = taylor[top];
    for (std::size_t k = top; k-- > 0;) {
      out = out * h;
      out.c_[0] += taylor[k];
    }
    return out;
  }

  friend Jet reciprocal(const Jet& a) {
    const double a0 = a.value();
    if (a0 == 0.0) throw SingularityError("division by a jet with zero base");
    std::array<double, kMaxTotalOrder + 1> t{};
    double pw = 1.0 / a0;
    for (int k = 0; k <= kMaxTotalOrder; ++k) {
      t[k] = (k % 2 == 0 ? 1.0 : -1.0) * pw;
      pw /= a0;
    }
    return a.compose(t);
  }

  friend Jet sqrt(const Jet& a) {
    const double a0 = a.value();
    if (!(a0 > 0.0)) throw DomainError("sqrt of a jet with non-positive base");
    return pow(a, 0.5);
  }

  friend Jet pow(const Jet& a, double r) {
    const double a0 = a.value();
    const bool integral = r == std::round(r);
    if (!integral && !(a0 > 0.0)) {
      throw DomainError("non-integer power of a jet with non-positive base");
    }
    if (integral && r >= 0.0) return ipow(a, static_cast<int>(r));
    if (integral) return reciprocal(ipow(a, static_cast<int>(-r)));
    std::array<double, kMaxTotalOrder + 1> t{};
    double binom = 1.0;
    for (int k = 0; k <= kMaxTotalOrder; ++k) {
      t[k] = binom * std::pow(a0, r - k);
      binom *= (r - k) / (k + 1);
    }
    return a.compose(t);
  }

  friend Jet ipow(const Jet& a, int k) {
    if (k < 0) return reciprocal(ipow(a, -k));
    Jet out = constant(a.layout_, 1.0);
    out.prec_ = a.prec_;
    Jet base = a;
    while (k > 0) {
      if (k & 1) out = out * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return out;
  }

 private:
  Jet(LayoutPtr layout, Precision prec)
      : layout_(std::move(layout)), c_(layout_->size(), 0.0), prec_(prec) {}

  void require_layout() const {
    if (!layout_) throw OrderError("operation on an empty jet");
  }

  Precision joint_precision(const Jet& o) const {
    require_layout();
    o.require_layout();
    if (layout_ != o.layout_) throw OrderError("jets from different layouts");
    return min(prec_, o.prec_);
  }

  Jet& accumulate(const Jet& o, double sign) {
    const Precision prec = joint_precision(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += sign * o.c_[k];
    if (!(prec == prec_ && prec == o.prec_)) {
      prec_ = prec;
      for (std::size_t k = 0; k < c_.size(); ++k) {
        if (!layout_->within(k, prec_)) c_[k] = 0.0;
      }
    }
    return *this;
  }

  LayoutPtr layout_;
  std::vector<double> c_;
  Precision prec_;
};

/// Coordinate jets (x_1..x_n, p_1..p_n) expanded at `coords`.
inline std::vector<Jet> coordinate_jets(const LayoutPtr& layout,
                                        std::span<const double> coords) {
  std::vector<Jet> out;
  out.reserve(coords.size());
  for (int v = 0; v < static_cast<int>(coords.size()); ++v) {
    out.push_back(Jet::variable(layout, v, coords[v]));
  }
  return out;
}

/// Truncated Taylor expansion of f at the 2n coordinates `z`. `f` receives
/// the span of coordinate jets (x first, then p).
template <class F>
Jet lift(F&& f, std::span<const double> z, const DerivSpec& spec) {
  if (z.size() % 2 != 0) throw ConfigError("phase point needs 2n coordinates");
  const int dim = static_cast<int>(z.size() / 2);
  const auto layout = JetLayout::get(dim, spec);
  const auto vars = coordinate_jets(layout, z);
  return f(std::span<const Jet>(vars));
}

// Scalar-generic helpers so field formulas can be written once for double
// and Jet.
inline double constant_like(double, double v) { return v; }
inline Jet constant_like(const Jet& ref, double v) { return Jet::constant(ref.layout(), v); }
inline double ipow(double a, int k) { return std::pow(a, k); }

}  // namespace cartanv
