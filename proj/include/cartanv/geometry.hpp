#pragma once

/// Fundamental tensors, formal Christoffel symbols and the canonical
/// nonlinear connection of a Cartan structure at one phase point.
///
/// Everything is computed as jets in the layout requested by the caller, so
/// that later stages can differentiate the tensors once more. With the
/// default layout (p <= 4, x <= 2, total <= 4) g^{ij} is exact to order 2,
/// C^{ijk} and N_{ij} to order 1.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/jet.hpp"
#include "cartanv/metric.hpp"
#include "cartanv/tensor.hpp"

namespace cartanv {

inline constexpr double kConditionLimit = 1e10;

struct FundamentalTensors {
  Eigen::MatrixXd g_upper;
  Eigen::MatrixXd g_lower;
  Eigen::VectorXd p_upper;
  double K2 = 0.0;
  double K = 0.0;
  Tensor3 cartan;  // C^{ijk}
};

struct ChristoffelData {
  Tensor3 gamma;             // gamma(i, j, k) = gamma^i_{jk}
  Eigen::MatrixXd gamma0;    // gamma^0_{jk} = gamma^i_{jk} p_i
  Eigen::VectorXd gamma0_h0; // gamma^0_{h0} = gamma^i_{hk} p_i p^k
};

struct NonlinearConnection {
  Eigen::MatrixXd N;
  Tensor3 dN_dp;  // dN_dp(i, j, k) = dN_{ij}/dp_k
  Tensor3 dN_dx;  // dN_dx(i, j, k) = delta_k N_{ij}
};

struct HomogeneityResiduals {
  double k_squared = 0.0;  // |p_i dK^2/dp_i - 2 K^2|
  double metric = 0.0;     // max |p_k dg^{ij}/dp_k|
  double connection = 0.0; // max |p_k dN_ij/dp_k - N_ij|, -1 when not computed
  [[nodiscard]] double max() const { return std::max({k_squared, metric, connection}); }
};

/// Throws NotPositiveDefinite / IllConditioned for a symmetric matrix that
/// fails the Cholesky test or the condition guard.
inline void require_spd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string(what) + " is not positive definite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionLimit) {
    throw IllConditioned(std::string(what) + " condition number exceeds 1e10");
  }
}

/// All tensors of the Cartan structure at one point, as jets.
class Geometry {
 public:
  Geometry(const CartanStructure& metric, const PhasePoint& z,
           const DerivSpec& spec = DerivSpec::full())
      : metric_(&metric), z_(z), n_(z.dim()) {
    if (z.dim() != metric.dim) throw ConfigError("phase point dimension does not match metric");
    if (z.p.norm() == 0.0) throw DomainError("momentum must be nonzero");
    layout_ = JetLayout::get(n_, spec);
    const auto c = z.coords();
    coords_ = coordinate_jets(layout_, c);
    k2_ = metric.k_squared.on_coordinates(coords_);
    if (!(k2_.value() > 0.0)) throw DomainError("K^2 must be positive");
    build_metric();
    if (spec.p_order >= 3) build_cartan();
    if (spec.p_order >= 3 && spec.x_order >= 1 && spec.total() >= 3) build_connection();
  }

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] const PhasePoint& point() const { return z_; }
  [[nodiscard]] const CartanStructure& metric() const { return *metric_; }
  [[nodiscard]] const LayoutPtr& layout() const { return layout_; }
  [[nodiscard]] const std::vector<Jet>& coords() const { return coords_; }
  [[nodiscard]] const Jet& x(int i) const { return coords_[i]; }
  [[nodiscard]] const Jet& p(int i) const { return coords_[n_ + i]; }
  [[nodiscard]] int xvar(int i) const { return i; }
  [[nodiscard]] int pvar(int i) const { return n_ + i; }

  [[nodiscard]] Jet constant(double v) const { return Jet::constant(layout_, v); }

  [[nodiscard]] const Jet& K2() const { return k2_; }
  [[nodiscard]] const Jet& K() const { return k_; }
  [[nodiscard]] const std::vector<Jet>& p_upper() const { return p_up_; }
  [[nodiscard]] const JetMat& g_upper() const { return g_up_; }
  [[nodiscard]] const JetMat& g_lower() const { return g_low_; }
  [[nodiscard]] bool has_cartan() const { return !cartan_.empty(); }
  [[nodiscard]] const JetTensor3& cartan() const { return require(cartan_, "Cartan tensor"); }
  [[nodiscard]] bool has_connection() const { return !N_.empty(); }
  [[nodiscard]] const JetTensor3& gamma() const { return require(gamma_, "Christoffel symbols"); }
  [[nodiscard]] const JetMat& gamma0() const { return gamma0_; }
  [[nodiscard]] const std::vector<Jet>& gamma0_h0() const { return gamma0_h0_; }
  /// dg_lower_dp(i, j, h) = dg_{ij}/dp_h
  [[nodiscard]] const JetTensor3& dg_lower_dp() const { return require(dgl_dp_, "dg/dp"); }
  [[nodiscard]] const JetMat& N() const {
    if (N_.empty()) throw OrderError("nonlinear connection needs a layout with x and p^3 derivatives");
    return N_;
  }

  /// delta_k f = df/dx^k + N_kj df/dp_j
  [[nodiscard]] Jet delta(int k, const Jet& f) const {
    Jet out = f.partial(xvar(k));
    for (int j = 0; j < n_; ++j) out += N()(k, j) * f.partial(pvar(j));
    return out;
  }

  [[nodiscard]] FundamentalTensors fundamental() const {
    FundamentalTensors t;
    t.g_upper = g_up_.values();
    t.g_lower = g_low_.values();
    t.p_upper = values(p_up_);
    t.K2 = k2_.value();
    t.K = k_.value();
    t.cartan = has_cartan() ? cartan_.values() : Tensor3(n_);
    return t;
  }

  [[nodiscard]] ChristoffelData christoffel() const {
    ChristoffelData c;
    c.gamma = gamma().values();
    c.gamma0 = gamma0_.values();
    c.gamma0_h0 = values(gamma0_h0_);
    return c;
  }

  [[nodiscard]] NonlinearConnection nonlinear() const {
    NonlinearConnection nc;
    nc.N = N().values();
    nc.dN_dp = Tensor3(n_);
    nc.dN_dx = Tensor3(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
          nc.dN_dp(i, j, k) = N_(i, j).partial(pvar(k)).value();
          nc.dN_dx(i, j, k) = delta(k, N_(i, j)).value();
        }
      }
    }
    return nc;
  }

 private:
  template <class T>
  static const T& require(const T& t, const char* what) {
    if (t.empty()) throw OrderError(std::string(what) + " not available in this jet layout");
    return t;
  }

  void build_metric() {
    k_ = sqrt(k2_);
    p_up_.resize(n_);
    std::vector<Jet> d(n_);
    for (int i = 0; i < n_; ++i) {
      d[i] = k2_.partial(pvar(i));
      p_up_[i] = 0.5 * d[i];
    }
    g_up_ = JetMat(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        g_up_(i, j) = 0.5 * d[i].partial(pvar(j));
        if (j != i) g_up_(j, i) = g_up_(i, j);
      }
    }
    require_spd(g_up_.values(), "g^{ij}");
    g_low_ = inverse(g_up_);
  }

  void build_cartan() {
    cartan_ = JetTensor3(n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = i; j < n_; ++j) {
        const Jet d = g_up_(i, j);
        for (int k = j; k < n_; ++k) {
          const Jet c = -0.5 * d.partial(pvar(k));
          for (auto [a, b, e] : {std::array{i, j, k}, std::array{i, k, j}, std::array{j, i, k},
                                 std::array{j, k, i}, std::array{k, i, j}, std::array{k, j, i}}) {
            cartan_(a, b, e) = c;
          }
        }
      }
    }
  }

  // dg_{ij} = -g_{ia} dg^{ab} g_{bj}
  JetMat lower_derivative(int var) const {
    JetMat dgu(n_, n_);
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) dgu(a, b) = g_up_(a, b).partial(var);
    }
    JetMat tmp(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int b = 0; b < n_; ++b) {
        Jet acc = g_low_(i, 0) * dgu(0, b);
        for (int a = 1; a < n_; ++a) acc += g_low_(i, a) * dgu(a, b);
        tmp(i, b) = acc;
      }
    }
    JetMat out(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        Jet acc = tmp(i, 0) * g_low_(0, j);
        for (int b = 1; b < n_; ++b) acc += tmp(i, b) * g_low_(b, j);
        out(i, j) = -acc;
      }
    }
    return out;
  }

  void build_connection() {
    // dx_g(k)(i, j) = d g_{ij} / dx^k
    std::vector<JetMat> dx_g;
    dx_g.reserve(n_);
    for (int k = 0; k < n_; ++k) dx_g.push_back(lower_derivative(xvar(k)));
    dgl_dp_ = JetTensor3(n_);
    for (int h = 0; h < n_; ++h) {
      const JetMat d = lower_derivative(pvar(h));
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) dgl_dp_(i, j, h) = d(i, j);
      }
    }
    // gamma^i_{jk} = 1/2 g^{is} (dg_{js}/dx^k + dg_{sk}/dx^j - dg_{jk}/dx^s)
    gamma_ = JetTensor3(n_);
    for (int j = 0; j < n_; ++j) {
      for (int k = j; k < n_; ++k) {
        std::vector<Jet> low(n_);
        for (int s = 0; s < n_; ++s) {
          low[s] = 0.5 * (dx_g[k](j, s) + dx_g[j](s, k) - dx_g[s](j, k));
        }
        for (int i = 0; i < n_; ++i) {
          Jet acc = g_up_(i, 0) * low[0];
          for (int s = 1; s < n_; ++s) acc += g_up_(i, s) * low[s];
          gamma_(i, j, k) = acc;
          gamma_(i, k, j) = acc;
        }
      }
    }
    gamma0_ = JetMat(n_, n_);
    for (int j = 0; j < n_; ++j) {
      for (int k = 0; k < n_; ++k) {
        Jet acc = gamma_(0, j, k) * p(0);
        for (int i = 1; i < n_; ++i) acc += gamma_(i, j, k) * p(i);
        gamma0_(j, k) = acc;
      }
    }
    gamma0_h0_.assign(n_, Jet{});
    for (int h = 0; h < n_; ++h) {
      Jet acc = gamma0_(h, 0) * p_up_[0];
      for (int k = 1; k < n_; ++k) acc += gamma0_(h, k) * p_up_[k];
      gamma0_h0_[h] = acc;
    }
    // N_ij = gamma^0_ij - 1/2 gamma^0_h0 dg_ij/dp_h
    N_ = JetMat(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        Jet acc = gamma0_(i, j);
        for (int h = 0; h < n_; ++h) acc -= 0.5 * gamma0_h0_[h] * dgl_dp_(i, j, h);
        N_(i, j) = acc;
      }
    }
  }

  const CartanStructure* metric_;
  PhasePoint z_;
  int n_;
  LayoutPtr layout_;
  std::vector<Jet> coords_;
  Jet k2_;
  Jet k_;
  std::vector<Jet> p_up_;
  JetMat g_up_;
  JetMat g_low_;
  JetTensor3 cartan_;
  JetTensor3 gamma_;
  JetMat gamma0_;
  std::vector<Jet> gamma0_h0_;
  JetTensor3 dgl_dp_;
  JetMat N_;
};

inline FundamentalTensors fundamental_tensors(const CartanStructure& K, const PhasePoint& z) {
  return Geometry(K, z, DerivSpec::momenta(3)).fundamental();
}

inline ChristoffelData formal_christoffel(const CartanStructure& K, const PhasePoint& z) {
  return Geometry(K, z, DerivSpec{3, 1, 3}).christoffel();
}

inline NonlinearConnection nonlinear_connection(const CartanStructure& K, const PhasePoint& z) {
  return Geometry(K, z, DerivSpec::full()).nonlinear();
}

/// Euler residuals of the three homogeneity degrees (2 for K^2, 0 for g,
/// 1 for N), each normalized by the size of the terms compared. The K^2
/// residual is computed first and on its own, so that a non-homogeneous K^2
/// is reported even when it also fails to give a positive definite g.
inline HomogeneityResiduals homogeneity_residuals(const CartanStructure& K, const PhasePoint& z,
                                                  bool with_connection = true) {
  const int n = z.dim();
  HomogeneityResiduals r;
  {
    const Jet k2 = K.k_squared_jet(z, DerivSpec::momenta(1));
    double euler = 0.0;
    for (int i = 0; i < n; ++i) euler += z.p(i) * k2.partial(n + i).value();
    r.k_squared = normalized(euler - 2.0 * k2.value(), 2.0 * k2.value());
  }
  if (r.k_squared > 1e-6) return r;
  const Geometry geo(K, z, with_connection ? DerivSpec::full() : DerivSpec::momenta(3));
  const Eigen::MatrixXd g = geo.g_upper().values();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double e = 0.0;
      for (int k = 0; k < n; ++k) e += z.p(k) * geo.g_upper()(i, j).partial(geo.pvar(k)).value();
      r.metric = std::max(r.metric, normalized(e, g.cwiseAbs().maxCoeff()));
    }
  }
  if (!with_connection) {
    r.connection = 0.0;
    return r;
  }
  const Eigen::MatrixXd N = geo.N().values();
  const double scale = N.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double e = -N(i, j);
      for (int k = 0; k < n; ++k) e += z.p(k) * geo.N()(i, j).partial(geo.pvar(k)).value();
      r.connection = std::max(r.connection, normalized(e, scale));
    }
  }
  return r;
}

inline HomogeneityResiduals homogeneity_certificate(const CartanStructure& K, const PhasePoint& z,
                                                    double tol = 1e-8) {
  const HomogeneityResiduals r = homogeneity_residuals(K, z);
  if (r.max() > tol) {
    throw HomogeneityViolation("metric '" + K.label + "' is not positively homogeneous of degree 2" +
                               " in p (Euler residual " + std::to_string(r.max()) + ")");
  }
  return r;
}

/// Load-time certification on `probes` deterministic points of the validity
/// domain (x in [-1, 1]^n, |p| in [0.5, 2]).
inline void certify_metric(const CartanStructure& K, int probes = 32, double tol = 1e-8) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss;
  int done = 0;
  for (int attempt = 0; attempt < 20 * probes && done < probes; ++attempt) {
    Eigen::VectorXd x(K.dim), p(K.dim);
    for (int i = 0; i < K.dim; ++i) {
      x(i) = unit(rng);
      p(i) = gauss(rng);
    }
    if (p.norm() < 1e-3) continue;
    p *= (1.25 + 0.75 * unit(rng)) / p.norm();
    const PhasePoint z(x, p);
    if (!K.valid_at(z)) continue;
    homogeneity_certificate(K, z, tol);
    ++done;
  }
  if (done < probes) {
    throw SamplingExhausted("could not find enough valid probe points to certify '" + K.label +
                            "'");
  }
}

}  // namespace cartanv
