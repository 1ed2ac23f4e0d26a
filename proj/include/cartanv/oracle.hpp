#pragma once

/// Central finite differences with Richardson extrapolation. Works on plain
/// double evaluations only and never touches the jet kernel, so it serves as
/// an independent reference for every jet-computed derivative.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/metric.hpp"
#include "cartanv/tensor.hpp"

namespace cartanv {

class FDOracle {
 public:
  using Fn = std::function<double(const PhasePoint&)>;

  /// Relative base steps for stencils of derivative order 1, 2, 3. Higher
  /// orders need larger steps since roundoff grows like eps / h^k.
  std::array<double, 4> steps = {0.0, 1e-3, 4e-3, 2e-2};
  int richardson = 2;
  const ValidityDomain* domain = nullptr;

  FDOracle() = default;
  explicit FDOracle(const ValidityDomain& d) : domain(&d) {}

  /// d^a f at z for a multi-index over (x_1..x_n, p_1..p_n), total order <= 3.
  [[nodiscard]] double derivative(const Fn& f, const PhasePoint& z,
                                  std::span<const int> exps) const {
    const int nv = 2 * z.dim();
    if (static_cast<int>(exps.size()) != nv) throw ConfigError("multi-index length must be 2n");
    int order = 0;
    for (int e : exps) {
      if (e < 0 || e > 3) throw ConfigError("finite differences support orders up to 3");
      order += e;
    }
    if (order > 3) throw ConfigError("finite differences support total order up to 3");
    if (order == 0) return f(z);
    const auto base = z.coords();
    // D(h), D(h/2), D(h/4), ... then the Richardson table in powers of h^2.
    std::vector<double> table;
    for (int level = 0; level <= richardson; ++level) {
      const double scale = steps[order] / static_cast<double>(1 << level);
      table.push_back(stencil(f, base, exps, scale));
    }
    double factor = 4.0;
    for (int level = 1; level <= richardson; ++level) {
      for (int k = richardson; k >= level; --k) {
        table[k] = (factor * table[k] - table[k - 1]) / (factor - 1.0);
      }
      factor *= 4.0;
    }
    return table[richardson];
  }

  /// Convenience wrapper for the common single-variable and mixed cases.
  [[nodiscard]] double derivative(const Fn& f, const PhasePoint& z,
                                  std::initializer_list<int> vars) const {
    std::vector<int> e(2 * z.dim(), 0);
    for (int v : vars) ++e[v];
    return derivative(f, z, std::span<const int>(e));
  }

 private:
  struct Stencil {
    std::vector<double> offsets;
    std::vector<double> weights;
  };

  static const Stencil& stencil_for(int order) {
    static const std::array<Stencil, 4> table = {
        Stencil{{0.0}, {1.0}},
        Stencil{{-1.0, 1.0}, {-0.5, 0.5}},
        Stencil{{-1.0, 0.0, 1.0}, {1.0, -2.0, 1.0}},
        Stencil{{-2.0, -1.0, 1.0, 2.0}, {-0.5, 1.0, -1.0, 0.5}},
    };
    return table[order];
  }

  double stencil(const Fn& f, const std::vector<double>& base, std::span<const int> exps,
                 double scale) const {
    const int nv = static_cast<int>(base.size());
    std::vector<int> vars;
    std::vector<double> h;
    for (int v = 0; v < nv; ++v) {
      if (exps[v] > 0) {
        vars.push_back(v);
        h.push_back(scale * (1.0 + std::abs(base[v])));
      }
    }
    std::vector<std::size_t> idx(vars.size(), 0);
    double sum = 0.0;
    std::vector<double> pt = base;
    for (;;) {
      double w = 1.0;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        const Stencil& s = stencil_for(exps[vars[k]]);
        pt[vars[k]] = base[vars[k]] + s.offsets[idx[k]] * h[k];
        w *= s.weights[idx[k]];
      }
      const PhasePoint zp = PhasePoint::from_coords(pt);
      if (domain != nullptr && !domain->contains(zp)) {
        throw DomainError("finite-difference stencil leaves the validity domain");
      }
      sum += w * f(zp);
      std::size_t k = 0;
      for (; k < vars.size(); ++k) {
        if (++idx[k] < stencil_for(exps[vars[k]]).offsets.size()) break;
        idx[k] = 0;
      }
      if (k == vars.size()) break;
    }
    double denom = 1.0;
    for (std::size_t k = 0; k < vars.size(); ++k) denom *= std::pow(h[k], exps[vars[k]]);
    return sum / denom;
  }
};

/// Derivatives of any double-valued function f(x, p) by the oracle.
inline double fd_derivative(const FDOracle::Fn& f, const PhasePoint& z,
                            std::span<const int> exps, const FDOracle& oracle = FDOracle{}) {
  return oracle.derivative(f, z, exps);
}

/// Geometry rebuilt from finite differences of K^2 alone.
struct OracleGeometry {
  double K2 = 0.0;
  Eigen::VectorXd p_upper;
  Eigen::MatrixXd g_upper;
  Eigen::MatrixXd g_lower;
  Tensor3 cartan;       // C^{ijk}
  Tensor3 gamma;        // gamma^i_{jk}
  Eigen::MatrixXd N;
  Eigen::VectorXd t;    // t^i = p^i / K^2
};

inline OracleGeometry oracle_geometry(const CartanStructure& K, const PhasePoint& z,
                                      bool with_connection = true) {
  const int n = z.dim();
  FDOracle fd(K.validity);
  const FDOracle::Fn k2 = [&K](const PhasePoint& w) { return K.k_squared(w); };
  auto xv = [](int i) { return i; };
  auto pv = [n](int i) { return n + i; };
  OracleGeometry o;
  o.K2 = K.k_squared(z);
  o.p_upper.resize(n);
  o.g_upper.resize(n, n);
  for (int i = 0; i < n; ++i) {
    o.p_upper(i) = 0.5 * fd.derivative(k2, z, {pv(i)});
    for (int j = 0; j < n; ++j) o.g_upper(i, j) = 0.5 * fd.derivative(k2, z, {pv(i), pv(j)});
  }
  o.g_lower = o.g_upper.inverse();
  o.t = o.p_upper / o.K2;
  o.cartan = Tensor3(n);
  std::vector<Eigen::MatrixXd> dp_gu(n, Eigen::MatrixXd(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double d3 = fd.derivative(k2, z, {pv(i), pv(j), pv(k)});
        o.cartan(i, j, k) = -0.25 * d3;
        dp_gu[k](i, j) = 0.5 * d3;
      }
    }
  }
  o.gamma = Tensor3(n);
  o.N = Eigen::MatrixXd::Zero(n, n);
  if (!with_connection) return o;
  std::vector<Eigen::MatrixXd> dx_gl(n), dp_gl(n);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd dgu(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) dgu(i, j) = 0.5 * fd.derivative(k2, z, {xv(k), pv(i), pv(j)});
    }
    dx_gl[k] = -o.g_lower * dgu * o.g_lower;
    dp_gl[k] = -o.g_lower * dp_gu[k] * o.g_lower;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int s = 0; s < n; ++s) {
          acc += 0.5 * o.g_upper(i, s) * (dx_gl[k](j, s) + dx_gl[j](s, k) - dx_gl[s](j, k));
        }
        o.gamma(i, j, k) = acc;
      }
    }
  }
  Eigen::MatrixXd g0(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += o.gamma(i, j, k) * z.p(i);
      g0(j, k) = acc;
    }
  }
  const Eigen::VectorXd g0h0 = g0 * o.p_upper;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = g0(i, j);
      for (int h = 0; h < n; ++h) acc -= 0.5 * g0h0(h) * dp_gl[h](i, j);
      o.N(i, j) = acc;
    }
  }
  return o;
}

}  // namespace cartanv
