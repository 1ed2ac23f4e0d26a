#pragma once

/// Sampling, the check registry and the suite runner.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cartanv/checks.hpp"
#include "cartanv/connections.hpp"
#include "cartanv/errors.hpp"
#include "cartanv/fiber.hpp"
#include "cartanv/frames.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/indicatrix.hpp"
#include "cartanv/liouville.hpp"
#include "cartanv/metric.hpp"
#include "cartanv/oracle.hpp"
#include "cartanv/random.hpp"
#include "cartanv/residual.hpp"
#include "cartanv/subfoliation.hpp"
#include "cartanv/zoo.hpp"

namespace cartanv {

inline constexpr const char* kEngineVersion = "cartanv 0.1.0";

struct RunConfig {
  std::string metric = "euclidean";
  std::string metric_file;
  int dim = 2;
  int samples = 100;
  std::uint64_t seed = 42;
  double tol_ad = 1e-9;
  double tol_fd = 1e-5;
  double tol_curv = 1e-7;
  double p_floor = kDefaultPFloor;
  double x_box = 1.0;
  double p_shell_lo = 0.5;
  double p_shell_hi = 2.0;
  double level = 1.0;
  std::vector<std::string> checks;  // empty: every registered check
  bool select_none = false;         // an explicitly empty selection
  std::string output;
  std::string format = "text";
  bool timing = false;
  int threads = 0;  // 0: CARTANV_THREADS or hardware concurrency

  void validate() const {
    if (samples < 1) throw ConfigError("samples must be at least 1");
    if (!(tol_ad > 0.0) || !(tol_fd > 0.0) || !(tol_curv > 0.0)) {
      throw ConfigError("tolerances must be positive");
    }
    if (!(p_floor > 0.0) || p_floor >= 1.0) throw ConfigError("p_floor must be in (0, 1)");
    if (!(x_box > 0.0)) throw ConfigError("x_box must be positive");
    if (!(p_shell_lo > 0.0) || !(p_shell_hi >= p_shell_lo)) throw ConfigError("invalid momentum shell");
    if (!(level > 0.0)) throw ConfigError("indicatrix level must be positive");
    if (format != "text" && format != "json") throw ConfigError("format must be text or json");
  }
};

struct SampleSet {
  std::vector<PhasePoint> points;
  int candidates = 0;
};

/// x uniform in the box, p = r u with u uniform on the sphere and r uniform
/// in the shell. Candidates outside the validity domain or with
/// |p_n| < p_floor |p| are rejected, at most 10 candidates per sample.
inline SampleSet sample_points(const CartanStructure& K, const RunConfig& cfg) {
  cfg.validate();
  const int n = K.dim;
  Rng rng(cfg.seed);
  SampleSet s;
  const int cap = 10 * cfg.samples;
  while (static_cast<int>(s.points.size()) < cfg.samples && s.candidates < cap) {
    ++s.candidates;
    Eigen::VectorXd x(n), u(n);
    for (int i = 0; i < n; ++i) x(i) = rng.uniform(-cfg.x_box, cfg.x_box);
    for (int i = 0; i < n; ++i) u(i) = rng.normal();
    const double r = rng.uniform(cfg.p_shell_lo, cfg.p_shell_hi);
    if (u.norm() == 0.0) continue;
    const PhasePoint z(x, (r / u.norm()) * u);
    if (!K.valid_at(z)) continue;
    if (!z.last_momentum_admissible(cfg.p_floor)) continue;
    s.points.push_back(z);
  }
  if (static_cast<int>(s.points.size()) < cfg.samples) {
    throw SamplingExhausted("validity domain of '" + K.label + "' rejected more than 90% of " +
                            std::to_string(s.candidates) + " candidates");
  }
  return s;
}

/// Everything derived at one sample point, built on first use.
class PointContext {
 public:
  PointContext(const CartanStructure& K, const PhasePoint& z, const RunConfig& cfg, std::uint64_t seed)
      : K_(&K), z_(z), cfg_(&cfg), seed_(seed) {}
  PointContext(const PointContext&) = delete;
  PointContext& operator=(const PointContext&) = delete;

  [[nodiscard]] const CartanStructure& metric() const { return *K_; }
  [[nodiscard]] const PhasePoint& point() const { return z_; }
  [[nodiscard]] const RunConfig& config() const { return *cfg_; }

  /// Generator private to one (point, check) pair.
  [[nodiscard]] Rng rng(std::uint64_t salt) const {
    std::uint64_t v = seed_ ^ (salt * 0x9e3779b97f4a7c15ULL);
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return Rng(v ^ (v >> 31));
  }

  const Geometry& geometry() {
    if (!geo_) geo_ = std::make_unique<Geometry>(*K_, z_);
    return *geo_;
  }
  const PhaseFrames& frames() {
    if (!fr_) fr_ = std::make_unique<PhaseFrames>(geometry());
    return *fr_;
  }
  const Liouville& liouville() {
    if (!L_) L_ = std::make_unique<Liouville>(frames(), cfg_->p_floor);
    return *L_;
  }
  const FiberGeometry& fiber() {
    if (!F_) F_ = std::make_unique<FiberGeometry>(liouville());
    return *F_;
  }
  const Vranceanu& vranceanu() {
    if (!vr_) vr_ = std::make_unique<Vranceanu>(frames());
    return *vr_;
  }
  const Vaisman& vaisman() {
    if (!va_) va_ = std::make_unique<Vaisman>(liouville());
    return *va_;
  }
  const BasicTriple& triple() {
    if (!T_) T_ = std::make_unique<BasicTriple>(vranceanu(), vaisman());
    return *T_;
  }
  const OracleGeometry& oracle() {
    if (!oracle_) oracle_ = std::make_unique<OracleGeometry>(oracle_geometry(*K_, z_, true));
    return *oracle_;
  }
  /// Frame of the indicatrix K = level through the momentum direction of z.
  const IndicatrixFrame& indicatrix() {
    if (!ind_) {
      ind_geo_ = std::make_unique<Geometry>(*K_, indicatrix_point(*K_, z_, cfg_->level));
      ind_fr_ = std::make_unique<PhaseFrames>(*ind_geo_);
      ind_L_ = std::make_unique<Liouville>(*ind_fr_, cfg_->p_floor);
      ind_ = std::make_unique<IndicatrixFrame>(*ind_L_);
    }
    return *ind_;
  }

 private:
  const CartanStructure* K_;
  PhasePoint z_;
  const RunConfig* cfg_;
  std::uint64_t seed_;
  std::unique_ptr<Geometry> geo_;
  std::unique_ptr<PhaseFrames> fr_;
  std::unique_ptr<Liouville> L_;
  std::unique_ptr<FiberGeometry> F_;
  std::unique_ptr<Vranceanu> vr_;
  std::unique_ptr<Vaisman> va_;
  std::unique_ptr<BasicTriple> T_;
  std::unique_ptr<OracleGeometry> oracle_;
  std::unique_ptr<Geometry> ind_geo_;
  std::unique_ptr<PhaseFrames> ind_fr_;
  std::unique_ptr<Liouville> ind_L_;
  std::unique_ptr<IndicatrixFrame> ind_;
};

enum class Tolerance { Ad, Fd, Curv, Fixed };

struct CheckSpec {
  std::string name;
  std::string anchor;
  std::string module;
  Tolerance tolerance = Tolerance::Ad;
  double fixed = 0.0;
  std::function<ResidualRecord(PointContext&)> run;
  /// Metric-level applicability; empty means always.
  std::function<bool(const CartanStructure&)> applies;

  [[nodiscard]] double tolerance_for(const RunConfig& cfg) const {
    switch (tolerance) {
      case Tolerance::Ad: return cfg.tol_ad;
      case Tolerance::Fd: return cfg.tol_fd;
      case Tolerance::Curv: return cfg.tol_curv;
      case Tolerance::Fixed: return fixed;
    }
    return fixed;
  }
};

namespace detail {

inline ResidualRecord single(const std::string& name, double v) {
  ResidualRecord r;
  r.add(name, v);
  return r;
}

inline bool is_builtin(const CartanStructure& K) {
  const auto& labels = builtin_labels();
  return K.expression.empty() && std::find(labels.begin(), labels.end(), K.label) != labels.end();
}

/// Unit constant vertical vector in a random direction.
inline Eigen::VectorXd random_direction(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v / v.norm();
}

}  // namespace detail

/// Every check the harness can run, in report order. Anchors name the
/// result each check certifies.
inline const std::vector<CheckSpec>& registry() {
  static const std::vector<CheckSpec> checks = [] {
    std::vector<CheckSpec> c;
    auto add = [&c](std::string name, std::string anchor, std::string module, Tolerance tol, double fixed,
                    std::function<ResidualRecord(PointContext&)> run,
                    std::function<bool(const CartanStructure&)> applies = {}) {
      c.push_back({std::move(name), std::move(anchor), std::move(module), tol, fixed, std::move(run),
                   std::move(applies)});
    };
    using T = Tolerance;

    add("fundamental_identities", "fundamental tensor identities", "cartan-core", T::Ad, 0,
        [](PointContext& p) { return fundamental_identities(p.geometry()); });
    add("homogeneity", "positive homogeneity of K", "cartan-core", T::Ad, 0, [](PointContext& p) {
      ResidualRecord r;
      const auto h = homogeneity_residuals(p.metric(), p.point());
      r.add("k_squared", h.k_squared);
      r.add("metric", h.metric);
      r.add("connection", h.connection);
      r.merge(scale_equivariance(p.metric(), p.point(), 1.7), "scale.");
      return r;
    });
    add("tensor_oracle", "fundamental tensors against finite differences", "metrics-zoo", T::Fd, 0,
        [](PointContext& p) { return tensor_oracle(p.geometry(), p.oracle()); });
    add("coordinate_invariance", "coordinate changes", "cartan-core", T::Ad, 0,
        [](PointContext& p) { return coordinate_invariance(p.metric(), p.geometry()); });

    add("connection_structure", "canonical nonlinear connection", "phase-frames", T::Ad, 0,
        [](PointContext& p) { return connection_structure(p.geometry()); });
    add("connection_oracle", "formal Christoffel symbols and N against finite differences", "metrics-zoo",
        T::Fd, 0, [](PointContext& p) { return connection_oracle(p.geometry(), p.oracle()); });
    add("almost_kaehler", "almost Kaehler model of the cotangent bundle", "phase-frames", T::Ad, 0,
        [](PointContext& p) { return almost_kaehler(p.frames()); });

    add("liouville_identities", "identities of zeta, t and the projector", "liouville", T::Ad, 0,
        [](PointContext& p) {
          const Liouville& L = p.liouville();
          Rng rng = p.rng(11);
          ResidualRecord r;
          r.merge(t_identities(L), "t.");
          r.merge(reduced_basis_suite(L), "reduced.");
          r.merge(frame_decomposition(L), "frame.");
          r.merge(projector_suite(L, random_vertical(L.frames(), rng), random_vertical(L.frames(), rng)),
                  "projector.");
          return r;
        });
    add("liouville_brackets", "brackets of the vertical Liouville fields", "liouville", T::Ad, 0,
        [](PointContext& p) { return dbar_brackets(p.liouville()); });
    add("liouville_integrability", "integrability of the Liouville distribution", "liouville", T::Ad, 0,
        [](PointContext& p) { return detail::single("bracket_normal", integrability_residual(p.liouville())); });
    add("t_oracle", "momentum derivatives of t against finite differences", "liouville", T::Fd, 0,
        [](PointContext& p) { return detail::single("dt_dp", t_oracle(p.liouville())); });

    add("fiber_connection", "Levi-Civita connection of the fibers", "fiber-geom", T::Ad, 0,
        [](PointContext& p) {
          const FiberGeometry& F = p.fiber();
          const auto& fr = p.frames();
          Rng rng = p.rng(21);
          ResidualRecord r = fiber_connection_suite(F);
          r.merge(levi_civita_suite(F, random_vertical(fr, rng), random_vertical(fr, rng),
                                    random_vertical(fr, rng)),
                  "levi_civita.");
          return r;
        });
    add("fiber_liouville_derivatives", "covariant derivatives of C*, zeta and P along the fibers",
        "fiber-geom", T::Ad, 0, [](PointContext& p) {
          const auto& fr = p.frames();
          Rng rng = p.rng(22);
          return covariant_identities(p.fiber(), random_vertical(fr, rng), random_vertical(fr, rng));
        });
    add("fiber_geodesic", "integral curves of C* are fiber geodesics", "fiber-geom", T::Ad, 0,
        [](PointContext& p) { return detail::single("acceleration", geodesic_residual(p.fiber())); });
    add("fiber_umbilic", "Liouville leaves totally umbilical with mean curvature -1", "fiber-geom", T::Ad, 0,
        [](PointContext& p) { return umbilic_suite(p.fiber()); });
    add("fiber_flat_section", "flat fiber sections containing C*", "fiber-geom", T::Curv, 0,
        [](PointContext& p) {
          Rng rng = p.rng(23);
          return detail::single("sectional",
                                flat_section_residual(p.fiber(), detail::random_direction(p.metric().dim, rng)));
        });

    add("cr_structure", "indicatrix is a CR-submanifold", "indicatrix", T::Ad, 0,
        [](PointContext& p) { return cr_certificate(p.indicatrix()); });
    add("nu_identity", "nu as a power of the pulled back symplectic form", "indicatrix", T::Fixed, 1e-8,
        [](PointContext& p) { return nu_form_identity(p.indicatrix()); });
    add("nu_normalized", "nu against the normalized symplectic power", "indicatrix", T::Ad, 0,
        [](PointContext& p) { return nu_form_normalized(p.indicatrix()); });
    add("pullback_closed", "closedness of the pulled back symplectic form", "indicatrix", T::Fixed, 1e-8,
        [](PointContext& p) { return pullback_closedness(p.indicatrix()); });
    add("holomorphic_minimal", "minimality of the holomorphic distribution", "indicatrix", T::Fixed, 1e-6,
        [](PointContext& p) { return holomorphic_minimality(p.indicatrix()); });
    add("indicatrix_tangency", "frame tangent to the indicatrix", "indicatrix", T::Fixed, 1e-10,
        [](PointContext& p) { return indicatrix_tangency(p.indicatrix()); });
    add("xi_line", "integrability of the line distribution of xi*", "indicatrix", T::Fixed, 1e-9,
        [](PointContext& p) {
          Rng rng = p.rng(31);
          return xi_line_integrable(p.indicatrix(), rng);
        });

    add("vranceanu_torsion", "torsion of the Vranceanu connection", "connections", T::Ad, 0,
        [](PointContext& p) { return vranceanu_torsion_suite(p.vranceanu()); });
    add("vranceanu_coefficients", "coefficients of the Vranceanu connection", "connections", T::Ad, 0,
        [](PointContext& p) { return vranceanu_coefficient_suite(p.vranceanu()); });
    add("reinhart", "Reinhart criterion", "connections", T::Fixed, 0.0,
        [](PointContext& p) {
          // 0 when the verdict matches the metric flag with a 1e3 margin, 1 otherwise.
          const double res = reinhart_residual(p.geometry());
          const bool expect = p.metric().flags.reinhart;
          const bool ok = expect ? res <= kReinhartThreshold * 1e-3 : res >= kReinhartThreshold * 1e3;
          ResidualRecord r = detail::single("verdict_mismatch", ok ? 0.0 : 1.0);
          r.note("residual", res);
          return r;
        },
        [](const CartanStructure& K) { return detail::is_builtin(K); });
    add("vaisman_axioms", "axioms of the Vaisman connection", "connections", T::Ad, 0,
        [](PointContext& p) { return vaisman_axiom_certificate(p.vaisman()); });
    add("connection_comparison", "Vranceanu and Vaisman connections on the Liouville field", "connections",
        T::Ad, 0, [](PointContext& p) { return connection_comparison(p.vranceanu(), p.vaisman()); });

    add("basic_liouville", "basic connection on the Liouville distribution", "subfoliation", T::Ad, 0,
        [](PointContext& p) {
          Rng rng = p.rng(41);
          return basic_check_L(p.triple(), rng);
        });
    add("basic_horizontal", "basic connection on the horizontal bundle", "subfoliation", T::Ad, 0,
        [](PointContext& p) {
          Rng rng = p.rng(42);
          return basic_check_H(p.triple(), rng);
        });
    add("basic_perp", "basic connection on the complement of C*", "subfoliation", T::Ad, 0,
        [](PointContext& p) {
          Rng rng = p.rng(43);
          return basic_check_perp(p.triple(), rng);
        });
    add("triple_compatibility", "compatibility of the basic triple", "subfoliation", T::Ad, 0,
        [](PointContext& p) {
          Rng rng = p.rng(44);
          return triple_compatibility(p.triple(), rng);
        });
    add("line_curvature", "curvature of the basic connection along the line foliation", "subfoliation",
        T::Ad, 0, [](PointContext& p) {
          Rng rng = p.rng(45);
          return line_curvature_check(p.triple(), rng);
        });
    return c;
  }();
  return checks;
}

/// Results the suite must certify, each of which must be the anchor of at
/// least one registered check.
inline const std::vector<std::string>& in_scope_anchors() {
  static const std::vector<std::string> anchors = {
      "coordinate changes",
      "fundamental tensor identities",
      "positive homogeneity of K",
      "canonical nonlinear connection",
      "formal Christoffel symbols and N against finite differences",
      "almost Kaehler model of the cotangent bundle",
      "integrability of the Liouville distribution",
      "identities of zeta, t and the projector",
      "brackets of the vertical Liouville fields",
      "Levi-Civita connection of the fibers",
      "covariant derivatives of C*, zeta and P along the fibers",
      "integral curves of C* are fiber geodesics",
      "Liouville leaves totally umbilical with mean curvature -1",
      "flat fiber sections containing C*",
      "indicatrix is a CR-submanifold",
      "nu as a power of the pulled back symplectic form",
      "closedness of the pulled back symplectic form",
      "minimality of the holomorphic distribution",
      "integrability of the line distribution of xi*",
      "torsion of the Vranceanu connection",
      "coefficients of the Vranceanu connection",
      "Reinhart criterion",
      "axioms of the Vaisman connection",
      "basic connection on the Liouville distribution",
      "basic connection on the horizontal bundle",
      "basic connection on the complement of C*",
      "compatibility of the basic triple",
      "curvature of the basic connection along the line foliation",
  };
  return anchors;
}

inline const CheckSpec& find_check(const std::string& name) {
  for (const auto& c : registry()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown check '" + name + "'");
}

struct CheckResult {
  std::string name;
  std::string anchor;
  int samples = 0;  // points that produced a residual
  int skipped = 0;  // points whose evaluation raised a numerical error
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string worst_item;
  std::string first_skip_reason;
};

struct CheckReport {
  std::string engine = kEngineVersion;
  std::string metric_label;
  int dim = 0;
  MetricFlags flags;
  std::string expression;
  RunConfig config;
  int candidates = 0;
  int accepted = 0;
  std::vector<CheckResult> checks;
  double wall_ms = 0.0;
  std::string error;  // configuration or metric error, empty otherwise

  [[nodiscard]] bool all_pass() const {
    if (!error.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }

  /// 0 all pass, 1 a check failed, 2 configuration or metric error.
  [[nodiscard]] int exit_code() const {
    if (!error.empty()) return 2;
    return all_pass() ? 0 : 1;
  }
};

/// Errors that describe one bad sample point rather than a bad run.
inline bool is_point_error(const std::exception& e) {
  return dynamic_cast<const DomainError*>(&e) || dynamic_cast<const SingularityError*>(&e) ||
         dynamic_cast<const NotPositiveDefinite*>(&e) || dynamic_cast<const IllConditioned*>(&e) ||
         dynamic_cast<const AdaptedBasisDegenerate*>(&e) || dynamic_cast<const HBlockSingular*>(&e);
}

inline int thread_count(const RunConfig& cfg, int work) {
  int t = cfg.threads;
  if (t <= 0) {
    t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("CARTANV_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) t = std::min(t, cap);
    }
  }
  return std::max(1, std::min(t, work));
}

inline std::vector<const CheckSpec*> selected_checks(const RunConfig& cfg, const CartanStructure& K) {
  std::vector<const CheckSpec*> out;
  if (cfg.select_none) return out;
  if (cfg.checks.empty()) {
    for (const auto& c : registry()) {
      if (!c.applies || c.applies(K)) out.push_back(&c);
    }
    return out;
  }
  for (const auto& name : cfg.checks) out.push_back(&find_check(name));
  return out;
}

/// Runs the selected checks at every sample point. Per-point numerical
/// errors are counted as skips; anything else propagates.
inline CheckReport run_suite(const CartanStructure& K, const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  CheckReport rep;
  rep.metric_label = K.label;
  rep.dim = K.dim;
  rep.flags = K.flags;
  rep.expression = K.expression;
  rep.config = cfg;
  const auto checks = selected_checks(cfg, K);
  const SampleSet samples = sample_points(K, cfg);
  rep.candidates = samples.candidates;
  rep.accepted = static_cast<int>(samples.points.size());
  const int npts = rep.accepted;
  const int nchk = static_cast<int>(checks.size());

  struct Cell {
    bool ok = false;
    double value = 0.0;
    std::string worst;
    std::string error;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(npts) * nchk);
  std::vector<std::exception_ptr> fatal(npts);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < npts; i = next++) {
      PointContext ctx(K, samples.points[i], cfg, cfg.seed + 0x100000001b3ULL * (i + 1));
      for (int c = 0; c < nchk; ++c) {
        Cell& cell = cells[static_cast<std::size_t>(i) * nchk + c];
        try {
          const ResidualRecord r = checks[c]->run(ctx);
          cell.ok = true;
          cell.value = r.max();
          double best = -1.0;
          for (const auto& [k, v] : r.items) {
            if (std::isnan(v) || v > best) {
              best = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
              cell.worst = k;
            }
          }
        } catch (const std::exception& e) {
          if (!is_point_error(e)) {
            fatal[i] = std::current_exception();
            return;
          }
          cell.error = e.what();
        }
      }
    }
  };
  const int nthreads = thread_count(cfg, npts);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : fatal) {
    if (f) std::rethrow_exception(f);
  }

  for (int c = 0; c < nchk; ++c) {
    CheckResult res;
    res.name = checks[c]->name;
    res.anchor = checks[c]->anchor;
    res.tolerance = checks[c]->tolerance_for(cfg);
    bool nan = false;
    for (int i = 0; i < npts; ++i) {
      const Cell& cell = cells[static_cast<std::size_t>(i) * nchk + c];
      if (!cell.ok) {
        ++res.skipped;
        if (res.first_skip_reason.empty()) res.first_skip_reason = cell.error;
        continue;
      }
      ++res.samples;
      if (std::isnan(cell.value)) {
        nan = true;
        res.worst_item = cell.worst;
      } else if (!nan && (res.samples == 1 || cell.value > res.max_residual)) {
        res.max_residual = cell.value;
        res.worst_item = cell.worst;
      }
    }
    if (nan) res.max_residual = std::numeric_limits<double>::quiet_NaN();
    res.pass = res.samples > 0 && !nan && res.max_residual <= res.tolerance;
    rep.checks.push_back(std::move(res));
  }
  if (cfg.timing) {
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rep;
}

/// Loads the metric named by the configuration: a file when given,
/// otherwise a built-in label. Both paths certify homogeneity.
inline CartanStructure load_metric(const RunConfig& cfg) {
  if (!cfg.metric_file.empty()) return load_metric_file(cfg.metric_file, cfg.dim);
  return load_builtin(cfg.metric, cfg.dim);
}

/// Full run including metric loading. Configuration and metric errors are
/// reported in the result instead of thrown.
inline CheckReport run_config(const RunConfig& cfg) {
  try {
    const CartanStructure K = load_metric(cfg);
    return run_suite(K, cfg);
  } catch (const Error& e) {
    CheckReport rep;
    rep.metric_label = cfg.metric_file.empty() ? cfg.metric : cfg.metric_file;
    rep.dim = cfg.dim;
    rep.config = cfg;
    const char* kind = dynamic_cast<const HomogeneityViolation*>(&e)  ? "HomogeneityViolation"
                       : dynamic_cast<const UnknownMetric*>(&e)       ? "UnknownMetric"
                       : dynamic_cast<const ParseError*>(&e)          ? "ParseError"
                       : dynamic_cast<const SamplingExhausted*>(&e)   ? "SamplingExhausted"
                       : dynamic_cast<const ConfigError*>(&e)         ? "ConfigError"
                       : dynamic_cast<const NotPositiveDefinite*>(&e) ? "NotPositiveDefinite"
                                                                      : "Error";
    rep.error = std::string(kind) + ": " + e.what();
    return rep;
  }
}

}  // namespace cartanv
