// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cartanv/cartanv.hpp"

using namespace cartanv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Measure {
  std::string what;
  double value = 0.0;
  double bound = 0.0;
  bool upper = true;  // value <= bound, otherwise value >= bound
  [[nodiscard]] bool ok() const { return upper ? value <= bound : value >= bound; }
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Measure> measures;
  [[nodiscard]] bool ok() const {
    for (const auto& m : measures) {
      if (!m.ok()) return false;
    }
    return !measures.empty();
  }
};

// Per-metric default suite results, keyed by check name.
using Results = std::map<std::string, std::map<std::string, CheckResult>>;

double worst(const Results& res, const std::vector<std::string>& metrics, const std::vector<std::string>& checks) {
  double w = 0.0;
  for (const auto& m : metrics) {
    for (const auto& c : checks) {
      const auto& r = res.at(m).at(c);
      if (r.samples == 0 || std::isnan(r.max_residual)) return std::numeric_limits<double>::infinity();
      w = std::max(w, r.max_residual);
    }
  }
  return w;
}

RunConfig config(const std::string& metric, int samples) {
  RunConfig cfg;
  cfg.metric = metric;
  cfg.dim = 3;
  cfg.samples = samples;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

int main() {
  const auto& all = builtin_labels();
  const std::vector<std::string> quadratic = {"euclidean", "quadratic-diag", "quadratic-offdiag"};
  const std::vector<std::string> nonquadratic = {"randers-dual", "quartic-root"};
  std::vector<Criterion> out;

  {
    Criterion c{1, "fundamental identities, 5 metrics x 100 points, <= 1e-10 in <= 5 s", {}};
    const auto t0 = Clock::now();
    double w = 0.0;
    int points = 100;
    for (const auto& label : all) {
      const CartanStructure K = load_builtin(label, 3);
      const SampleSet s = sample_points(K, config(label, 100));
      points = std::min(points, static_cast<int>(s.points.size()));
      for (const auto& z : s.points) w = std::max(w, fundamental_identities(Geometry(K, z, DerivSpec::momenta(3))).max());
    }
    c.measures.push_back({"max residual", w, 1e-10});
    c.measures.push_back({"points per metric", static_cast<double>(points), 100.0, false});
    c.measures.push_back({"seconds", seconds_since(t0), 5.0});
    out.push_back(c);
  }

  Results res;
  double randers_seconds = 0.0;
  std::string randers_json;
  for (const auto& label : all) {
    const auto t0 = Clock::now();
    const CheckReport rep = run_config(config(label, 100));
    if (label == "randers-dual") {
      randers_seconds = seconds_since(t0);
      randers_json = render(rep, "json");
    }
    if (!rep.error.empty()) std::fprintf(stderr, "%s: %s\n", label.c_str(), rep.error.c_str());
    for (const auto& r : rep.checks) res[label][r.name] = r;
  }

  out.push_back({2,
                 "canonical connection symmetric and 1-homogeneous <= 1e-10, N against oracle <= 1e-5",
                 {{"structure", worst(res, all, {"connection_structure"}), 1e-10},
                  {"oracle", worst(res, all, {"connection_oracle"}), 1e-5}}});
  out.push_back({3, "almost Kaehler model <= 1e-9", {{"max residual", worst(res, all, {"almost_kaehler"}), 1e-9}}});
  out.push_back({4,
                 "integrability of the Liouville distribution <= 1e-9",
                 {{"max residual", worst(res, all, {"liouville_integrability"}), 1e-9}}});
  out.push_back({5,
                 "fiber Levi-Civita connection, Liouville derivatives, geodesics, umbilic leaves <= 1e-9",
                 {{"max residual",
                   worst(res, all,
                         {"liouville_brackets", "fiber_connection", "fiber_liouville_derivatives", "fiber_geodesic",
                          "fiber_umbilic"}),
                   1e-9}}});
  out.push_back({6,
                 "flat sections <= 1e-7, quadratic control <= 1e-12",
                 {{"randers-dual, quartic-root", worst(res, nonquadratic, {"fiber_flat_section"}), 1e-7},
                  {"quadratic", worst(res, quadratic, {"fiber_flat_section"}), 1e-12}}});
  out.push_back({7,
                 "Liouville suites <= 1e-10, t against oracle <= 1e-5",
                 {{"suites", worst(res, all, {"liouville_identities", "liouville_brackets"}), 1e-10},
                  {"oracle", worst(res, all, {"t_oracle"}), 1e-5}}});
  out.push_back({8,
                 "CR certificate, nu identity <= 1e-8, closedness <= 1e-8, minimality <= 1e-6",
                 {{"cr", worst(res, all, {"cr_structure"}), 1e-9},
                  {"nu identity", worst(res, all, {"nu_identity"}), 1e-8},
                  {"closedness", worst(res, all, {"pullback_closed"}), 1e-8},
                  {"minimality trace", worst(res, all, {"holomorphic_minimal"}), 1e-6}}});

  {
    Criterion c{9,
                "Vranceanu torsion <= 1e-9, Reinhart verdicts with 1e3 margin, Vaisman axioms <= 1e-9, "
                "perturbation 1e-3 detected above 1e-4",
                {}};
    c.measures.push_back({"torsion", worst(res, all, {"vranceanu_torsion", "vranceanu_coefficients"}), 1e-9});
    double quad = 0.0;
    for (const auto& label : quadratic) {
      const CartanStructure K = load_builtin(label, 3);
      for (const auto& z : sample_points(K, config(label, 20)).points) quad = std::max(quad, reinhart_residual(K, z));
    }
    double randers = std::numeric_limits<double>::infinity();
    const CartanStructure R = load_builtin("randers-dual", 3);
    const SampleSet rs = sample_points(R, config("randers-dual", 20));
    for (const auto& z : rs.points) randers = std::min(randers, reinhart_residual(R, z));
    c.measures.push_back({"quadratic Reinhart residual", quad, kReinhartThreshold * 1e-3});
    c.measures.push_back({"randers-dual Reinhart residual", randers, kReinhartThreshold * 1e3, false});
    c.measures.push_back({"verdict mismatches", worst(res, all, {"reinhart"}), 0.0});
    c.measures.push_back({"Vaisman", worst(res, all, {"vaisman_axioms", "connection_comparison"}), 1e-9});
    double probe = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 5; ++k) {
      const Geometry geo(R, rs.points[k]);
      const PhaseFrames fr(geo);
      const Liouville L(fr);
      probe = std::min(probe, vaisman_perturbation_probe(L, 0, 1, 1, 1e-3));
    }
    c.measures.push_back({"perturbed residual", probe, 1e-4, false});
    out.push_back(c);
  }

  out.push_back({10,
                 "basic connections and triple <= 1e-9, line curvature <= 1e-10",
                 {{"basic", worst(res, all, {"basic_liouville", "basic_horizontal", "basic_perp", "triple_compatibility"}),
                   1e-9},
                  {"line curvature", worst(res, all, {"line_curvature"}), 1e-10}}});

  {
    Criterion c{11, "byte-identical reports, randers-dual n=3 100 points <= 60 s, oracle agreement", {}};
    RunConfig cfg = config("randers-dual", 100);
    cfg.threads = 1;
    const std::string again = render(run_config(cfg), "json");
    c.measures.push_back({"report differences", again == randers_json ? 0.0 : 1.0, 0.0});
    c.measures.push_back({"seconds", randers_seconds, 60.0});
    c.measures.push_back({"oracle", worst(res, all, {"tensor_oracle", "connection_oracle", "t_oracle"}), 1e-5});
    out.push_back(c);
  }

  bool all_ok = true;
  for (const auto& c : out) {
    all_ok = all_ok && c.ok();
    std::printf("criterion %2d: %s  %s\n", c.id, c.ok() ? "PASS" : "FAIL", c.title.c_str());
    for (const auto& m : c.measures) {
      std::printf("    %-32s %.3e %s %.3e%s\n", m.what.c_str(), m.value, m.upper ? "<=" : ">=", m.bound,
                  m.ok() ? "" : "  (violated)");
    }
  }
  return all_ok ? 0 : 1;
}
