#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cartanv/cartanv.hpp"

namespace {

using cartanv::CartanStructure;
using cartanv::PhasePoint;
using json = nlohmann::ordered_json;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& s, int dim, const char* what) {
  const auto items = split_list(s);
  if (static_cast<int>(items.size()) != dim) {
    throw cartanv::ConfigError(std::string(what) + " needs " + std::to_string(dim) + " comma separated values");
  }
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) {
    try {
      v(i) = std::stod(items[i]);
    } catch (const std::exception&) {
      throw cartanv::ConfigError(std::string("bad number in ") + what + ": '" + items[i] + "'");
    }
  }
  return v;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json tensor_json(const cartanv::Tensor3& t) {
  json out = json::array();
  for (int i = 0; i < t.dim(); ++i) {
    json slab = json::array();
    for (int j = 0; j < t.dim(); ++j) {
      json row = json::array();
      for (int k = 0; k < t.dim(); ++k) row.push_back(t(i, j, k));
      slab.push_back(row);
    }
    out.push_back(slab);
  }
  return out;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw cartanv::ConfigError("cannot open output file '" + path + "'");
  f << text;
}

json eval_point(const CartanStructure& K, const PhasePoint& z, double p_floor) {
  const cartanv::Geometry geo(K, z);
  const cartanv::PhaseFrames fr(geo);
  const cartanv::Liouville L(fr, p_floor);
  json out;
  out["metric"] = K.label;
  out["x"] = vector_json(z.x);
  out["p"] = vector_json(z.p);
  out["K"] = geo.K().value();
  out["K2"] = geo.K2().value();
  out["p_upper"] = vector_json(cartanv::values(geo.p_upper()));
  out["g_upper"] = matrix_json(geo.g_upper().values());
  out["g_lower"] = matrix_json(geo.g_lower().values());
  out["cartan"] = tensor_json(geo.cartan().values());
  out["gamma"] = tensor_json(geo.gamma().values());
  out["N"] = matrix_json(geo.N().values());
  const auto d = L.data();
  out["zeta"] = vector_json(d.zeta);
  out["t"] = vector_json(d.t);
  out["P"] = matrix_json(d.P);
  out["reinhart_residual"] = cartanv::reinhart_residual(geo);
  return out;
}

/// Fiber geodesic with initial velocity C*/K by RK4 on
///   p''_k = C_k^{ij}(x, p) p'_i p'_j,
/// compared with the ray p0 (K0 + s) / K0 traced by the unit Liouville field.
json geodesic(const CartanStructure& K, const PhasePoint& z0, double h, int steps) {
  const int n = z0.dim();
  auto accel = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
    const cartanv::Geometry geo(K, PhasePoint(z0.x, p), cartanv::DerivSpec::momenta(3));
    const cartanv::Tensor3 C = geo.cartan().values();
    const Eigen::MatrixXd gl = geo.g_lower().values();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
      for (int s = 0; s < n; ++s) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) a(k) += gl(k, s) * C(s, i, j) * v(i) * v(j);
        }
      }
    }
    return a;
  };
  auto speed2 = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
    const cartanv::Geometry geo(K, PhasePoint(z0.x, p), cartanv::DerivSpec::momenta(2));
    return v.dot(geo.g_upper().values() * v);
  };
  const double K0 = K.K(z0);
  Eigen::VectorXd p = z0.p;
  Eigen::VectorXd v = z0.p / K0;
  const double e0 = speed2(p, v);
  double deviation = 0.0;
  double drift = 0.0;
  for (int s = 1; s <= steps; ++s) {
    const Eigen::VectorXd k1p = v, k1v = accel(p, v);
    const Eigen::VectorXd k2p = v + 0.5 * h * k1v, k2v = accel(p + 0.5 * h * k1p, k2p);
    const Eigen::VectorXd k3p = v + 0.5 * h * k2v, k3v = accel(p + 0.5 * h * k2p, k3p);
    const Eigen::VectorXd k4p = v + h * k3v, k4v = accel(p + h * k3p, k4p);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    const Eigen::VectorXd ray = z0.p * (K0 + s * h) / K0;
    deviation = std::max(deviation, (p - ray).norm());
    drift = std::max(drift, std::abs(speed2(p, v) - e0));
  }
  json out;
  out["metric"] = K.label;
  out["step"] = h;
  out["steps"] = steps;
  out["initial_speed_squared"] = e0;
  out["max_ray_deviation"] = deviation;
  out["max_energy_drift"] = drift;
  out["final_p"] = vector_json(p);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification engine for Cartan spaces"};
  app.require_subcommand(1);

  cartanv::RunConfig cfg;
  std::string checks_arg;
  std::string x_arg, p_arg;
  double step = 1e-3;
  int steps = 1000;

  auto add_metric_flags = [&](CLI::App* sub) {
    sub->add_option("--metric", cfg.metric, "built-in metric label");
    sub->add_option("--metric-file", cfg.metric_file, "file holding a K^2 expression");
    sub->add_option("--dim", cfg.dim, "dimension n of the base manifold");
    sub->add_option("--out", cfg.output, "output path (default stdout)");
  };

  auto* list = app.add_subcommand("list-metrics", "list built-in metrics");

  auto* eval = app.add_subcommand("eval", "dump the geometry at one point as JSON");
  add_metric_flags(eval);
  eval->add_option("--x", x_arg, "base point, comma separated")->required();
  eval->add_option("--p", p_arg, "momentum, comma separated")->required();

  auto* check = app.add_subcommand("check", "run the check suite on sampled points");
  add_metric_flags(check);
  check->add_option("--samples", cfg.samples, "number of sample points");
  check->add_option("--seed", cfg.seed, "sampling seed");
  check->add_option("--tol-ad", cfg.tol_ad, "tolerance of jet identities");
  check->add_option("--tol-fd", cfg.tol_fd, "tolerance of oracle comparisons");
  check->add_option("--tol-curv", cfg.tol_curv, "tolerance of curvature checks");
  check->add_option("--checks", checks_arg, "comma separated check names, 'none' for an empty selection");
  check->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_flag("--timing", cfg.timing, "record wall time in the report");
  check->add_option("--threads", cfg.threads, "worker threads (0: automatic)");
  auto* list_checks = check->add_flag("--list", "list registered checks and exit");

  auto* geo = app.add_subcommand("geodesic", "integrate a fiber geodesic along C*/K");
  add_metric_flags(geo);
  geo->add_option("--x", x_arg, "base point, comma separated")->required();
  geo->add_option("--p", p_arg, "initial momentum, comma separated")->required();
  geo->add_option("--step", step, "RK4 step");
  geo->add_option("--steps", steps, "number of steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& l : cartanv::builtin_labels()) std::cout << l << "\n";
      return 0;
    }
    if (eval->parsed()) {
      const CartanStructure K = cartanv::load_metric(cfg);
      const PhasePoint z(parse_vector(x_arg, cfg.dim, "--x"), parse_vector(p_arg, cfg.dim, "--p"));
      if (!K.valid_at(z)) throw cartanv::DomainError("point outside the validity domain of the metric");
      write_output(eval_point(K, z, cfg.p_floor).dump(2) + "\n", cfg.output);
      return 0;
    }
    if (geo->parsed()) {
      const CartanStructure K = cartanv::load_metric(cfg);
      const PhasePoint z(parse_vector(x_arg, cfg.dim, "--x"), parse_vector(p_arg, cfg.dim, "--p"));
      if (!K.valid_at(z)) throw cartanv::DomainError("point outside the validity domain of the metric");
      if (!(step > 0.0) || steps < 1) throw cartanv::ConfigError("step must be positive and steps >= 1");
      write_output(geodesic(K, z, step, steps).dump(2) + "\n", cfg.output);
      return 0;
    }
    if (check->parsed()) {
      if (list_checks->count() > 0) {
        for (const auto& c : cartanv::registry()) std::cout << c.name << "  " << c.anchor << "\n";
        return 0;
      }
      if (checks_arg == "none") {
        cfg.select_none = true;
      } else {
        cfg.checks = split_list(checks_arg);
        for (const auto& name : cfg.checks) cartanv::find_check(name);
      }
      const cartanv::CheckReport rep = cartanv::run_config(cfg);
      const std::string text = cartanv::render(rep, cfg.format);
      write_output(text, cfg.output);
      if (!cfg.output.empty() && !rep.error.empty()) std::cerr << rep.error << "\n";
      return rep.exit_code();
    }
  } catch (const cartanv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
