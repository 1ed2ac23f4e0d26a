#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "json.hpp"

#include "cartanv/harness.hpp"
#include "cartanv/report.hpp"
#include "support.hpp"

using namespace cartanv;

#ifndef CARTANV_SOURCE_DIR
#define CARTANV_SOURCE_DIR "."
#endif

namespace {

RunConfig small_config(const std::string& metric, int dim, int samples) {
  RunConfig cfg;
  cfg.metric = metric;
  cfg.dim = dim;
  cfg.samples = samples;
  return cfg;
}

}  // namespace

TEST(Sampling, GoldenPointsForSeed42) {
  RunConfig cfg = small_config("euclidean", 2, 3);
  const SampleSet s = sample_points(load_builtin("euclidean", 2), cfg);
  ASSERT_EQ(s.points.size(), 3U);
  EXPECT_EQ(s.candidates, 3);
  const double expect[3][4] = {
      {0.51031106590907793, 0.27806278770939485, 1.085662127103072, 0.82218491183755038},
      {-0.25422460108763034, -0.4522517965256585, 1.3830846393349854, -0.45500976526358972},
      {0.65309951160483104, 0.89139697320495803, -0.48605513794709304, 1.5468357933246157},
  };
  for (int k = 0; k < 3; ++k) {
    const auto& z = s.points[k];
    const double got[4] = {z.x(0), z.x(1), z.p(0), z.p(1)};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], expect[k][i], 1e-14) << k << " " << i;
  }
}

TEST(Sampling, PointsAdmissible) {
  RunConfig cfg = small_config("randers-dual", 3, 200);
  const auto& K = cartanv::testing::metric("randers-dual", 3);
  const SampleSet s = sample_points(K, cfg);
  ASSERT_EQ(s.points.size(), 200U);
  EXPECT_GE(s.candidates, 200);
  for (const auto& z : s.points) {
    EXPECT_TRUE(K.valid_at(z));
    EXPECT_GE(std::abs(z.p(2)), cfg.p_floor * z.p.norm());
    EXPECT_LE(z.x.cwiseAbs().maxCoeff(), cfg.x_box);
    EXPECT_GE(z.p.norm(), cfg.p_shell_lo);
    EXPECT_LE(z.p.norm(), cfg.p_shell_hi);
  }
}

TEST(Sampling, ExhaustionReported) {
  RunConfig cfg = small_config("euclidean", 2, 5);
  cfg.p_floor = 0.999999;
  EXPECT_THROW(sample_points(cartanv::testing::metric("euclidean", 2), cfg), SamplingExhausted);
}

TEST(Registry, CoversEveryInScopeResult) {
  std::set<std::string> anchors;
  for (const auto& c : registry()) anchors.insert(c.anchor);
  for (const auto& a : in_scope_anchors()) EXPECT_TRUE(anchors.count(a)) << "no check for: " << a;
}

TEST(Registry, NamesUnique) {
  std::set<std::string> names;
  for (const auto& c : registry()) EXPECT_TRUE(names.insert(c.name).second) << c.name;
  EXPECT_THROW(find_check("no_such_check"), ConfigError);
}

TEST(Report, ByteIdenticalForFixedSeed) {
  RunConfig cfg = small_config("randers-dual", 2, 5);
  const std::string a = render(run_config(cfg), "json");
  const std::string b = render(run_config(cfg), "json");
  EXPECT_EQ(a, b);
  cfg.threads = 1;
  const std::string c = render(run_config(cfg), "json");
  cfg.threads = 3;
  const std::string d = render(run_config(cfg), "json");
  EXPECT_EQ(a, c);
  EXPECT_EQ(c, d);
}

TEST(Report, JsonStructure) {
  RunConfig cfg = small_config("quadratic-diag", 2, 4);
  cfg.checks = {"fundamental_identities", "reinhart"};
  const CheckReport rep = run_config(cfg);
  const auto j = nlohmann::json::parse(render(rep, "json"));
  EXPECT_EQ(j["engine"], kEngineVersion);
  EXPECT_EQ(j["metric"]["label"], "quadratic-diag");
  EXPECT_EQ(j["config"]["seed"], 42);
  ASSERT_EQ(j["checks"].size(), 2U);
  EXPECT_EQ(j["checks"][0]["name"], "fundamental_identities");
  EXPECT_EQ(j["checks"][0]["verdict"], "pass");
  EXPECT_EQ(j["checks"][0]["samples"], 4);
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_EQ(j["wall_ms"], 0.0);
}

TEST(Report, EmptySelectionIsValid) {
  RunConfig cfg = small_config("euclidean", 2, 3);
  cfg.select_none = true;
  const CheckReport rep = run_config(cfg);
  EXPECT_TRUE(rep.checks.empty());
  EXPECT_EQ(rep.exit_code(), 0);
  const auto j = nlohmann::json::parse(render(rep, "json"));
  EXPECT_TRUE(j["checks"].is_array());
  EXPECT_TRUE(j["checks"].empty());
}

TEST(Report, TextTable) {
  RunConfig cfg = small_config("euclidean", 2, 3);
  cfg.checks = {"homogeneity"};
  const std::string text = render(run_config(cfg), "text");
  EXPECT_NE(text.find("homogeneity"), std::string::npos);
  EXPECT_NE(text.find("PASS"), std::string::npos);
}

TEST(ExitCodes, BrokenMetricIsAConfigurationError) {
  RunConfig cfg = small_config("", 2, 3);
  cfg.metric_file = CARTANV_SOURCE_DIR "/tools/metrics/broken2.k2";
  const CheckReport rep = run_config(cfg);
  EXPECT_EQ(rep.exit_code(), 2);
  EXPECT_NE(rep.error.find("HomogeneityViolation"), std::string::npos);
  const auto j = nlohmann::json::parse(render(rep, "json"));
  EXPECT_EQ(j["exit_code"], 2);
}

TEST(ExitCodes, UnknownMetric) {
  const CheckReport rep = run_config(small_config("no-such-metric", 2, 3));
  EXPECT_EQ(rep.exit_code(), 2);
  EXPECT_NE(rep.error.find("UnknownMetric"), std::string::npos);
}

TEST(ExitCodes, FailingCheckGivesOne) {
  RunConfig cfg = small_config("randers-dual", 2, 3);
  cfg.checks = {"nu_identity"};
  EXPECT_EQ(run_config(cfg).exit_code(), 1);
  cfg.checks = {"fundamental_identities"};
  EXPECT_EQ(run_config(cfg).exit_code(), 0);
}

TEST(ExitCodes, TightToleranceFails) {
  RunConfig cfg = small_config("randers-dual", 2, 5);
  cfg.checks = {"tensor_oracle"};
  cfg.tol_fd = 1e-14;
  const CheckReport rep = run_config(cfg);
  ASSERT_EQ(rep.checks.size(), 1U);
  EXPECT_FALSE(rep.checks[0].pass);
  EXPECT_EQ(rep.exit_code(), 1);
}

TEST(UserMetric, FileMetricRuns) {
  RunConfig cfg = small_config("", 2, 10);
  cfg.metric_file = CARTANV_SOURCE_DIR "/tools/metrics/randers2.k2";
  cfg.checks = {"fundamental_identities", "homogeneity", "connection_structure", "vaisman_axioms"};
  const CheckReport rep = run_config(cfg);
  EXPECT_TRUE(rep.error.empty()) << rep.error;
  EXPECT_EQ(rep.exit_code(), 0);
  EXPECT_FALSE(rep.expression.empty());
}

TEST(Suite, DefaultSuiteOnEuclidean) {
  const CheckReport rep = run_config(small_config("euclidean", 2, 10));
  for (const auto& c : rep.checks) {
    if (c.name == "nu_identity") continue;
    EXPECT_TRUE(c.pass) << c.name << " " << c.max_residual;
    EXPECT_GT(c.samples, 0) << c.name;
  }
}
