#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "asclab/experiments.hpp"

using namespace asclab;

TEST(FitRate, ExactCases) {
  auto f = fit_rate({{1, 1}, {10, 100}, {100, 1e4}});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 0.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(fit_rate({{1, 5}, {10, 5}, {100, 5}}).slope, 0.0, 1e-15);
  std::vector<Point> pts;
  for (double x : logspace(1e-4, 1e4, 20)) pts.emplace_back(x, 3.0 * std::pow(x, -0.125));
  const auto g = fit_rate(pts);
  EXPECT_NEAR(g.slope, -0.125, 1e-10);
  EXPECT_NEAR(std::exp(g.intercept), 3.0, 1e-9);
}

TEST(FitRate, Errors) {
  EXPECT_THROW(fit_rate({{1, 1}, {2, 0}, {3, 1}}), DomainError);
  EXPECT_THROW(fit_rate({{1, 1}, {2, 2}}), InvalidParameter);
  EXPECT_THROW(fit_rate({{1, 1}, {2, 2}, {3, 3}}, std::pair<std::size_t, std::size_t>{0, 2}),
               InvalidParameter);
}

TEST(FitRate, WindowTrim) {
  std::vector<Point> pts;
  for (double x : logspace(1.0, 1e4, 41)) pts.emplace_back(x, x);
  const auto w = select_window(pts, 1.0, 1e4, 0.25);
  EXPECT_EQ(w.size(), 21u);
  EXPECT_NEAR(w.front().first, 10.0, 1e-9);
}

TEST(Dataset, CsvFormatting) {
  Dataset d("t", {"a", "b"});
  d.add_row({0.1, std::string("x")});
  d.add_row({1.0 / 3.0, 2.0});
  EXPECT_EQ(d.to_csv(), "a,b\n0.10000000000000001,x\n0.33333333333333331,2\n");
  EXPECT_THROW(d.add_row({1.0}), DimensionError);
}

TEST(Params, UnknownAndMalformedKeysRejectedBeforeRunning) {
  EXPECT_THROW(run_experiment("source_growth", {{"bogus", "1"}}), ConfigurationError);
  EXPECT_THROW(run_experiment("source_growth", {{"n", "abc"}}), ConfigurationError);
  EXPECT_THROW(run_experiment("boundary_effect", {{"solution", "sine"}}), ConfigurationError);
  EXPECT_THROW(run_experiment("no_such_study", {}), ConfigurationError);
  EXPECT_THROW(run_experiment("rate_table", {{"delta_count", "2"}}), ConfigurationError);
}

TEST(Experiments, SourceGrowthShape) {
  const auto r = run_experiment("source_growth", {{"n", "2000"}, {"alpha_count", "61"}});
  const auto& d = r.dataset("source_growth");
  EXPECT_EQ(d.columns, (std::vector<std::string>{"alpha", "xi_norm", "residual", "error"}));
  EXPECT_EQ(d.rows.size(), 61u);
  EXPECT_NEAR(r.fit("pre_saturation").slope, -0.125, 0.02);
  EXPECT_LE(r.metric("range_rep_max_rel"), 1e-9);
  EXPECT_EQ(r.config_echo.at("n"), "2000");
  EXPECT_EQ(r.config_echo.at("eta"), "2");
}

TEST(Experiments, SaturationProbe) {
  const auto grid = logspace(1e-6, 1e-2, 25);
  const auto lo = saturation_probe(make_diagonal_model(5000, 2, beta_for_mu(0.25, 2), 0), grid);
  const auto hi = saturation_probe(make_diagonal_model(5000, 2, beta_for_mu(1.25, 2), 0), grid);
  // Unsaturated: residual/alpha ~ alpha^(mu - 1/2), so 10^(1/2) per two decades.
  const auto r = lo.data.numeric_column("residual_over_alpha");
  EXPECT_NEAR(r.front() / r[12], std::sqrt(10.0), 0.3);
  EXPECT_GE(lo.residual_ratio, 9.0);
  EXPECT_LE(hi.residual_ratio, 10.0);
  EXPECT_LE(hi.error_ratio, 10.0);
}

TEST(Experiments, DeterministicAndConfigRoundTrip) {
  const Config cfg{{"n", "300"}, {"delta_count", "4"}, {"seeds", "2"}};
  const auto a = run_experiment("rate_table", cfg, 7, 1);
  const auto b = run_experiment("rate_table", cfg, 7, 3);
  const auto c = run_experiment("rate_table", a.config_echo, 7, 1);
  ASSERT_EQ(a.datasets.size(), b.datasets.size());
  for (std::size_t i = 0; i < a.datasets.size(); ++i) {
    EXPECT_EQ(a.datasets[i].to_csv(), b.datasets[i].to_csv());
    EXPECT_EQ(a.datasets[i].to_csv(), c.datasets[i].to_csv());
  }
  const auto d = run_experiment("rate_table", cfg, 8, 1);
  EXPECT_NE(a.datasets[0].to_csv(), d.datasets[0].to_csv());
}

TEST(Experiments, WriteReport) {
  const auto dir = std::filesystem::temp_directory_path() / "asclab_report_test";
  std::filesystem::remove_all(dir);
  const auto r = run_experiment("source_growth", {{"n", "500"}}, 42);
  const auto paths = write_report(r, dir);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "source_growth.csv"));
  std::ifstream f(dir / "summary.json");
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["experiment"], "source_growth");
  EXPECT_EQ(j["seed"], 42);
  EXPECT_TRUE(j["fits"]["pre_saturation"].contains("r_squared"));
  EXPECT_EQ(j["config"]["n"], "500");
  std::filesystem::remove_all(dir);
}

TEST(Experiments, SupDeviation) {
  std::vector<Point> a{{1, 1}, {10, 0.1}, {100, 0.01}};
  std::vector<Point> b{{2, 0.5}, {20, 0.05}};
  EXPECT_NEAR(sup_relative_deviation(a, b), 0.0, 1e-12);
  std::vector<Point> c{{2, 0.6}, {20, 0.05}};
  EXPECT_NEAR(sup_relative_deviation(a, c), 0.2, 1e-12);
}
