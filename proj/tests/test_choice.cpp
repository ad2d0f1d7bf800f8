#include <gtest/gtest.h>

#include <cmath>

#include "asclab/choice.hpp"
#include "asclab/rate_fit.hpp"

using namespace asclab;

namespace {

InverseProblem scalar_problem() {
  InverseProblem p;
  p.op = SingularSystem::diagonal((CoefVector(1) << 1.0).finished());
  p.y_exact = p.x_true = (CoefVector(1) << 2.0).finished();
  return p;
}

}  // namespace

TEST(Apriori, Exponents) {
  EXPECT_NEAR(alpha_apriori(1e-3, 0.5, Classical{}).alpha, 1e-3, 1e-18);
  EXPECT_NEAR(alpha_apriori(1e-3, 1.0, HighOrder{1}).alpha, 1e-4, 1e-16);
  EXPECT_NEAR(alpha_apriori(1e-2, 0.0, HilbertScale{1, 1, 2}).alpha, 1e-6, 1e-20);
  EXPECT_NEAR(alpha_apriori(1e-2, 0.5, Classical{}, 3.0).alpha, 3e-2, 1e-16);
}

TEST(Apriori, AdmissibilityErrors) {
  EXPECT_THROW(alpha_apriori(1e-3, 1.5, Classical{}), DomainError);
  EXPECT_THROW(alpha_apriori(1e-3, 2.0, HighOrder{1}), DomainError);
  EXPECT_THROW(alpha_apriori(1e-3, 0.0, HilbertScale{1, 6, 2}), DomainError);
  try {
    alpha_apriori(1e-3, 0.0, HilbertScale{1, 6, 2});
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("p <= 2s + a"), std::string::npos);
  }
}

TEST(Discrepancy, ScalarCrossing) {
  const auto p = scalar_problem();
  // residual(alpha) = 2 alpha / (1 + alpha) = 0.5 at alpha = 1/3 (tau = 1 limit).
  const auto r = alpha_discrepancy(tikhonov_solver(p, p.y_exact), 0.5, 1.0 + 1e-12);
  EXPECT_NEAR(r.alpha, 1.0 / 3.0, 1e-3 / 3.0);
  EXPECT_LE(r.diagnostics.at("residual"), 0.5 * (1 + 1e-9));
}

TEST(Discrepancy, SlackReturnsUpperBound) {
  const auto p = scalar_problem();
  const auto r = alpha_discrepancy(tikhonov_solver(p, p.y_exact), 0.5, 10.0, {1e-6, 100.0});
  EXPECT_DOUBLE_EQ(r.alpha, 100.0);
  EXPECT_LE(r.diagnostics.at("residual"), 5.0);
}

TEST(Discrepancy, Errors) {
  const auto p = scalar_problem();
  EXPECT_THROW(alpha_discrepancy(tikhonov_solver(p, p.y_exact), 0.0), UnsupportedMode);
  EXPECT_THROW(alpha_discrepancy(tikhonov_solver(p, p.y_exact), 0.5, 0.9), InvalidParameter);
  // residual(1e-6) is ~2e-6 > 1.5e-9: no crossing.
  EXPECT_THROW(alpha_discrepancy(tikhonov_solver(p, p.y_exact), 1e-9, 1.5, {1e-6, 1.0}), NoSolution);
}

TEST(Discrepancy, LargestAlphaSemantics) {
  const auto p = make_diagonal_model(2000, 2.0, 2.0, 0);
  const auto noisy = add_noise(p, 0.01, 3);
  const auto solve = tikhonov_solver(p, noisy.y_delta);
  const auto r = alpha_discrepancy(solve, noisy.delta_abs, 1.5);
  EXPECT_LE(solve(r.alpha).residual_norm, 1.5 * noisy.delta_abs);
  EXPECT_GT(solve(2.0 * r.alpha).residual_norm, 1.5 * noisy.delta_abs);
}

TEST(Discrepancy, AlphaRateOnModelProblem) {
  const auto p = make_diagonal_model(5000, 2.0, 2.0, 0);
  std::vector<Point> pts, ap;
  for (double d : logspace(1e-5, 1e-2, 7)) {
    std::vector<double> al;
    const auto noisy = add_noise(p, d, 1);
    pts.emplace_back(d, alpha_discrepancy(tikhonov_solver(p, noisy.y_delta), noisy.delta_abs).alpha);
    ap.emplace_back(d, alpha_apriori(noisy.delta_abs, 0.375, Classical{}).alpha);
  }
  const double sd = fit_rate(pts).slope, sa = fit_rate(ap).slope;
  EXPECT_NEAR(sd, 8.0 / 7.0, 0.05);
  EXPECT_NEAR(std::abs(sd - sa), 0.0, 0.1);
}

TEST(Oracle, GridSelection) {
  const auto p = scalar_problem();
  EXPECT_DOUBLE_EQ(alpha_oracle(tikhonov_solver(p, p.y_exact), {0.3}).alpha, 0.3);
  EXPECT_DOUBLE_EQ(alpha_oracle(tikhonov_solver(p, p.y_exact), {1e-6, 1.0}).alpha, 1e-6);
  // Constant error everywhere: the larger alpha wins the tie.
  Solver flat = [](double a) {
    RegularizedSolution s;
    s.alpha = a;
    s.error_norm = 1.0;
    return s;
  };
  EXPECT_DOUBLE_EQ(alpha_oracle(flat, {1e-3, 1e-1, 1e-2}).alpha, 1e-1);
}

TEST(Oracle, CloseToDiscrepancyOnDeriv2) {
  const auto p = make_deriv2(64, Deriv2Solution::linear_t, false);
  const auto grid = logspace(1e-10, 1.0, 300);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto noisy = add_noise(p, 0.005, seed);
    const auto o = alpha_oracle(tikhonov_solver(p, noisy.y_delta), grid);
    const auto d = alpha_discrepancy(tikhonov_solver(p, noisy.y_delta), noisy.delta_abs, 1.5);
    EXPECT_GT(o.alpha / d.alpha, 1.0 / 20.0);
    EXPECT_LT(o.alpha / d.alpha, 20.0);
  }
}
