#include <gtest/gtest.h>

#include <cmath>

#include "asclab/problems.hpp"
#include "oracles.hpp"

using namespace asclab;

TEST(Deriv2, KernelValuesAndSymmetry) {
  EXPECT_DOUBLE_EQ(deriv2_kernel(0.25, 0.75), -0.0625);
  EXPECT_NEAR(deriv2_kernel(0.3, 0.7), -0.09, 1e-15);
  EXPECT_NEAR(deriv2_kernel(0.7, 0.3), -0.09, 1e-15);
}

TEST(Deriv2, ExactDataVanishesAtEndpoints) {
  for (auto sol : {Deriv2Solution::linear_t, Deriv2Solution::constant_one}) {
    double prev = INFINITY;
    for (int n : {64, 256, 1024}) {
      const auto p = make_deriv2(n, sol, false);
      const double mx = p.y_exact.cwiseAbs().maxCoeff();
      const double ends = std::max(std::abs(p.y_exact(0)), std::abs(p.y_exact(n - 1)));
      if (n == 256) EXPECT_LE(ends, 4.0 / n * mx);
      EXPECT_LT(ends / mx, prev);
      prev = ends / mx;
    }
  }
}

TEST(Deriv2, MatchesAnalyticData) {
  // y(s) = (s^3 - s)/6 for x(t) = t, and (s^2 - s)/2 for x = 1.
  const int n = 256;
  const auto p = make_deriv2(n, Deriv2Solution::linear_t, false);
  const auto q = make_deriv2(n, Deriv2Solution::constant_one, false);
  for (int i = 0; i < n; i += 17) {
    const double s = (i + 0.5) / n;
    EXPECT_NEAR(p.y_exact(i), (s * s * s - s) / 6.0, 1e-5);
    EXPECT_NEAR(q.y_exact(i), (s * s - s) / 2.0, 1e-5);
  }
  EXPECT_THROW(make_deriv2(3, Deriv2Solution::linear_t, false), InvalidParameter);
}

TEST(DiagonalModel, ParametersAndCoefficients) {
  const auto p = make_diagonal_model(100, 2.0, 2.0, 8);
  EXPECT_DOUBLE_EQ(*p.mu_nominal, 0.375);
  EXPECT_DOUBLE_EQ(p.op.sigmas()(1), 0.25);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(p.x_true(i), 1.0);
  EXPECT_DOUBLE_EQ(p.x_true(8), 1.0 / 81.0);
  EXPECT_THROW(make_diagonal_model(10, 2.0, 0.5, 0), InvalidParameter);
  EXPECT_LE((p.y_exact - p.op.sigmas().cwiseProduct(p.x_true)).norm(), 1e-12);
}

TEST(DiagonalModel, TailSumsMatchSourceIndex) {
  // sum_{i>=k} x_i^2 against sigma_k^{4 mu}, computed directly.
  const int N = 20000;
  const auto p = make_diagonal_model(N, 2.0, 2.0, 0);
  const double mu = *p.mu_nominal;
  double tail = 0.0, lo = INFINITY, hi = 0.0;
  for (int k = N; k >= 1; --k) {
    tail += std::pow(k, -4.0);
    if (k <= N / 2) {
      const double ratio = tail / std::pow(std::pow(k, -2.0), 4.0 * mu);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  EXPECT_GT(lo, 0.2);
  EXPECT_LT(hi, 2.0);
}

TEST(HilbertModel, NormEquivalenceAndTails) {
  const auto p = make_hilbert_scale_model(50, 1.0, 1.0, 2.0);
  EXPECT_NEAR(p.op.sigmas()(2), 1.0 / 3.0, 1e-15);
  const CoefVector x = oracle::random_vector(50, 4);
  double neg = 0.0;
  for (int i = 0; i < 50; ++i) neg += std::pow(i + 1.0, -2.0) * x(i) * x(i);
  EXPECT_NEAR(apply(p.op, ApplyMode::forward(), x).norm(), std::sqrt(neg), 1e-12);
  ASSERT_TRUE(p.hilbert_weights);
  EXPECT_DOUBLE_EQ((*p.hilbert_weights)(4), 5.0);
  // ||x||_1 converges (exponent -1.02), ||x||_2 diverges (exponent +0.98).
  auto partial = [](double expo, int n) {
    double s = 0;
    for (int i = 1; i <= n; ++i) s += std::pow(i, expo);
    return s;
  };
  const double inc1 = partial(2.0 - 3.02, 50000) - partial(2.0 - 3.02, 25000);
  const double inc2 = partial(2.0 - 3.02, 100000) - partial(2.0 - 3.02, 50000);
  EXPECT_LT(inc2, inc1);
  EXPECT_GT(partial(4.0 - 3.02, 2000), 1.5 * partial(4.0 - 3.02, 1000));
}

TEST(Noise, ExactRescalingAndDeterminism) {
  const auto p = make_deriv2(64, Deriv2Solution::linear_t, false);
  const auto a = add_noise(p, 0.005, 7);
  const auto b = add_noise(p, 0.005, 7);
  const auto c = add_noise(p, 0.005, 8);
  EXPECT_NEAR((a.y_delta - p.y_exact).norm() / p.y_exact.norm(), 0.005, 1e-12);
  EXPECT_NEAR(a.delta_abs, 0.005 * p.y_exact.norm(), 1e-15);
  EXPECT_TRUE(a.y_delta == b.y_delta);
  EXPECT_FALSE(a.y_delta == c.y_delta);
  const auto z = add_noise(p, 0.0, 7);
  EXPECT_TRUE(z.y_delta == p.y_exact);
  EXPECT_EQ(z.delta_abs, 0.0);
  EXPECT_THROW(add_noise(p, -1.0, 1), InvalidParameter);
}

TEST(Noise, GaussianMoments) {
  const auto e = gaussian_vector(200000, 3);
  EXPECT_NEAR(e.mean(), 0.0, 0.01);
  EXPECT_NEAR(e.squaredNorm() / e.size(), 1.0, 0.01);
}
