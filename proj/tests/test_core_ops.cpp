#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "asclab/core_ops.hpp"
#include "oracles.hpp"

using namespace asclab;

TEST(SingularSystem, IdentityKeepsTiedSingularValues) {
  const auto op = build_svd_operator(Matrix::Identity(2, 2), false);
  ASSERT_EQ(op.rank(), 2);
  EXPECT_DOUBLE_EQ(op.sigmas()(0), 1.0);
  EXPECT_DOUBLE_EQ(op.sigmas()(1), 1.0);
}

TEST(SingularSystem, NormalizeDividesBySigmaOne) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  const auto op = build_svd_operator(m, true);
  EXPECT_NEAR(op.sigmas()(0), 1.0, 1e-15);
  EXPECT_NEAR(op.sigmas()(1), 0.5, 1e-15);
  EXPECT_NEAR(op.norm_scale(), 2.0, 1e-15);
}

TEST(SingularSystem, Deriv2LeadingSingularValue) {
  const int n = 512;
  Matrix k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double s = (i + 0.5) / n, t = (j + 0.5) / n;
      k(i, j) = (s < t ? s * (t - 1) : t * (s - 1)) / n;
    }
  const auto op = build_svd_operator(k, false);
  // Symmetric kernel: singular values are |eigenvalues|.
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(op.sigma_max(), top, 1e-12);
  EXPECT_NEAR(op.sigma_max(), 1.0 / (std::numbers::pi * std::numbers::pi), 0.01 / 9.8696);
}

TEST(SingularSystem, DropsNumericallyZeroSingularValues) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-16;
  const auto op = build_svd_operator(m, false);
  EXPECT_EQ(op.rank(), 1);
}

TEST(SingularSystem, RejectsNonFiniteAndZeroMatrices) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = NAN;
  EXPECT_THROW(build_svd_operator(m, false), InvalidInput);
  EXPECT_THROW(build_svd_operator(Matrix::Zero(2, 2), false), InvalidInput);
}

TEST(SingularSystem, ValidatesInvariants) {
  EXPECT_THROW(SingularSystem::diagonal((CoefVector(2) << 0.5, 1.0).finished()), InvalidInput);
  EXPECT_THROW(SingularSystem::diagonal((CoefVector(2) << 1.0, 0.0).finished()), InvalidInput);
  Matrix bad = Matrix::Ones(2, 1);
  EXPECT_THROW(SingularSystem((CoefVector(1) << 1.0).finished(), bad, std::nullopt, 1.0, 2, 2),
               InvalidInput);
}

TEST(Apply, DiagonalForwardAndPowers) {
  const auto op = SingularSystem::diagonal((CoefVector(2) << 1.0, 0.5).finished());
  const CoefVector x = CoefVector::Ones(2);
  const CoefVector ax = apply(op, ApplyMode::forward(), x);
  EXPECT_DOUBLE_EQ(ax(0), 1.0);
  EXPECT_DOUBLE_EQ(ax(1), 0.5);
  const CoefVector h = apply(op, ApplyMode::gram_power(0.5), x);
  EXPECT_DOUBLE_EQ(h(0), 1.0);
  EXPECT_DOUBLE_EQ(h(1), 0.5);
}

TEST(Apply, RotatedOperatorMatchesMatrixProducts) {
  const double c = std::sqrt(0.5);
  Matrix rot(2, 2);
  rot << c, -c, c, c;
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 0.5;
  const Matrix a = rot * d;
  const auto op = build_svd_operator(a, false);
  const CoefVector e0 = CoefVector::Unit(2, 0);
  const CoefVector via_adjoint = apply(op, ApplyMode::adjoint(), apply(op, ApplyMode::forward(), e0));
  const CoefVector via_power = apply(op, ApplyMode::gram_power(1.0), e0);
  const CoefVector dense = a.transpose() * a * e0;
  EXPECT_LE((via_adjoint - dense).norm(), 1e-12);
  EXPECT_LE((via_power - dense).norm(), 1e-12);
}

TEST(Apply, LengthMismatchThrows) {
  const auto op = SingularSystem::diagonal(CoefVector::Ones(3));
  EXPECT_THROW(apply(op, ApplyMode::forward(), CoefVector::Ones(2)), DimensionError);
  EXPECT_THROW(apply(op, ApplyMode::gram_power(-1.0), CoefVector::Ones(3)), InvalidParameter);
}

TEST(Apply, AdjointConsistency) {
  const auto a = oracle::random_matrix(7, 5, 3);
  const auto op = build_svd_operator(a, false);
  for (std::uint32_t t = 0; t < 10; ++t) {
    const CoefVector x = oracle::random_vector(5, 100 + t);
    const CoefVector y = oracle::random_vector(7, 200 + t);
    const double lhs = apply(op, ApplyMode::forward(), x).dot(y);
    const double rhs = x.dot(apply(op, ApplyMode::adjoint(), y));
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
    EXPECT_LE((apply(op, ApplyMode::forward(), x) - a * x).norm(), 1e-10);
  }
}

TEST(Apply, SingularTripleRelations) {
  const auto a = oracle::random_matrix(6, 6, 11);
  const auto op = build_svd_operator(a, false);
  for (Index i = 0; i < op.rank(); ++i) {
    const CoefVector v = op.right_factor()->col(i);
    const CoefVector u = op.left_factor()->col(i);
    EXPECT_LE((a * v - op.sigmas()(i) * u).norm(), 1e-10);
    EXPECT_LE((a.transpose() * u - op.sigmas()(i) * v).norm(), 1e-10);
  }
}

TEST(Apply, Semigroup) {
  const auto op = build_svd_operator(oracle::random_matrix(8, 8, 5), true);
  const CoefVector x = oracle::random_vector(8, 6);
  for (auto [a, b] : {std::pair{0.25, 0.5}, {0.5, 1.0}, {1.5, 0.75}}) {
    const CoefVector lhs =
        apply(op, ApplyMode::gram_power(a), apply(op, ApplyMode::gram_power(b), x));
    const CoefVector rhs = apply(op, ApplyMode::gram_power(a + b), x);
    EXPECT_LE((lhs - rhs).norm(), 1e-10);
  }
}

TEST(Apply, AdjointAnnihilatesPaddedNullDirection) {
  Matrix a = Matrix::Zero(5, 5);
  a.leftCols(4) = oracle::random_matrix(5, 4, 9);
  const auto op = build_svd_operator(a, false);
  EXPECT_EQ(op.rank(), 4);
  const CoefVector z = apply(op, ApplyMode::adjoint(), oracle::random_vector(5, 10));
  EXPECT_LE(std::abs(z(4)), 1e-12);
}

TEST(Apply, PowerZeroIsIdentityOnRange) {
  const auto op = build_svd_operator(oracle::random_matrix(4, 4, 1), false);
  const CoefVector x = oracle::random_vector(4, 2);
  EXPECT_LE((apply(op, ApplyMode::gram_power(0.0), x) - x).norm(), 1e-12);
}
