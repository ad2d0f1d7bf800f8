#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "asclab/errors.hpp"

namespace asclab {

/// Coordinate vector: coefficients in an orthonormal basis or nodal samples.
using CoefVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline void require_finite(const CoefVector& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidInput(std::string(what) + " contains non-finite entries");
  }
}

/// sigma^p with the convention 0^0 = 1 and an exact fast path for p == 0.
inline double spectral_power(double sigma, double p) {
  if (p == 0.0) return 1.0;
  if (p == 1.0) return sigma;
  if (p == 2.0) return sigma * sigma;
  return std::pow(sigma, p);
}

/// Singular system (sigma_i, u_i, v_i) of a compact operator A : R^n -> R^m.
///
/// Vectors handed to the operator live in "natural" coordinates: nodal values
/// for discretized kernels, canonical coordinates for diagonal operators.
/// When a factor is absent the corresponding basis is the canonical one, so a
/// diagonal operator costs O(n) per application.
class SingularSystem {
 public:
  SingularSystem() = default;

  SingularSystem(CoefVector sigmas, std::optional<Matrix> left,
                 std::optional<Matrix> right, double norm_scale, Index rows,
                 Index cols)
      : sigmas_(std::move(sigmas)),
        left_(std::move(left)),
        right_(std::move(right)),
        norm_scale_(norm_scale),
        rows_(rows),
        cols_(cols) {
    validate();
  }

  /// Diagonal operator diag(sigmas) on R^n with canonical singular vectors.
  static SingularSystem diagonal(CoefVector sigmas, double norm_scale = 1.0) {
    const Index n = sigmas.size();
    return SingularSystem(std::move(sigmas), std::nullopt, std::nullopt,
                          norm_scale, n, n);
  }

  Index rank() const { return sigmas_.size(); }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const CoefVector& sigmas() const { return sigmas_; }
  double norm_scale() const { return norm_scale_; }
  double sigma_max() const { return sigmas_.size() ? sigmas_(0) : 0.0; }
  double sigma_min() const {
    return sigmas_.size() ? sigmas_(sigmas_.size() - 1) : 0.0;
  }
  bool has_left_factor() const { return left_.has_value(); }
  bool has_right_factor() const { return right_.has_value(); }
  const std::optional<Matrix>& left_factor() const { return left_; }
  const std::optional<Matrix>& right_factor() const { return right_; }

  // Coordinate changes. to_* projects onto the singular basis (length rank),
  // from_* synthesizes a natural-coordinate vector from coefficients.

  CoefVector to_v(const CoefVector& x) const {
    check_size(x, cols_, "domain vector");
    if (right_) return right_->transpose() * x;
    return x.head(rank());
  }

  CoefVector from_v(const CoefVector& c) const {
    check_size(c, rank(), "v-coefficients");
    if (right_) return (*right_) * c;
    CoefVector x = CoefVector::Zero(cols_);
    x.head(rank()) = c;
    return x;
  }

  CoefVector to_u(const CoefVector& y) const {
    check_size(y, rows_, "data vector");
    if (left_) return left_->transpose() * y;
    return y.head(rank());
  }

  CoefVector from_u(const CoefVector& c) const {
    check_size(c, rank(), "u-coefficients");
    if (left_) return (*left_) * c;
    CoefVector y = CoefVector::Zero(rows_);
    y.head(rank()) = c;
    return y;
  }

  /// Component of a data vector orthogonal to span{u_i}.
  CoefVector data_complement(const CoefVector& y) const {
    return y - from_u(to_u(y));
  }

  /// Component of a domain vector in the null space of A.
  CoefVector domain_complement(const CoefVector& x) const {
    return x - from_v(to_v(x));
  }

 private:
  static void check_size(const CoefVector& v, Index expected,
                         const char* what) {
    if (v.size() != expected) {
      std::ostringstream os;
      os << what << " has length " << v.size() << ", expected " << expected;
      throw DimensionError(os.str());
    }
  }

  void validate() const {
    if (!sigmas_.allFinite()) throw InvalidInput("singular values not finite");
    for (Index i = 0; i < sigmas_.size(); ++i) {
      if (!(sigmas_(i) > 0.0)) {
        throw InvalidInput("singular values must be positive");
      }
      // Ties are allowed; only strict increases are rejected.
      if (i > 0 && sigmas_(i) > sigmas_(i - 1)) {
        throw InvalidInput("singular values must be non-increasing");
      }
    }
    if (!(norm_scale_ > 0.0)) throw InvalidInput("norm_scale must be positive");
    if (rank() > rows_ || rank() > cols_) {
      throw DimensionError("rank exceeds operator dimensions");
    }
    check_factor(left_, rows_, "left");
    check_factor(right_, cols_, "right");
  }

  void check_factor(const std::optional<Matrix>& f, Index dim,
                    const char* side) const {
    if (!f) return;
    if (f->rows() != dim || f->cols() != rank()) {
      throw DimensionError(std::string(side) + " factor has wrong shape");
    }
    const Matrix gram = f->transpose() * (*f);
    const double dev =
        (gram - Matrix::Identity(rank(), rank())).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-10)) {
      throw InvalidInput(std::string(side) + " factor is not orthonormal");
    }
  }

  CoefVector sigmas_;
  std::optional<Matrix> left_;
  std::optional<Matrix> right_;
  double norm_scale_ = 1.0;
  Index rows_ = 0;
  Index cols_ = 0;
};

/// Dense SVD of an m x n matrix. Singular values <= 1e-14 * sigma_1 are
/// dropped. With `normalize`, the operator is rescaled so that sigma_1 = 1 and
/// the removed factor is kept in norm_scale().
inline SingularSystem build_svd_operator(const Matrix& matrix, bool normalize) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw InvalidInput("matrix must have at least one row and column");
  }
  if (!matrix.allFinite()) throw InvalidInput("matrix contains non-finite entries");

  Eigen::BDCSVD<Matrix> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw InvalidInput("SVD did not converge");

  const CoefVector& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) {
    throw InvalidInput("matrix has no nonzero singular values");
  }
  const double cutoff = 1e-14 * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;

  const double scale = normalize ? s(0) : 1.0;
  CoefVector sig = s.head(r) / scale;
  Matrix u = svd.matrixU().leftCols(r);
  Matrix v = svd.matrixV().leftCols(r);
  return SingularSystem(std::move(sig), std::move(u), std::move(v), scale,
                        matrix.rows(), matrix.cols());
}

/// Which spectral map apply() evaluates.
struct ApplyMode {
  enum class Kind { forward, adjoint, gram_power, forward_gram_power };
  Kind kind = Kind::forward;
  double nu = 0.0;

  /// A : domain -> data
  static ApplyMode forward() { return {Kind::forward, 0.0}; }
  /// A* : data -> domain
  static ApplyMode adjoint() { return {Kind::adjoint, 0.0}; }
  /// (A*A)^nu : domain -> domain; nu = 0 projects onto span{v_i}
  static ApplyMode gram_power(double nu) { return {Kind::gram_power, nu}; }
  /// A (A*A)^nu : domain -> data
  static ApplyMode forward_gram_power(double nu) {
    return {Kind::forward_gram_power, nu};
  }
};

inline CoefVector apply(const SingularSystem& op, ApplyMode mode,
                        const CoefVector& x) {
  require_finite(x, "operand");
  if (mode.nu < 0.0 || !std::isfinite(mode.nu)) {
    throw InvalidParameter("operator power must be a finite nonnegative number");
  }
  const CoefVector& s = op.sigmas();
  switch (mode.kind) {
    case ApplyMode::Kind::forward:
      return op.from_u(s.cwiseProduct(op.to_v(x)));
    case ApplyMode::Kind::adjoint:
      return op.from_v(s.cwiseProduct(op.to_u(x)));
    case ApplyMode::Kind::gram_power: {
      CoefVector c = op.to_v(x);
      for (Index i = 0; i < c.size(); ++i) c(i) *= spectral_power(s(i), 2.0 * mode.nu);
      return op.from_v(c);
    }
    case ApplyMode::Kind::forward_gram_power: {
      CoefVector c = op.to_v(x);
      for (Index i = 0; i < c.size(); ++i) {
        c(i) *= spectral_power(s(i), 2.0 * mode.nu + 1.0);
      }
      return op.from_u(c);
    }
  }
  throw InvalidParameter("unknown apply mode");
}

/// Dense matrix of the represented operator (reporting and tests only).
inline Matrix dense_matrix(const SingularSystem& op) {
  Matrix m = Matrix::Zero(op.rows(), op.cols());
  for (Index j = 0; j < op.cols(); ++j) {
    CoefVector e = CoefVector::Unit(op.cols(), j);
    m.col(j) = apply(op, ApplyMode::forward(), e);
  }
  return m;
}

}  // namespace asclab
