#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "asclab/core_ops.hpp"
#include "asclab/problems.hpp"

namespace asclab {

struct RegularizedSolution {
  CoefVector x;      // natural coordinates
  CoefVector coefs;  // v-coordinates
  std::optional<double> alpha;
  std::optional<long> iteration;
  double residual_norm = 0.0;
  std::optional<double> error_norm;
  std::optional<double> source_norm_half;
  std::optional<double> source_norm_one;
  // ||A* xi_half - x|| / ||x||, evaluated through the operator.
  std::optional<double> representation_residual;

  // xi_half = from_u(xi_half_u) + xi_complement_scale * (data component
  // orthogonal to range A). Kept so that source_element can rebuild it.
  CoefVector xi_half_u;
  double xi_complement_scale = 0.0;
  // v-coefficients of xi_one (noise-free only), plus the null-space part
  // scale applied to x_true's component in N(A).
  CoefVector xi_one_v;
  double xi_one_null_scale = 0.0;
};

enum class SourceRepresentation { half, one };

namespace detail {

inline void check_data(const InverseProblem& p, const CoefVector& data) {
  if (data.size() != p.op.rows()) {
    throw DimensionError("data length does not match operator range dimension");
  }
  require_finite(data, "data");
}

inline bool is_exact_data(const InverseProblem& p, const CoefVector& data) {
  return data.size() == p.y_exact.size() && data == p.y_exact;
}

inline double representation_residual(const InverseProblem& p,
                                       const RegularizedSolution& sol) {
  const double xn = sol.x.norm();
  if (xn == 0.0) return 0.0;
  // The complement part is annihilated by A*, so only xi_half_u matters.
  const CoefVector back =
      apply(p.op, ApplyMode::adjoint(), p.op.from_u(sol.xi_half_u));
  return (back - sol.x).norm() / xn;
}

// Generalized spectral Tikhonov:
//   coef_i = sigma^{2k+1} / (sigma^{2k+2} + alpha w_i) * <y, u_i>.
// All derived quantities are evaluated in closed form to avoid cancellation.
inline RegularizedSolution spectral_tikhonov(const InverseProblem& p,
                                             const CoefVector& data,
                                             double alpha, double kappa,
                                             const CoefVector* weights,
                                             bool classical) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidParameter("alpha must be positive and finite");
  }
  check_data(p, data);
  const SingularSystem& op = p.op;
  const CoefVector& s = op.sigmas();
  const Index r = op.rank();

  const CoefVector c = op.to_u(data);
  const CoefVector xt_v = op.to_v(p.x_true);
  const bool exact = is_exact_data(p, data);
  const CoefVector noise_u =
      exact ? CoefVector::Zero(r) : CoefVector(op.to_u(data - p.y_exact));
  const double perp = exact ? 0.0 : op.data_complement(data).norm();

  RegularizedSolution sol;
  sol.alpha = alpha;
  sol.coefs.resize(r);
  sol.xi_half_u.resize(r);
  sol.xi_one_v.resize(r);
  CoefVector err_v(r);
  double res2 = perp * perp;
  for (Index i = 0; i < r; ++i) {
    const double sk = spectral_power(s(i), 2.0 * kappa);  // sigma^{2k}
    const double g = sk * s(i) * s(i);                     // sigma^{2k+2}
    const double aw = alpha * (weights ? (*weights)(i) : 1.0);
    const double den = g + aw;
    sol.coefs(i) = sk * s(i) * c(i) / den;
    const double rr = aw * c(i) / den;
    res2 += rr * rr;
    sol.xi_half_u(i) = sk * c(i) / den;
    sol.xi_one_v(i) = sk * c(i) / (den * s(i));
    err_v(i) = -aw * xt_v(i) / den + sk * s(i) * noise_u(i) / den;
  }
  sol.x = op.from_v(sol.coefs);
  sol.residual_norm = std::sqrt(res2);

  const double null_part = op.domain_complement(p.x_true).norm();
  sol.error_norm = std::hypot(err_v.norm(), null_part);

  sol.xi_complement_scale = classical ? 1.0 / alpha : 0.0;
  sol.source_norm_half =
      std::hypot(sol.xi_half_u.norm(), sol.xi_complement_scale * perp);
  if (exact) {
    sol.xi_one_null_scale = classical ? 1.0 / alpha : 0.0;
    sol.source_norm_one =
        std::hypot(sol.xi_one_v.norm(), sol.xi_one_null_scale * null_part);
  } else {
    sol.xi_one_v.resize(0);
  }
  sol.representation_residual = representation_residual(p, sol);
  return sol;
}

}  // namespace detail

/// Tikhonov of order kappa_order: minimizer of
/// ||Ax - y||^2 + alpha ||(A*A)^{-kappa/2} x||^2; kappa_order = 0 is classical.
inline RegularizedSolution tikhonov(const InverseProblem& problem,
                                    const CoefVector& data, double alpha,
                                    int kappa_order = 0) {
  if (kappa_order < 0) throw InvalidParameter("kappa_order must be >= 0");
  return detail::spectral_tikhonov(problem, data, alpha, kappa_order, nullptr,
                                   kappa_order == 0);
}

/// Penalty alpha ||T^s x||^2 with T v_i = t_i v_i.
inline RegularizedSolution tikhonov_hilbert_scale(const InverseProblem& problem,
                                                  const CoefVector& data,
                                                  double alpha, double s) {
  if (!problem.hilbert_weights) {
    throw ConfigurationError("problem has no Hilbert-scale weights");
  }
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidParameter("s must be >= 0");
  const CoefVector& t = *problem.hilbert_weights;
  if (t.size() < problem.op.rank()) {
    throw DimensionError("Hilbert-scale weights shorter than operator rank");
  }
  CoefVector w(problem.op.rank());
  for (Index i = 0; i < w.size(); ++i) w(i) = spectral_power(t(i), 2.0 * s);
  if (s == 0.0) {
    return detail::spectral_tikhonov(problem, data, alpha, 0.0, nullptr, true);
  }
  return detail::spectral_tikhonov(problem, data, alpha, 0.0, &w, false);
}

/// ||x||_s = ||T^s x|| over the first rank v-coefficients.
inline double hilbert_norm(const InverseProblem& problem, const CoefVector& x,
                           double s) {
  if (!problem.hilbert_weights) {
    throw ConfigurationError("problem has no Hilbert-scale weights");
  }
  const CoefVector v = problem.op.to_v(x);
  const CoefVector& t = *problem.hilbert_weights;
  double acc = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double z = spectral_power(t(i), s) * v(i);
    acc += z * z;
  }
  return std::sqrt(acc);
}

/// {1, 2, 4, ...} below k_max, plus k_max.
inline std::vector<long> geometric_checkpoints(long k_max, double factor = 2.0) {
  if (k_max < 1) throw InvalidParameter("k_max must be positive");
  if (!(factor > 1.0)) throw InvalidParameter("checkpoint factor must exceed 1");
  std::vector<long> ks;
  double k = 1.0;
  while (k < static_cast<double>(k_max)) {
    const long ki = std::lround(std::floor(k));
    if (ks.empty() || ki > ks.back()) ks.push_back(ki);
    k *= factor;
  }
  ks.push_back(k_max);
  return ks;
}

struct LandweberOptions {
  double beta = 1.0;
  long k_max = 100;
  std::optional<CoefVector> x0;
  bool track_source = true;
  std::vector<long> checkpoints;  // empty: geometric_checkpoints(k_max)
};

namespace detail {

struct LandweberSetup {
  CoefVector r0;  // u-coordinates of y - A x0
  CoefVector e0;  // v-coordinates of x0 - x_true
  CoefVector x0v;
  CoefVector noise_u;
  CoefVector x0_null;  // component of x0 in N(A), carried unchanged
  double perp = 0.0;
  double null_err = 0.0;
  std::vector<long> ks;
};

inline LandweberSetup landweber_setup(const InverseProblem& p,
                                      const CoefVector& data,
                                      const LandweberOptions& o) {
  check_data(p, data);
  const double s1 = p.op.sigma_max();
  if (!(o.beta > 0.0) || !(o.beta < 2.0 / (s1 * s1))) {
    throw InvalidParameter("beta must lie in (0, 2/sigma_1^2)");
  }
  LandweberSetup st;
  const CoefVector x0 = o.x0 ? *o.x0 : CoefVector::Zero(p.op.cols());
  if (x0.size() != p.op.cols()) throw DimensionError("x0 has wrong length");
  require_finite(x0, "x0");
  st.x0v = p.op.to_v(x0);
  st.x0_null = p.op.domain_complement(x0);
  const CoefVector& s = p.op.sigmas();
  const CoefVector c = p.op.to_u(data);
  st.r0 = c - s.cwiseProduct(st.x0v);
  st.e0 = st.x0v - p.op.to_v(p.x_true);
  const bool exact = is_exact_data(p, data);
  st.noise_u = exact ? CoefVector::Zero(p.op.rank())
                     : CoefVector(p.op.to_u(data - p.y_exact));
  st.perp = exact ? 0.0 : p.op.data_complement(data).norm();
  st.null_err = (st.x0_null - p.op.domain_complement(p.x_true)).norm();
  st.ks = o.checkpoints.empty() ? geometric_checkpoints(o.k_max) : o.checkpoints;
  std::sort(st.ks.begin(), st.ks.end());
  st.ks.erase(std::unique(st.ks.begin(), st.ks.end()), st.ks.end());
  if (st.ks.front() < 0 || st.ks.back() > o.k_max) {
    throw InvalidParameter("checkpoints must lie in [0, k_max]");
  }
  return st;
}

inline RegularizedSolution landweber_record(const InverseProblem& p,
                                            const LandweberSetup& st,
                                            const LandweberOptions& o, long k,
                                            const CoefVector& xv,
                                            const CoefVector& r,
                                            const CoefVector& e,
                                            const CoefVector& w) {
  RegularizedSolution sol;
  sol.iteration = k;
  sol.coefs = xv;
  sol.x = p.op.from_v(xv) + st.x0_null;
  sol.residual_norm = std::hypot(r.norm(), st.perp);
  sol.error_norm = std::hypot(e.norm(), st.null_err);
  if (o.track_source) {
    sol.xi_half_u = w;
    sol.xi_complement_scale = o.beta * static_cast<double>(k);
    sol.source_norm_half = std::hypot(w.norm(), sol.xi_complement_scale * st.perp);
    // x_k = x0 + A* w_k, so compare against x_k - x0.
    const CoefVector dx = p.op.from_v(xv - st.x0v);
    const double dn = dx.norm();
    const CoefVector back = apply(p.op, ApplyMode::adjoint(), p.op.from_u(w));
    sol.representation_residual = dn == 0.0 ? 0.0 : (back - dx).norm() / dn;
  }
  return sol;
}

}  // namespace detail

/// x_{k+1} = x_k + beta A*(y - A x_k), iterated spectrally; with
/// track_source, w_k = beta sum_{i<k} (I - beta AA*)^i (y - A x0) so that
/// x_k = x0 + A* w_k. Returns the iterates at the checkpoints.
inline std::vector<RegularizedSolution> landweber(const InverseProblem& problem,
                                                  const CoefVector& data,
                                                  const LandweberOptions& o) {
  const auto st = detail::landweber_setup(problem, data, o);
  const CoefVector& s = problem.op.sigmas();
  const Index n = problem.op.rank();
  CoefVector xv = st.x0v, r = st.r0, e = st.e0, w = CoefVector::Zero(n);
  std::vector<RegularizedSolution> out;
  out.reserve(st.ks.size());
  std::size_t next = 0;
  for (long k = 0; next < st.ks.size(); ++k) {
    if (k == st.ks[next]) {
      out.push_back(detail::landweber_record(problem, st, o, k, xv, r, e, w));
      ++next;
      if (next == st.ks.size()) break;
    }
    for (Index i = 0; i < n; ++i) {
      const double br = o.beta * r(i);
      const double q = 1.0 - o.beta * s(i) * s(i);
      xv(i) += s(i) * br;
      w(i) += br;
      e(i) = q * e(i) + o.beta * s(i) * st.noise_u(i);
      r(i) *= q;
    }
  }
  return out;
}

/// Closed form of the k-th iterate: with q = 1 - beta sigma^2,
/// w_k = r0 (1 - q^k) / sigma^2.
inline std::vector<RegularizedSolution> landweber_summed(
    const InverseProblem& problem, const CoefVector& data,
    const LandweberOptions& o) {
  const auto st = detail::landweber_setup(problem, data, o);
  const CoefVector& s = problem.op.sigmas();
  const Index n = problem.op.rank();
  std::vector<RegularizedSolution> out;
  out.reserve(st.ks.size());
  CoefVector xv(n), r(n), e(n), w(n);
  for (long k : st.ks) {
    const double kd = static_cast<double>(k);
    for (Index i = 0; i < n; ++i) {
      const double bs2 = o.beta * s(i) * s(i);
      double qk, one_minus_qk;
      if (bs2 < 1.0) {
        const double lg = kd * std::log1p(-bs2);
        qk = std::exp(lg);
        one_minus_qk = -std::expm1(lg);
      } else {
        qk = std::pow(1.0 - bs2, kd);
        one_minus_qk = 1.0 - qk;
      }
      w(i) = st.r0(i) * one_minus_qk / (s(i) * s(i));
      xv(i) = st.x0v(i) + s(i) * w(i);
      r(i) = qk * st.r0(i);
      e(i) = qk * st.e0(i) + st.noise_u(i) * one_minus_qk / s(i);
    }
    out.push_back(detail::landweber_record(problem, st, o, k, xv, r, e, w));
  }
  return out;
}

/// Source element of a computed solution and its norm.
///   half: x = A* xi   (Tikhonov: xi = (y - A x)/alpha mapped through
///         (AA*)^kappa resp. the Hilbert-scale weights; Landweber: w_k)
///   one:  x = A*A xi  (noise-free Tikhonov only)
inline std::pair<CoefVector, double> source_element(
    const InverseProblem& problem, const RegularizedSolution& sol,
    const CoefVector& data, SourceRepresentation rep) {
  detail::check_data(problem, data);
  if (rep == SourceRepresentation::half) {
    if (sol.xi_half_u.size() != problem.op.rank()) {
      throw UnsupportedMode("solution carries no source element");
    }
    CoefVector xi = problem.op.from_u(sol.xi_half_u);
    if (sol.xi_complement_scale != 0.0) {
      xi += sol.xi_complement_scale * problem.op.data_complement(data);
    }
    const double nrm = xi.norm();
    return {std::move(xi), nrm};
  }
  if (!detail::is_exact_data(problem, data) || !sol.alpha ||
      sol.xi_one_v.size() != problem.op.rank()) {
    throw UnsupportedMode(
        "the x = A*A xi representation is available for noise-free Tikhonov only");
  }
  CoefVector xi = problem.op.from_v(sol.xi_one_v);
  if (sol.xi_one_null_scale != 0.0) {
    xi += sol.xi_one_null_scale * problem.op.domain_complement(problem.x_true);
  }
  const double nrm = xi.norm();
  return {std::move(xi), nrm};
}

}  // namespace asclab
