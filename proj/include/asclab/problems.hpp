#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "asclab/core_ops.hpp"

namespace asclab {

struct InverseProblem {
  SingularSystem op;
  CoefVector x_true;
  CoefVector y_exact;
  std::optional<double> mu_nominal;
  std::optional<CoefVector> hilbert_weights;
  std::optional<double> s_hint;
  std::string name;
  // Collocation nodes for discretized kernels; empty for sequence-space models.
  CoefVector grid;
};

/// Green's function of -d^2/dt^2 with homogeneous Dirichlet conditions.
inline double deriv2_kernel(double s, double t) {
  return s < t ? s * (t - 1.0) : t * (s - 1.0);
}

enum class Deriv2Solution { linear_t, constant_one };

inline InverseProblem make_deriv2(int n, Deriv2Solution solution,
                                  bool normalize) {
  if (n < 4) throw InvalidParameter("deriv2 requires n >= 4");
  CoefVector t(n);
  for (int i = 0; i < n; ++i) t(i) = (i + 0.5) / n;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = deriv2_kernel(t(i), t(j)) / n;

  InverseProblem p;
  p.op = build_svd_operator(a, normalize);
  p.x_true = solution == Deriv2Solution::linear_t ? t : CoefVector::Ones(n);
  p.y_exact = apply(p.op, ApplyMode::forward(), p.x_true);
  p.name = solution == Deriv2Solution::linear_t ? "deriv2_linear"
                                                : "deriv2_constant";
  p.grid = t;
  return p;
}

/// sigma_i = i^-eta, <x,v_i> = i^-beta (first `leading_ones` set to 1).
inline InverseProblem make_diagonal_model(int n, double eta, double beta_decay,
                                          int leading_ones = 0) {
  if (n < 1) throw InvalidParameter("n must be positive");
  if (!(eta > 0.0)) throw InvalidParameter("eta must be positive");
  if (!(2.0 * beta_decay > 1.0)) {
    throw InvalidParameter("coefficient tail diverges: need 2*beta_decay > 1");
  }
  if (leading_ones < 0) throw InvalidParameter("leading_ones must be >= 0");
  CoefVector sig(n), x(n);
  for (int i = 0; i < n; ++i) {
    const double k = i + 1.0;
    sig(i) = std::pow(k, -eta);
    x(i) = i < leading_ones ? 1.0 : std::pow(k, -beta_decay);
  }
  InverseProblem p;
  p.op = SingularSystem::diagonal(std::move(sig));
  p.x_true = std::move(x);
  p.y_exact = apply(p.op, ApplyMode::forward(), p.x_true);
  p.mu_nominal = (2.0 * beta_decay - 1.0) / (4.0 * eta);
  p.name = "diagonal";
  return p;
}

/// beta_decay giving smoothness index mu for decay rate eta.
inline double beta_for_mu(double mu, double eta) { return (4.0 * eta * mu + 1.0) / 2.0; }

/// T v_i = i v_i, sigma_i = i^-a, so ||Ax|| = ||x||_{-a}.
inline InverseProblem make_hilbert_scale_model(int n, double a, double p,
                                               double s_hint) {
  if (n < 1) throw InvalidParameter("n must be positive");
  if (!(a > 0.0) || !(p > 0.0)) throw InvalidParameter("a and p must be positive");
  CoefVector sig(n), x(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double k = i + 1.0;
    sig(i) = std::pow(k, -a);
    x(i) = std::pow(k, -(p + 0.51));
    w(i) = k;
  }
  InverseProblem prob;
  prob.op = SingularSystem::diagonal(std::move(sig));
  prob.x_true = std::move(x);
  prob.y_exact = apply(prob.op, ApplyMode::forward(), prob.x_true);
  prob.mu_nominal = p / (2.0 * a);
  prob.hilbert_weights = std::move(w);
  prob.s_hint = s_hint;
  prob.name = "hilbert_scale";
  return prob;
}

struct NoisySample {
  CoefVector y_delta;
  double delta_abs = 0.0;
  double delta_rel = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in (0, 1], 53 bits.
inline double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normal draw i of stream `seed`; independent of evaluation order.
inline double counter_gaussian(std::uint64_t seed, std::uint64_t i) {
  const std::uint64_t key = detail::splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  const std::uint64_t pair = i / 2;
  const double u1 = detail::unit_open(detail::splitmix64(key + 2 * pair));
  const double u2 = detail::unit_open(detail::splitmix64(key + 2 * pair + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return (i % 2 == 0) ? r * std::cos(th) : r * std::sin(th);
}

inline CoefVector gaussian_vector(Index n, std::uint64_t seed) {
  CoefVector e(n);
  for (Index i = 0; i < n; ++i) e(i) = counter_gaussian(seed, static_cast<std::uint64_t>(i));
  return e;
}

/// y^delta = y + delta_rel * ||y|| * e / ||e|| with e standard Gaussian.
inline NoisySample add_noise(const InverseProblem& problem, double delta_rel,
                             std::uint64_t seed) {
  if (!(delta_rel >= 0.0) || !std::isfinite(delta_rel)) {
    throw InvalidParameter("delta_rel must be a finite nonnegative number");
  }
  NoisySample out;
  out.delta_rel = delta_rel;
  out.seed = seed;
  if (delta_rel == 0.0) {
    out.y_delta = problem.y_exact;
    return out;
  }
  const CoefVector e = gaussian_vector(problem.y_exact.size(), seed);
  out.delta_abs = delta_rel * problem.y_exact.norm();
  out.y_delta = problem.y_exact + (out.delta_abs / e.norm()) * e;
  return out;
}

}  // namespace asclab
