#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "asclab/core_ops.hpp"
#include "asclab/errors.hpp"
#include "asclab/method.hpp"

namespace asclab {

// Everything here reduces to one spectral problem:
//   minimize ||b - g .* xi||  subject to ||xi|| <= R,
// plus a residual `fixed` that no xi can touch. The Lagrange stationarity
// condition gives xi(lambda) = g b / (g^2 + lambda); ||xi(lambda)|| is strictly
// decreasing in lambda, so the active multiplier is found by bisection.

struct ConstrainedLsq {
  CoefVector g;
  CoefVector b;
  double fixed = 0.0;

  double radius(double lambda) const {
    double acc = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
      const double z = g(i) * b(i) / (g(i) * g(i) + lambda);
      acc += z * z;
    }
    return std::sqrt(acc);
  }

  double distance(double lambda) const {
    double acc = fixed * fixed;
    for (Index i = 0; i < g.size(); ++i) {
      const double z = lambda * b(i) / (g(i) * g(i) + lambda);
      acc += z * z;
    }
    return std::sqrt(acc);
  }

  CoefVector minimizer(double lambda) const {
    CoefVector xi(g.size());
    for (Index i = 0; i < g.size(); ++i) xi(i) = g(i) * b(i) / (g(i) * g(i) + lambda);
    return xi;
  }

  /// sup over lambda > 0 of radius(lambda): the norm of the exact preimage.
  double sup_radius() const {
    double acc = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
      const double z = b(i) / g(i);
      acc += z * z;
    }
    return std::sqrt(acc);
  }

  double target_norm() const { return std::hypot(b.norm(), fixed); }
};

struct DistanceResult {
  double d = 0.0;
  double lambda = 0.0;
  double achieved_R = 0.0;
  bool saturated = false;
};

struct LagrangeSettings {
  double lambda_lo = 1e-30;
  double lambda_hi = 1e10;
  int max_steps = 200;
  double rel_tol = 1e-8;
};

inline DistanceResult solve_constrained(const ConstrainedLsq& prob, double R,
                                        const LagrangeSettings& cfg = {}) {
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidParameter("R must be positive");
  const double tnorm = prob.target_norm();
  if (!(tnorm > 0.0)) throw InvalidInput("target has no nonzero component");

  DistanceResult res;
  double lo = cfg.lambda_lo, hi = cfg.lambda_hi;
  if (prob.radius(lo) <= R) {
    // Budget exceeds (numerically) the exact preimage: projection floor.
    res.lambda = lo;
    res.achieved_R = prob.radius(lo);
    res.d = prob.distance(lo);
    res.saturated = true;
    return res;
  }
  // Tiny budgets need a larger multiplier than the default bracket allows.
  int grow = 0;
  while (prob.radius(hi) > R) {
    hi *= 1e10;
    if (++grow > 30 || !std::isfinite(hi)) {
      std::ostringstream os;
      os << "lambda bracket failure: radius(" << hi << ") still exceeds R=" << R;
      throw NumericError(os.str());
    }
  }
  double llo = std::log(lo), lhi = std::log(hi), lam = hi;
  for (int it = 0; it < cfg.max_steps; ++it) {
    const double mid = 0.5 * (llo + lhi);
    lam = std::exp(mid);
    const double rad = prob.radius(lam);
    if (std::abs(rad - R) <= cfg.rel_tol * R) break;
    if (rad > R) llo = mid;
    else lhi = mid;
  }
  res.lambda = lam;
  res.achieved_R = prob.radius(lam);
  res.d = prob.distance(lam);
  res.saturated = res.d < 1e-12 * tnorm;
  return res;
}

/// Problem behind d^nu_kappa(R) = inf_{||xi||<=R} ||(A*A)^nu (x - (A*A)^kappa xi)||.
inline ConstrainedLsq distance_problem(const SingularSystem& op,
                                       const CoefVector& x_true, double nu,
                                       double kappa) {
  if (!(nu >= 0.0)) throw InvalidParameter("nu must be >= 0");
  if (!(kappa > 0.0)) throw InvalidParameter("kappa must be positive");
  require_finite(x_true, "x_true");
  const CoefVector xv = op.to_v(x_true);
  const CoefVector& s = op.sigmas();
  ConstrainedLsq prob;
  prob.g.resize(xv.size());
  prob.b.resize(xv.size());
  for (Index i = 0; i < xv.size(); ++i) {
    prob.b(i) = spectral_power(s(i), 2.0 * nu) * xv(i);
    prob.g(i) = spectral_power(s(i), 2.0 * (nu + kappa));
  }
  // (A*A)^nu annihilates N(A) only for nu > 0.
  prob.fixed = nu == 0.0 ? op.domain_complement(x_true).norm() : 0.0;
  return prob;
}

/// Problem behind d_eps(R) = inf_{||xi||<=R} ||eps - A (A*A)^kappa xi||.
inline ConstrainedLsq noise_problem(const SingularSystem& op,
                                    const CoefVector& eps, double kappa) {
  if (!(kappa >= 0.0)) throw InvalidParameter("kappa must be >= 0");
  require_finite(eps, "noise");
  ConstrainedLsq prob;
  prob.b = op.to_u(eps);
  const CoefVector& s = op.sigmas();
  prob.g.resize(s.size());
  for (Index i = 0; i < s.size(); ++i) prob.g(i) = spectral_power(s(i), 2.0 * kappa + 1.0);
  prob.fixed = op.data_complement(eps).norm();
  return prob;
}

inline DistanceResult distance_value(const SingularSystem& op,
                                     const CoefVector& x_true, double nu,
                                     double kappa, double R) {
  return solve_constrained(distance_problem(op, x_true, nu, kappa), R);
}

/// v-coefficients of the minimizing source element at budget R.
inline CoefVector source_minimizer(const SingularSystem& op,
                                   const CoefVector& x_true, double nu,
                                   double kappa, double R) {
  const auto prob = distance_problem(op, x_true, nu, kappa);
  return prob.minimizer(solve_constrained(prob, R).lambda);
}

inline double noise_distance(const SingularSystem& op, const CoefVector& eps,
                             double kappa, double R) {
  if (!(eps.norm() > 0.0)) throw InvalidInput("noise vector is zero");
  return solve_constrained(noise_problem(op, eps, kappa), R).d;
}

enum class Regime { ill_posed, intermediate, transition, floor };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::ill_posed: return "ill_posed";
    case Regime::intermediate: return "intermediate";
    case Regime::transition: return "transition";
    case Regime::floor: return "floor";
  }
  return "?";
}

struct DistancePoint {
  double R = 0.0;
  double d = 0.0;
  double lambda = 0.0;
  bool saturated = false;
  bool valid = true;
  Regime regime = Regime::ill_posed;
};

struct DistanceCurve {
  double nu = 0.0;
  double kappa = 0.5;
  double R_star = 0.0;       // norm of the exact preimage, infinite-looking if huge
  double target_norm = 0.0;  // ||(A*A)^nu x||
  std::vector<DistancePoint> points;
};

inline Regime classify_regime(double R, double R_star, bool saturated) {
  if (saturated || R >= R_star) return Regime::floor;
  if (R < R_star / 10.0) return Regime::ill_posed;
  if (R <= R_star / 2.0) return Regime::intermediate;
  return Regime::transition;
}

inline DistanceCurve curve_from_problem(const ConstrainedLsq& prob, double nu,
                                        double kappa,
                                        const std::vector<double>& R_grid) {
  if (R_grid.empty()) throw InvalidParameter("R grid is empty");
  for (std::size_t i = 0; i < R_grid.size(); ++i) {
    if (!(R_grid[i] > 0.0) || (i > 0 && !(R_grid[i] > R_grid[i - 1]))) {
      throw InvalidParameter("R grid must be positive and strictly increasing");
    }
  }
  DistanceCurve c;
  c.nu = nu;
  c.kappa = kappa;
  c.R_star = prob.sup_radius();
  c.target_norm = prob.target_norm();
  c.points.reserve(R_grid.size());
  for (double R : R_grid) {
    DistancePoint pt;
    pt.R = R;
    try {
      const auto r = solve_constrained(prob, R);
      pt.d = r.d;
      pt.lambda = r.lambda;
      pt.saturated = r.saturated;
    } catch (const NumericError&) {
      pt.valid = false;
    }
    pt.regime = classify_regime(R, c.R_star, pt.saturated);
    c.points.push_back(pt);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& pt : c.points) {
    if (!pt.valid) continue;
    if (pt.d > prev * (1.0 + 1e-9) + 1e-300) {
      throw NumericError("distance curve is not non-increasing in R");
    }
    prev = pt.d;
  }
  return c;
}

inline DistanceCurve distance_curve(const SingularSystem& op,
                                    const CoefVector& x_true, double nu,
                                    double kappa,
                                    const std::vector<double>& R_grid) {
  return curve_from_problem(distance_problem(op, x_true, nu, kappa), nu, kappa,
                            R_grid);
}

struct ExponentSet {
  double distance_exponent = 0.0;       // (mu+nu)/(mu-kappa)
  double rate_exponent = 0.0;           // mu/(mu+1/2)
  double source_growth_exponent = 0.0;  // mu-kappa
  double apriori_exponent = 0.0;        // alpha ~ delta^this
  double mu = 0.0;
  double kappa = 0.0;
};

inline ExponentSet theoretical_exponents(double mu, double nu, double kappa,
                                         const Method& method) {
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  if (!(nu >= 0.0)) throw DomainError("nu must be >= 0");
  ExponentSet e;
  double apriori = 0.0;
  if (const auto* h = std::get_if<HilbertScale>(&method)) {
    if (!(h->a > 0.0) || !(h->p > 0.0) || !(h->s >= 0.0)) {
      throw DomainError("Hilbert scale needs a > 0, p > 0, s >= 0");
    }
    kappa = h->s / h->a + 0.5;
    mu = h->p / (2.0 * h->a);
    apriori = 2.0 * (h->s + h->a) / (h->a + h->p);
  } else if (const auto* ho = std::get_if<HighOrder>(&method)) {
    apriori = (2.0 * ho->order + 2.0) / (2.0 * mu + 1.0);
  } else {
    apriori = 2.0 / (2.0 * mu + 1.0);
  }
  if (!(mu < kappa)) throw DomainError("distance exponent requires mu < kappa");
  e.mu = mu;
  e.kappa = kappa;
  e.distance_exponent = (mu + nu) / (mu - kappa);
  e.rate_exponent = mu / (mu + 0.5);
  e.source_growth_exponent = mu - kappa;
  e.apriori_exponent = apriori;
  return e;
}

/// R with d(R) = d_target, log-log linear between bracketing curve points.
inline double inverse_distance(const DistanceCurve& curve, double d_target) {
  if (!(d_target > 0.0)) throw OutOfRange("target distance must be positive");
  std::vector<const DistancePoint*> pts;
  for (const auto& p : curve.points) {
    if (p.valid && !p.saturated && p.d > 0.0) pts.push_back(&p);
  }
  if (pts.empty()) throw OutOfRange("curve has no usable points");
  if (d_target > pts.front()->d || d_target < pts.back()->d) {
    std::ostringstream os;
    os << "target " << d_target << " outside curve range [" << pts.back()->d
       << ", " << pts.front()->d << "]";
    throw OutOfRange(os.str());
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i]->d == d_target) return pts[i]->R;
    if (i + 1 < pts.size() && pts[i]->d > d_target && d_target > pts[i + 1]->d) {
      const double x0 = std::log(pts[i]->R), x1 = std::log(pts[i + 1]->R);
      const double y0 = std::log(pts[i]->d), y1 = std::log(pts[i + 1]->d);
      const double t = (std::log(d_target) - y0) / (y1 - y0);
      return std::exp(x0 + t * (x1 - x0));
    }
  }
  return pts.back()->R;
}

}  // namespace asclab
