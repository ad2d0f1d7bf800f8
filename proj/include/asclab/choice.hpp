#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asclab/errors.hpp"
#include "asclab/method.hpp"
#include "asclab/regularizers.hpp"

namespace asclab {

enum class Rule { apriori, discrepancy, oracle };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::apriori: return "apriori";
    case Rule::discrepancy: return "discrepancy";
    case Rule::oracle: return "oracle";
  }
  return "?";
}

struct ChoiceResult {
  double alpha = 0.0;
  Rule rule = Rule::apriori;
  std::optional<double> tau;
  std::map<std::string, double> diagnostics;
};

using Solver = std::function<RegularizedSolution(double)>;

inline Solver tikhonov_solver(const InverseProblem& p, const CoefVector& data,
                              int kappa_order = 0) {
  return [&p, data, kappa_order](double a) { return tikhonov(p, data, a, kappa_order); };
}

inline Solver hilbert_solver(const InverseProblem& p, const CoefVector& data,
                             double s) {
  return [&p, data, s](double a) { return tikhonov_hilbert_scale(p, data, a, s); };
}

inline Solver solver_for(const InverseProblem& p, const CoefVector& data,
                         const Method& m) {
  if (const auto* h = std::get_if<HilbertScale>(&m)) return hilbert_solver(p, data, h->s);
  if (const auto* ho = std::get_if<HighOrder>(&m)) return tikhonov_solver(p, data, ho->order);
  return tikhonov_solver(p, data, 0);
}

inline ChoiceResult alpha_apriori(double delta_abs, double mu,
                                  const Method& method, double c = 1.0) {
  if (!(delta_abs > 0.0)) throw InvalidParameter("delta must be positive");
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  double expo = 0.0;
  if (const auto* h = std::get_if<HilbertScale>(&method)) {
    if (!(h->p <= 2.0 * h->s + h->a)) throw DomainError("requires p <= 2s + a");
    expo = 2.0 * (h->s + h->a) / (h->a + h->p);
  } else {
    if (!(mu > 0.0)) throw DomainError("requires mu > 0");
    if (const auto* ho = std::get_if<HighOrder>(&method)) {
      if (!(mu < ho->order + 1.0)) throw DomainError("requires mu < kappa + 1");
      expo = (2.0 * ho->order + 2.0) / (2.0 * mu + 1.0);
    } else {
      if (!(mu <= 1.0)) throw DomainError("requires 0 < mu <= 1");
      expo = 2.0 / (2.0 * mu + 1.0);
    }
  }
  ChoiceResult r;
  r.alpha = c * std::pow(delta_abs, expo);
  r.rule = Rule::apriori;
  r.diagnostics["exponent"] = expo;
  return r;
}

struct AlphaInterval {
  double lo = 1e-16;
  double hi = 1e2;
};

/// Largest alpha in the interval with ||A x_alpha - y^delta|| <= tau delta.
inline ChoiceResult alpha_discrepancy(const Solver& solve, double delta_abs,
                                      double tau = 1.5, AlphaInterval iv = {},
                                      double rel_tol = 1e-3) {
  if (delta_abs == 0.0) {
    throw UnsupportedMode(
        "discrepancy principle is undefined for noise-free data (delta = 0)");
  }
  if (!(delta_abs > 0.0)) throw InvalidParameter("delta must be positive");
  if (!(tau > 1.0)) throw InvalidParameter("tau must exceed 1");
  if (!(iv.lo > 0.0) || !(iv.hi > iv.lo)) throw InvalidParameter("bad alpha interval");
  const double level = tau * delta_abs;

  ChoiceResult out;
  out.rule = Rule::discrepancy;
  out.tau = tau;
  auto finish = [&](double a, const RegularizedSolution& s) {
    out.alpha = a;
    out.diagnostics["residual"] = s.residual_norm;
    if (s.error_norm) out.diagnostics["error"] = *s.error_norm;
    out.diagnostics["level"] = level;
    return out;
  };

  const auto at_hi = solve(iv.hi);
  if (at_hi.residual_norm <= level) return finish(iv.hi, at_hi);
  auto at_lo = solve(iv.lo);
  if (at_lo.residual_norm > level) {
    std::ostringstream os;
    os << "no discrepancy crossing: residual " << at_lo.residual_norm
       << " at alpha=" << iv.lo << " exceeds tau*delta=" << level;
    throw NoSolution(os.str());
  }
  double llo = std::log(iv.lo), lhi = std::log(iv.hi);
  const double stop = std::log1p(rel_tol);
  while (lhi - llo > stop) {
    const double mid = 0.5 * (llo + lhi);
    auto s = solve(std::exp(mid));
    if (s.residual_norm <= level) {
      llo = mid;
      at_lo = std::move(s);
    } else {
      lhi = mid;
    }
  }
  return finish(std::exp(llo), at_lo);
}

/// Grid alpha minimizing the error; ties go to the larger alpha.
inline ChoiceResult alpha_oracle(const Solver& solve,
                                 const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidParameter("alpha grid is empty");
  ChoiceResult out;
  out.rule = Rule::oracle;
  double best = std::numeric_limits<double>::infinity();
  for (double a : grid) {
    const auto s = solve(a);
    if (!s.error_norm) throw ConfigurationError("oracle choice needs a known solution");
    const double e = *s.error_norm;
    if (e < best || (e == best && a > out.alpha)) {
      best = e;
      out.alpha = a;
      out.diagnostics["error"] = e;
      out.diagnostics["residual"] = s.residual_norm;
    }
  }
  return out;
}

inline std::vector<double> logspace(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw InvalidParameter("bad logspace");
  std::vector<double> v(static_cast<std::size_t>(count));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] =
        count == 1 ? lo : std::pow(10.0, a + (b - a) * i / (count - 1));
  }
  return v;
}

}  // namespace asclab
