#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "asclab/asc.hpp"
#include "asclab/choice.hpp"
#include "asclab/dataset.hpp"
#include "asclab/parallel.hpp"
#include "asclab/params.hpp"
#include "asclab/problems.hpp"
#include "asclab/rate_fit.hpp"
#include "asclab/regularizers.hpp"

namespace asclab {

using Config = std::map<std::string, std::string>;

// ---------------------------------------------------------------------------
// shared helpers

inline double geometric_mean(const std::vector<double>& v) {
  if (v.empty()) throw InvalidParameter("geometric mean of empty set");
  double acc = 0.0;
  for (double x : v) {
    if (!(x > 0.0)) throw DomainError("geometric mean needs positive values");
    acc += std::log(x);
  }
  return std::exp(acc / static_cast<double>(v.size()));
}

inline std::vector<Point> zip_points(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  std::vector<Point> p;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) p.emplace_back(x[i], y[i]);
  return p;
}

// Max of ||A* xi - x|| / ||x|| over every Tikhonov solution an experiment
// produced; reported as a metric so the range invariant is checked everywhere.
struct RangeCheck {
  double worst = 0.0;
  void see(const RegularizedSolution& s) {
    if (s.representation_residual) worst = std::max(worst, *s.representation_residual);
  }
  void merge(const RangeCheck& o) { worst = std::max(worst, o.worst); }
};

inline Solver tracked(Solver inner, RangeCheck& rc) {
  return [inner = std::move(inner), &rc](double a) {
    auto s = inner(a);
    rc.see(s);
    return s;
  };
}

/// Log-log piecewise linear interpolation of a curve sorted by x.
inline double interp_loglog(const std::vector<Point>& curve, double x) {
  if (curve.empty()) throw InvalidParameter("empty curve");
  if (x <= curve.front().first) return curve.front().second;
  if (x >= curve.back().first) return curve.back().second;
  auto it = std::lower_bound(curve.begin(), curve.end(), x,
                             [](const Point& p, double v) { return p.first < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  if (b.first == x) return b.second;
  const double t = (std::log(x) - std::log(a.first)) / (std::log(b.first) - std::log(a.first));
  return std::exp(std::log(a.second) + t * (std::log(b.second) - std::log(a.second)));
}

/// sup relative deviation between two curves y(x) on their common x range,
/// checked at the sample points of both.
inline double sup_relative_deviation(std::vector<Point> a, std::vector<Point> b) {
  auto clean = [](std::vector<Point>& c) {
    std::erase_if(c, [](const Point& p) { return !(p.first > 0.0) || !(p.second > 0.0); });
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end(),
                        [](const Point& p, const Point& q) { return p.first == q.first; }),
            c.end());
  };
  clean(a);
  clean(b);
  if (a.size() < 2 || b.size() < 2) throw InvalidParameter("curves too short to compare");
  const double lo = std::max(a.front().first, b.front().first);
  const double hi = std::min(a.back().first, b.back().first);
  if (!(lo < hi)) throw NoSolution("curves do not overlap");
  double worst = 0.0;
  auto scan = [&](const std::vector<Point>& from, const std::vector<Point>& other) {
    for (const auto& p : from) {
      if (p.first < lo || p.first > hi) continue;
      const double ref = interp_loglog(other, p.first);
      worst = std::max(worst, std::abs(p.second - ref) / ref);
    }
  };
  scan(a, b);
  scan(b, a);
  return worst;
}

inline std::string tag(double v) { return format_short(v); }

// ---------------------------------------------------------------------------
// saturation probe

struct SaturationProbe {
  Dataset data;
  double residual_ratio = 0.0;  // max/min of residual/alpha over the grid
  double error_ratio = 0.0;     // max/min of error/alpha
};

inline SaturationProbe saturation_probe(const InverseProblem& problem,
                                        const std::vector<double>& alpha_grid,
                                        const std::string& name = "saturation_probe",
                                        RangeCheck* rc = nullptr) {
  SaturationProbe out;
  out.data = Dataset(name, {"alpha", "residual", "error", "residual_over_alpha",
                            "error_over_alpha"});
  double rmin = INFINITY, rmax = 0, emin = INFINITY, emax = 0;
  for (double a : alpha_grid) {
    const auto s = tikhonov(problem, problem.y_exact, a, 0);
    if (rc) rc->see(s);
    const double ro = s.residual_norm / a, eo = *s.error_norm / a;
    rmin = std::min(rmin, ro);
    rmax = std::max(rmax, ro);
    emin = std::min(emin, eo);
    emax = std::max(emax, eo);
    out.data.add_row({a, s.residual_norm, *s.error_norm, ro, eo});
  }
  out.residual_ratio = rmax / rmin;
  out.error_ratio = emax / emin;
  return out;
}

// ---------------------------------------------------------------------------
// experiment registry

struct ExperimentContext {
  Params params;
  std::uint64_t seed;
  int jobs;
};

struct ExperimentDef {
  std::string id;
  std::vector<ParamSpec> specs;
  std::function<ExperimentReport(const ExperimentContext&)> run;
};

namespace experiments {

using K = ParamKind;

inline std::vector<ParamSpec> delta_sweep_specs() {
  return {{"delta_max", K::real, "1e-2", "largest relative noise level"},
          {"delta_min", K::real, "1e-5", "smallest relative noise level"},
          {"delta_count", K::integer, "7", "log-spaced noise levels"},
          {"seeds", K::integer, "5", "noise realizations per level"},
          {"tau", K::real, "1.5", "discrepancy safety factor"},
          {"alpha_lo", K::real, "1e-16", "discrepancy search lower bound"},
          {"alpha_hi", K::real, "1e2", "discrepancy search upper bound"}};
}

inline std::vector<double> delta_sweep(const Params& p) {
  const auto cnt = p.integer("delta_count");
  if (cnt < 3) throw ConfigurationError("delta_count must be >= 3");
  if (p.integer("seeds") < 1) throw ConfigurationError("seeds must be >= 1");
  return logspace(p.real("delta_min"), p.real("delta_max"), static_cast<int>(cnt));
}

inline void require_positive_int(const Params& p, const std::string& k, long min = 1) {
  if (p.integer(k) < min) {
    throw ConfigurationError("parameter " + k + " must be >= " + std::to_string(min));
  }
}

// -- boundary_effect --------------------------------------------------------

inline ExperimentReport boundary_effect(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "n", 4);
  require_positive_int(P, "alpha_count");
  const auto deltas = P.list("deltas");
  const auto fixed_alphas = P.list("fixed_alphas");
  const auto grid = logspace(P.real("alpha_min"), P.real("alpha_max"),
                             static_cast<int>(P.integer("alpha_count")));
  const auto sol = P.text("solution") == "linear_t" ? Deriv2Solution::linear_t
                                                    : Deriv2Solution::constant_one;
  const auto prob = make_deriv2(static_cast<int>(P.integer("n")), sol, P.flag("normalize"));

  struct Case {
    RegularizedSolution s;
    double alpha = 0, delta = 0;
    RangeCheck rc;
  };
  std::vector<Case> cases(deltas.size() + fixed_alphas.size());
  parallel_for(cases.size(), ctx.jobs, [&](std::size_t i) {
    Case& c = cases[i];
    if (i < deltas.size()) {
      c.delta = deltas[i];
      const auto noisy = add_noise(prob, c.delta, ctx.seed + i);
      const auto ch = alpha_oracle(tracked(tikhonov_solver(prob, noisy.y_delta), c.rc), grid);
      c.alpha = ch.alpha;
      c.s = tikhonov(prob, noisy.y_delta, c.alpha);
    } else {
      c.delta = P.real("fixed_delta");
      c.alpha = fixed_alphas[i - deltas.size()];
      const auto noisy = add_noise(prob, c.delta, ctx.seed + deltas.size());
      c.s = tikhonov(prob, noisy.y_delta, c.alpha);
    }
    c.rc.see(c.s);
  });

  ExperimentReport r;
  std::vector<std::string> cols{"t", "x_true"};
  for (double d : deltas) cols.push_back("x_rec_delta_" + tag(d));
  for (double a : fixed_alphas) cols.push_back("x_rec_alpha_" + tag(a));
  Dataset curves("boundary_effect", cols);
  for (Index k = 0; k < prob.grid.size(); ++k) {
    std::vector<Cell> row{prob.grid(k), prob.x_true(k)};
    for (const auto& c : cases) row.emplace_back(c.s.x(k));
    curves.add_row(std::move(row));
  }
  Dataset summary("boundary_oracle", {"delta", "alpha", "error", "residual",
                                      "ratio_left", "ratio_right", "rule"});
  RangeCheck rc;
  double worst = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    rc.merge(c.rc);
    const double mx = c.s.x.cwiseAbs().maxCoeff();
    const double left = std::abs(c.s.x(0)) / mx;
    const double right = std::abs(c.s.x(c.s.x.size() - 1)) / mx;
    const bool oracle = i < deltas.size();
    summary.add_row({c.delta, c.alpha, *c.s.error_norm, c.s.residual_norm, left, right,
                     std::string(oracle ? "oracle" : "fixed")});
    if (oracle) {
      r.metrics["boundary_ratio_delta_" + tag(c.delta)] = std::max(left, right);
      worst = std::max(worst, std::max(left, right));
    }
  }
  r.metrics["max_boundary_ratio"] = worst;
  r.metrics["range_rep_max_rel"] = rc.worst;
  r.datasets = {std::move(curves), std::move(summary)};
  return r;
}

// -- asc_curves -------------------------------------------------------------

inline Dataset curve_dataset(const std::string& name, const DistanceCurve& c) {
  Dataset d(name, {"R", "d", "lambda", "regime_flag", "saturated"});
  for (const auto& p : c.points) {
    if (!p.valid) continue;
    d.add_row({p.R, p.d, p.lambda, std::string(regime_name(p.regime)),
               p.saturated ? 1.0 : 0.0});
  }
  return d;
}

inline std::vector<Point> curve_points(const DistanceCurve& c, bool skip_saturated = true) {
  std::vector<Point> pts;
  for (const auto& p : c.points)
    if (p.valid && !(skip_saturated && p.saturated) && p.d > 0.0) pts.emplace_back(p.R, p.d);
  return pts;
}

inline ExperimentReport asc_curves(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "n");
  require_positive_int(P, "R_count", 3);
  require_positive_int(P, "noise_seeds");
  require_positive_int(P, "noise_R_count", 3);
  const int n = static_cast<int>(P.integer("n"));
  const double kappa = P.real("kappa");
  const double lo = P.real("fit_lo"), hi = P.real("fit_hi"), trim = P.real("trim");
  const auto R = logspace(P.real("R_min"), P.real("R_max"), static_cast<int>(P.integer("R_count")));
  const auto plain = make_diagonal_model(n, P.real("eta"), P.real("beta"), 0);
  const auto ones = make_diagonal_model(n, P.real("eta"), P.real("beta"),
                                        static_cast<int>(P.integer("leading_ones")));
  const double mu = *plain.mu_nominal;

  struct Job {
    const InverseProblem* prob;
    double nu;
    std::string name;
    DistanceCurve curve;
  };
  std::vector<Job> jobs{{&plain, 0.0, "asc_plain_nu0", {}},
                        {&ones, 0.0, "asc_ones_nu0", {}},
                        {&plain, 0.5, "asc_plain_nu0.5", {}},
                        {&ones, 0.5, "asc_ones_nu0.5", {}}};
  parallel_for(jobs.size(), ctx.jobs, [&](std::size_t i) {
    jobs[i].curve = distance_curve(jobs[i].prob->op, jobs[i].prob->x_true, jobs[i].nu, kappa, R);
  });

  ExperimentReport r;
  for (const auto& j : jobs) {
    r.datasets.push_back(curve_dataset(j.name, j.curve));
    const auto pts = select_window(curve_points(j.curve), lo, hi, trim);
    r.fits["slope_" + j.name.substr(4)] = fit_rate(pts);
    r.metrics["theory_slope_" + j.name.substr(4)] =
        theoretical_exponents(mu, j.nu, kappa, Classical{}).distance_exponent;
  }
  // Pointwise difference between the two models at small R.
  double maxdiff = 0.0;
  for (std::size_t k = 0; k < R.size(); ++k) {
    if (R[k] >= 1.0) break;
    const double a = jobs[0].curve.points[k].d, b = jobs[1].curve.points[k].d;
    maxdiff = std::max(maxdiff, std::abs(a - b) / a);
  }
  r.metrics["ones_vs_plain_max_rel_diff_small_R"] = maxdiff;

  // Two-ASC composition: for the minimizer xi at each R, compare
  // ||x - A* xi|| with ||Ax - AA* xi||.
  {
    const auto prob = distance_problem(plain.op, plain.x_true, 0.0, 0.5);
    const CoefVector& s = plain.op.sigmas();
    const CoefVector xv = plain.op.to_v(plain.x_true);
    Dataset comp("asc_composition", {"R", "d", "residual_distance", "lambda"});
    std::vector<Point> pts;
    for (double Rk : R) {
      const auto res = solve_constrained(prob, Rk);
      if (res.saturated) continue;
      const CoefVector xi = prob.minimizer(res.lambda);
      const CoefVector diff = xv - s.cwiseProduct(xi);
      const double d1 = diff.norm();
      const double d2 = s.cwiseProduct(diff).norm();
      comp.add_row({Rk, d1, d2, res.lambda});
      if (Rk >= lo && Rk <= hi) pts.emplace_back(d2, d1);
    }
    std::sort(pts.begin(), pts.end());
    r.fits["composition"] = fit_rate(select_window(pts, 0.0, INFINITY, trim));
    r.metrics["theory_composition"] = mu / (mu + 0.5);
    r.datasets.push_back(std::move(comp));
  }

  // Noise ASC bound d_eps(R) <= delta.
  {
    const auto Rn = logspace(P.real("R_min"), P.real("R_max"),
                             static_cast<int>(P.integer("noise_R_count")));
    const double dl = P.real("noise_delta");
    const auto seeds = static_cast<std::size_t>(P.integer("noise_seeds"));
    std::vector<std::pair<double, DistanceCurve>> curves(seeds);
    parallel_for(seeds, ctx.jobs, [&](std::size_t j) {
      const auto noisy = add_noise(plain, dl, ctx.seed + j);
      const CoefVector eps = noisy.y_delta - plain.y_exact;
      curves[j] = {noisy.delta_abs,
                   curve_from_problem(noise_problem(plain.op, eps, P.real("noise_kappa")), 0.0,
                                      P.real("noise_kappa"), Rn)};
    });
    Dataset nd("noise_asc", {"seed", "R", "d", "lambda", "regime_flag", "delta_abs"});
    double worst = 0.0;
    for (std::size_t j = 0; j < seeds; ++j) {
      const auto& [dabs, c] = curves[j];
      for (const auto& p : c.points) {
        if (!p.valid) continue;
        nd.add_row({static_cast<double>(ctx.seed + j), p.R, p.d, p.lambda,
                    std::string(regime_name(p.regime)), dabs});
        worst = std::max(worst, p.d / dabs);
      }
    }
    r.metrics["noise_max_ratio"] = worst;
    r.datasets.push_back(std::move(nd));
  }
  r.metrics["range_rep_max_rel"] = 0.0;  // no Tikhonov solutions in this study
  return r;
}

// -- discrete_asc -----------------------------------------------------------

inline ExperimentReport discrete_asc(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "R_count", 3);
  const auto levels = P.list("levels");
  const long dn = P.integer("deriv2_n");
  if (dn != 0 && dn < 4) throw ConfigurationError("deriv2_n must be 0 or >= 4");
  for (double l : levels) {
    if (!(l >= 1.0) || l != std::floor(l)) throw ConfigurationError("levels must be positive integers");
  }

  struct Job {
    InverseProblem prob;
    std::string suffix;
    DistanceCurve curve;
  };
  std::vector<Job> jobs;
  for (double l : levels) {
    jobs.push_back({make_diagonal_model(static_cast<int>(l), P.real("eta"), P.real("beta"), 0),
                    "n" + tag(l), {}});
  }
  if (dn > 0) {
    const auto sol = P.text("deriv2_solution") == "linear_t" ? Deriv2Solution::linear_t
                                                             : Deriv2Solution::constant_one;
    jobs.push_back({make_deriv2(static_cast<int>(dn), sol, false), "deriv2_n" + std::to_string(dn), {}});
  }
  const double kappa = P.real("kappa"), nu = P.real("nu");
  parallel_for(jobs.size(), ctx.jobs, [&](std::size_t i) {
    auto& j = jobs[i];
    const auto prob = distance_problem(j.prob.op, j.prob.x_true, nu, kappa);
    const double rs = prob.sup_radius();
    const auto grid = logspace(P.real("R_min"), P.real("R_max_factor") * rs,
                               static_cast<int>(P.integer("R_count")));
    j.curve = curve_from_problem(prob, nu, kappa, grid);
  });

  ExperimentReport r;
  for (const auto& j : jobs) {
    r.datasets.push_back(curve_dataset("discrete_asc_" + j.suffix, j.curve));
    std::vector<Point> inter, ill;
    double floor_rel = 0.0;
    bool any_floor = false;
    for (const auto& p : j.curve.points) {
      if (!p.valid) continue;
      if (p.regime == Regime::intermediate && p.d > 0) inter.emplace_back(p.R, p.d);
      if (p.regime == Regime::ill_posed && p.d > 0) ill.emplace_back(p.R, p.d);
      if (p.R >= j.curve.R_star) {
        any_floor = true;
        floor_rel = std::max(floor_rel, p.d / j.curve.target_norm);
      }
    }
    r.metrics["R_star_" + j.suffix] = j.curve.R_star;
    r.metrics["intermediate_points_" + j.suffix] = static_cast<double>(inter.size());
    if (inter.size() >= 3) r.fits["intermediate_slope_" + j.suffix] = fit_rate(inter);
    if (ill.size() >= 3) {
      // Asymptotic part only: the last decade before R*/10.
      r.fits["illposed_slope_" + j.suffix] =
          fit_rate(select_window(ill, j.curve.R_star / 100.0, j.curve.R_star / 10.0));
    }
    if (any_floor) r.metrics["floor_rel_" + j.suffix] = floor_rel;
  }
  r.metrics["range_rep_max_rel"] = 0.0;
  return r;
}

// -- source_growth ----------------------------------------------------------

inline ExperimentReport source_growth(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "n");
  require_positive_int(P, "alpha_count", 3);
  const auto prob = make_diagonal_model(static_cast<int>(P.integer("n")), P.real("eta"),
                                        P.real("beta"), static_cast<int>(P.integer("leading_ones")));
  const auto grid = logspace(P.real("alpha_min"), P.real("alpha_max"),
                             static_cast<int>(P.integer("alpha_count")));
  std::vector<RegularizedSolution> sols(grid.size());
  parallel_for(grid.size(), ctx.jobs,
               [&](std::size_t i) { sols[i] = tikhonov(prob, prob.y_exact, grid[i]); });

  ExperimentReport r;
  RangeCheck rc;
  Dataset d("source_growth", {"alpha", "xi_norm", "residual", "error"});
  std::vector<Point> xi, err, res;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& s = sols[i];
    rc.see(s);
    d.add_row({grid[i], *s.source_norm_half, s.residual_norm, *s.error_norm});
    xi.emplace_back(grid[i], *s.source_norm_half);
    err.emplace_back(grid[i], *s.error_norm);
    res.emplace_back(grid[i], s.residual_norm);
  }
  const double smin2 = std::pow(prob.op.sigma_min(), 2);
  const double pre_lo = P.real("pre_lo_factor") * smin2, pre_hi = P.real("pre_hi");
  const double plateau_hi = P.real("plateau_factor") * smin2;
  r.fits["pre_saturation"] = fit_rate(select_window(xi, pre_lo, pre_hi));
  r.fits["plateau"] = fit_rate(select_window(xi, 0.0, plateau_hi));
  r.fits["error_rate"] = fit_rate(select_window(err, pre_lo, pre_hi));
  r.fits["residual_rate"] = fit_rate(select_window(res, pre_lo, pre_hi));
  const double mu = *prob.mu_nominal;
  r.metrics["theory_pre_saturation"] = mu - 0.5;
  r.metrics["theory_error_rate"] = mu;
  r.metrics["theory_residual_rate"] = mu + 0.5;
  r.metrics["sigma_min_sq"] = smin2;
  r.metrics["range_rep_max_rel"] = rc.worst;
  r.datasets.push_back(std::move(d));
  return r;
}

// -- rate_table ------------------------------------------------------------

inline ExperimentReport rate_table(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "n");
  const auto deltas = delta_sweep(P);
  const auto seeds = static_cast<std::size_t>(P.integer("seeds"));
  const auto prob = make_diagonal_model(static_cast<int>(P.integer("n")), P.real("eta"),
                                        P.real("beta"), 0);
  const double mu = *prob.mu_nominal, tau = P.real("tau"), c = P.real("c");
  const AlphaInterval iv{P.real("alpha_lo"), P.real("alpha_hi")};
  alpha_apriori(1.0, mu, Classical{}, c);  // admissibility before computing

  struct Cell2 {
    double ap_alpha, ap_err, ap_res, dp_alpha, dp_err, dp_res, dabs;
    RangeCheck rc;
  };
  std::vector<Cell2> cells(deltas.size() * seeds);
  parallel_for(cells.size(), ctx.jobs, [&](std::size_t idx) {
    const std::size_t i = idx / seeds, j = idx % seeds;
    auto& cl = cells[idx];
    const auto noisy = add_noise(prob, deltas[i], ctx.seed + j);
    cl.dabs = noisy.delta_abs;
    cl.ap_alpha = alpha_apriori(noisy.delta_abs, mu, Classical{}, c).alpha;
    const auto sa = tikhonov(prob, noisy.y_delta, cl.ap_alpha);
    cl.rc.see(sa);
    cl.ap_err = *sa.error_norm;
    cl.ap_res = sa.residual_norm;
    const auto ch = alpha_discrepancy(tracked(tikhonov_solver(prob, noisy.y_delta), cl.rc),
                                      noisy.delta_abs, tau, iv);
    const auto sd = tikhonov(prob, noisy.y_delta, ch.alpha);
    cl.dp_alpha = ch.alpha;
    cl.dp_err = *sd.error_norm;
    cl.dp_res = sd.residual_norm;
  });

  ExperimentReport r;
  RangeCheck rc;
  Dataset d("rate_table", {"delta", "alpha", "error", "residual", "rule", "seed", "delta_abs"});
  std::vector<double> ga_err, gd_err, ga_alpha, gd_alpha, bias;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    std::vector<double> ae, de, aa, da;
    for (std::size_t j = 0; j < seeds; ++j) {
      const auto& cl = cells[i * seeds + j];
      rc.merge(cl.rc);
      const double sd = static_cast<double>(ctx.seed + j);
      d.add_row({deltas[i], cl.ap_alpha, cl.ap_err, cl.ap_res, std::string("apriori"), sd, cl.dabs});
      d.add_row({deltas[i], cl.dp_alpha, cl.dp_err, cl.dp_res, std::string("discrepancy"), sd, cl.dabs});
      ae.push_back(cl.ap_err);
      de.push_back(cl.dp_err);
      aa.push_back(cl.ap_alpha);
      da.push_back(cl.dp_alpha);
    }
    // Noise-free reconstruction at the a-priori alpha: pure approximation error.
    const double dabs = deltas[i] * prob.y_exact.norm();
    const double a0 = alpha_apriori(dabs, mu, Classical{}, c).alpha;
    const auto s0 = tikhonov(prob, prob.y_exact, a0);
    rc.see(s0);
    d.add_row({deltas[i], a0, *s0.error_norm, s0.residual_norm, std::string("apriori_noise_free"),
               -1.0, dabs});
    bias.push_back(*s0.error_norm);
    ga_err.push_back(geometric_mean(ae));
    gd_err.push_back(geometric_mean(de));
    ga_alpha.push_back(geometric_mean(aa));
    gd_alpha.push_back(geometric_mean(da));
  }
  r.fits["error_apriori"] = fit_rate(zip_points(deltas, ga_err));
  r.fits["error_discrepancy"] = fit_rate(zip_points(deltas, gd_err));
  r.fits["alpha_apriori"] = fit_rate(zip_points(deltas, ga_alpha));
  r.fits["alpha_discrepancy"] = fit_rate(zip_points(deltas, gd_alpha));
  r.fits["bias_vs_delta"] = fit_rate(zip_points(deltas, bias));
  r.metrics["alpha_slope_gap"] =
      std::abs(r.fits["alpha_apriori"].slope - r.fits["alpha_discrepancy"].slope);
  r.metrics["theory_error_rate"] = 2.0 * mu / (2.0 * mu + 1.0);
  r.metrics["theory_alpha_rate"] = 2.0 / (2.0 * mu + 1.0);
  r.metrics["range_rep_max_rel"] = rc.worst;
  r.datasets.push_back(std::move(d));
  return r;
}

// -- high_order_saturation --------------------------------------------------

inline ExperimentReport high_order_saturation(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "n");
  require_positive_int(P, "kappa_order");
  require_positive_int(P, "probe_count", 3);
  const auto deltas = delta_sweep(P);
  const auto seeds = static_cast<std::size_t>(P.integer("seeds"));
  const auto mus = P.list("mus");
  const auto probe_mus = P.list("probe_mus");
  const int n = static_cast<int>(P.integer("n"));
  const double eta = P.real("eta"), tau = P.real("tau");
  const int kord = static_cast<int>(P.integer("kappa_order"));
  const AlphaInterval iv{P.real("alpha_lo"), P.real("alpha_hi")};
  std::vector<InverseProblem> probs;
  for (double mu : mus) probs.push_back(make_diagonal_model(n, eta, beta_for_mu(mu, eta), 0));

  struct Out {
    double alpha, err, res, dabs;
    RangeCheck rc;
  };
  const std::size_t per_mu = deltas.size() * seeds;
  std::vector<Out> outs(mus.size() * per_mu);
  parallel_for(outs.size(), ctx.jobs, [&](std::size_t idx) {
    const std::size_t m = idx / per_mu, rem = idx % per_mu;
    const std::size_t i = rem / seeds, j = rem % seeds;
    auto& o = outs[idx];
    const auto noisy = add_noise(probs[m], deltas[i], ctx.seed + j);
    o.dabs = noisy.delta_abs;
    const auto ch = alpha_discrepancy(tikhonov_solver(probs[m], noisy.y_delta, kord),
                                      noisy.delta_abs, tau, iv);
    const auto s = tikhonov(probs[m], noisy.y_delta, ch.alpha, kord);
    o.rc.see(s);
    o.alpha = ch.alpha;
    o.err = *s.error_norm;
    o.res = s.residual_norm;
  });

  ExperimentReport r;
  RangeCheck rc;
  Dataset d("high_order_saturation",
            {"mu", "delta", "alpha", "error", "residual", "rule", "seed", "delta_abs"});
  for (std::size_t m = 0; m < mus.size(); ++m) {
    std::vector<double> ge;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      std::vector<double> e;
      for (std::size_t j = 0; j < seeds; ++j) {
        const auto& o = outs[m * per_mu + i * seeds + j];
        rc.merge(o.rc);
        d.add_row({mus[m], deltas[i], o.alpha, o.err, o.res, std::string("discrepancy"),
                   static_cast<double>(ctx.seed + j), o.dabs});
        e.push_back(o.err);
      }
      ge.push_back(geometric_mean(e));
    }
    r.fits["rate_mu" + tag(mus[m])] = fit_rate(zip_points(deltas, ge));
    r.metrics["theory_mu" + tag(mus[m])] = 2.0 * mus[m] / (2.0 * mus[m] + 1.0);
  }
  r.datasets.push_back(std::move(d));

  const auto pgrid = logspace(P.real("probe_alpha_min"), P.real("probe_alpha_max"),
                              static_cast<int>(P.integer("probe_count")));
  for (double mu : probe_mus) {
    const auto prob = make_diagonal_model(n, eta, beta_for_mu(mu, eta), 0);
    auto pr = saturation_probe(prob, pgrid, "saturation_probe_mu" + tag(mu), &rc);
    r.metrics["probe_residual_ratio_mu" + tag(mu)] = pr.residual_ratio;
    r.metrics["probe_error_ratio_mu" + tag(mu)] = pr.error_ratio;
    r.datasets.push_back(std::move(pr.data));
  }
  r.metrics["range_rep_max_rel"] = rc.worst;
  return r;
}

// -- oversmoothing_rate -----------------------------------------------------

inline ExperimentReport oversmoothing_rate(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "n", 2);
  const auto deltas = delta_sweep(P);
  const auto seeds = static_cast<std::size_t>(P.integer("seeds"));
  const int n = static_cast<int>(P.integer("n"));
  const HilbertScale hs{P.real("a"), P.real("p"), P.real("s")};
  const double c = P.real("c"), tau = P.real("tau");
  const AlphaInterval iv{P.real("alpha_lo"), P.real("alpha_hi")};
  const auto prob = make_hilbert_scale_model(n, hs.a, hs.p, hs.s);
  alpha_apriori(1.0, 0.0, hs, c);

  struct Out {
    double ap_alpha, ap_err, ap_res, ap_snorm, dp_alpha, dp_err, dp_res, dabs;
    RangeCheck rc;
  };
  std::vector<Out> outs(deltas.size() * seeds);
  parallel_for(outs.size(), ctx.jobs, [&](std::size_t idx) {
    const std::size_t i = idx / seeds, j = idx % seeds;
    auto& o = outs[idx];
    const auto noisy = add_noise(prob, deltas[i], ctx.seed + j);
    o.dabs = noisy.delta_abs;
    o.ap_alpha = alpha_apriori(noisy.delta_abs, 0.0, hs, c).alpha;
    const auto sa = tikhonov_hilbert_scale(prob, noisy.y_delta, o.ap_alpha, hs.s);
    o.rc.see(sa);
    o.ap_err = *sa.error_norm;
    o.ap_res = sa.residual_norm;
    o.ap_snorm = hilbert_norm(prob, sa.x, hs.s);
    const auto ch = alpha_discrepancy(tracked(hilbert_solver(prob, noisy.y_delta, hs.s), o.rc),
                                      noisy.delta_abs, tau, iv);
    const auto sd = tikhonov_hilbert_scale(prob, noisy.y_delta, ch.alpha, hs.s);
    o.dp_alpha = ch.alpha;
    o.dp_err = *sd.error_norm;
    o.dp_res = sd.residual_norm;
  });

  ExperimentReport r;
  RangeCheck rc;
  Dataset d("oversmoothing_rate", {"delta", "alpha", "error", "residual", "rule", "seed",
                                   "delta_abs", "x_rec_s_norm"});
  std::vector<double> ga, gd, gda;
  double max_snorm = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    std::vector<double> ae, de, da;
    for (std::size_t j = 0; j < seeds; ++j) {
      const auto& o = outs[i * seeds + j];
      rc.merge(o.rc);
      const double sd = static_cast<double>(ctx.seed + j);
      d.add_row({deltas[i], o.ap_alpha, o.ap_err, o.ap_res, std::string("apriori"), sd, o.dabs,
                 o.ap_snorm});
      d.add_row({deltas[i], o.dp_alpha, o.dp_err, o.dp_res, std::string("discrepancy"), sd,
                 o.dabs, NAN});
      ae.push_back(o.ap_err);
      de.push_back(o.dp_err);
      da.push_back(o.dp_alpha);
      max_snorm = std::max(max_snorm, o.ap_snorm);
    }
    ga.push_back(geometric_mean(ae));
    gd.push_back(geometric_mean(de));
    gda.push_back(geometric_mean(da));
  }
  r.fits["error_apriori"] = fit_rate(zip_points(deltas, ga));
  r.fits["error_discrepancy"] = fit_rate(zip_points(deltas, gd));
  r.fits["alpha_discrepancy"] = fit_rate(zip_points(deltas, gda));
  r.metrics["theory_error_rate"] = hs.p / (hs.a + hs.p);
  r.metrics["theory_alpha_rate"] = 2.0 * (hs.s + hs.a) / (hs.a + hs.p);
  // ||x||_s of the exact solution over the full and half spectrum: growth
  // with n signals the oversmoothing regime.
  r.metrics["x_true_s_norm"] = hilbert_norm(prob, prob.x_true, hs.s);
  {
    CoefVector half = prob.x_true;
    half.tail(n - n / 2).setZero();
    r.metrics["x_true_s_norm_half"] = hilbert_norm(prob, half, hs.s);
  }
  r.metrics["max_x_rec_s_norm"] = max_snorm;
  r.metrics["range_rep_max_rel"] = rc.worst;
  r.datasets.push_back(std::move(d));
  return r;
}

// -- landweber_vs_tikhonov --------------------------------------------------

inline ExperimentReport landweber_vs_tikhonov(const ExperimentContext& ctx) {
  const auto& P = ctx.params;
  require_positive_int(P, "n");
  require_positive_int(P, "alpha_count", 2);
  require_positive_int(P, "k_max");
  const auto deltas = P.list("deltas");
  const auto prob = make_diagonal_model(static_cast<int>(P.integer("n")), P.real("eta"),
                                        P.real("beta"), 0);
  const double base = P.real("alpha_base");
  if (!(base > 0.0 && base < 1.0)) throw ConfigurationError("alpha_base must lie in (0,1)");
  LandweberOptions lo;
  lo.beta = P.real("lw_beta");
  lo.k_max = P.integer("k_max");
  lo.track_source = true;
  lo.checkpoints = geometric_checkpoints(lo.k_max, P.real("checkpoint_factor"));
  const auto count = static_cast<int>(P.integer("alpha_count"));

  struct Out {
    std::vector<RegularizedSolution> tik, lw;
    std::vector<double> alphas;
    RangeCheck rc;
  };
  std::vector<Out> outs(deltas.size());
  parallel_for(outs.size(), ctx.jobs, [&](std::size_t j) {
    auto& o = outs[j];
    const auto noisy = add_noise(prob, deltas[j], ctx.seed + j);
    for (int i = 1; i <= count; ++i) {
      const double a = std::pow(base, i);
      o.alphas.push_back(a);
      o.tik.push_back(tikhonov(prob, noisy.y_delta, a));
      o.rc.see(o.tik.back());
    }
    o.lw = landweber(prob, noisy.y_delta, lo);
  });

  ExperimentReport r;
  RangeCheck rc;
  double lw_rep = 0.0;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    const auto& o = outs[j];
    rc.merge(o.rc);
    Dataset d("landweber_vs_tikhonov_delta" + tag(deltas[j]),
              {"method", "w_norm", "error", "residual", "alpha_or_k"});
    std::vector<Point> te, tr, le, lr;
    for (std::size_t i = 0; i < o.tik.size(); ++i) {
      const auto& s = o.tik[i];
      d.add_row({std::string("tikhonov"), *s.source_norm_half, *s.error_norm, s.residual_norm,
                 o.alphas[i]});
      te.emplace_back(*s.source_norm_half, *s.error_norm);
      tr.emplace_back(*s.source_norm_half, s.residual_norm);
    }
    for (const auto& s : o.lw) {
      d.add_row({std::string("landweber"), *s.source_norm_half, *s.error_norm, s.residual_norm,
                 static_cast<double>(*s.iteration)});
      le.emplace_back(*s.source_norm_half, *s.error_norm);
      lr.emplace_back(*s.source_norm_half, s.residual_norm);
      if (s.representation_residual) lw_rep = std::max(lw_rep, *s.representation_residual);
    }
    r.metrics["error_dev_delta" + tag(deltas[j])] = sup_relative_deviation(te, le);
    r.metrics["residual_dev_delta" + tag(deltas[j])] = sup_relative_deviation(tr, lr);
    r.datasets.push_back(std::move(d));
  }
  r.metrics["landweber_representation_max_rel"] = lw_rep;
  r.metrics["range_rep_max_rel"] = rc.worst;
  return r;
}

}  // namespace experiments

inline const std::vector<ExperimentDef>& experiment_registry() {
  using experiments::K;
  static const std::vector<ExperimentDef> reg = [] {
    auto sweep = experiments::delta_sweep_specs();
    auto with_sweep = [&](std::vector<ParamSpec> v) {
      v.insert(v.end(), sweep.begin(), sweep.end());
      return v;
    };
    std::vector<ExperimentDef> r;
    r.push_back({"boundary_effect",
                 {{"n", K::integer, "64", "deriv2 discretization size"},
                  {"solution", K::choice, "constant_one", "exact solution", {"constant_one", "linear_t"}},
                  {"normalize", K::flag, "false", "scale operator to norm one"},
                  {"deltas", K::real_list, "0,0.0005,0.005,0.05", "relative noise levels"},
                  {"alpha_min", K::real, "1e-10", "oracle grid lower end"},
                  {"alpha_max", K::real, "1", "oracle grid upper end"},
                  {"alpha_count", K::integer, "300", "oracle grid size"},
                  {"fixed_delta", K::real, "0.005", "noise level for fixed-alpha runs"},
                  {"fixed_alphas", K::real_list, "1e-4,1e-5,1e-6,1e-7", "fixed alphas"}},
                 experiments::boundary_effect});
    r.push_back({"asc_curves",
                 {{"n", K::integer, "5000", "model size"},
                  {"eta", K::real, "2", "singular value decay"},
                  {"beta", K::real, "2", "coefficient decay"},
                  {"leading_ones", K::integer, "8", "leading unit coefficients (variant)"},
                  {"kappa", K::real, "0.5", "benchmark source exponent"},
                  {"R_min", K::real, "1e-2", "R grid lower end"},
                  {"R_max", K::real, "100", "R grid upper end"},
                  {"R_count", K::integer, "81", "R grid size"},
                  {"fit_lo", K::real, "2", "fit window lower R"},
                  {"fit_hi", K::real, "60", "fit window upper R"},
                  {"trim", K::real, "0.2", "fraction of log-R span trimmed per side"},
                  {"noise_delta", K::real, "0.005", "relative noise for the noise ASC"},
                  {"noise_seeds", K::integer, "5", "noise realizations"},
                  {"noise_R_count", K::integer, "40", "noise ASC grid size"},
                  {"noise_kappa", K::real, "0.5", "noise ASC source exponent"}},
                 experiments::asc_curves});
    r.push_back({"discrete_asc",
                 {{"levels", K::real_list, "20,100,1000,5000", "truncation levels"},
                  {"eta", K::real, "2", "singular value decay"},
                  {"beta", K::real, "2", "coefficient decay"},
                  {"nu", K::real, "0", "distance measure exponent"},
                  {"kappa", K::real, "0.5", "benchmark source exponent"},
                  {"R_min", K::real, "1e-2", "R grid lower end"},
                  {"R_max_factor", K::real, "2", "R grid upper end in units of R*"},
                  {"R_count", K::integer, "60", "R grid size"},
                  {"deriv2_n", K::integer, "20", "deriv2 size (0 disables)"},
                  {"deriv2_solution", K::choice, "linear_t", "deriv2 solution", {"constant_one", "linear_t"}}},
                 experiments::discrete_asc});
    r.push_back({"source_growth",
                 {{"n", K::integer, "5000", "model size"},
                  {"eta", K::real, "2", "singular value decay"},
                  {"beta", K::real, "2", "coefficient decay"},
                  {"leading_ones", K::integer, "0", "leading unit coefficients"},
                  {"alpha_min", K::real, "1e-22", "alpha grid lower end"},
                  {"alpha_max", K::real, "1", "alpha grid upper end"},
                  {"alpha_count", K::integer, "111", "alpha grid size"},
                  {"pre_lo_factor", K::real, "1e3", "pre-saturation window start, units of sigma_min^2"},
                  {"pre_hi", K::real, "1e-3", "pre-saturation window end"},
                  {"plateau_factor", K::real, "1e-3", "plateau window end, units of sigma_min^2"}},
                 experiments::source_growth});
    r.push_back({"rate_table",
                 with_sweep({{"n", K::integer, "5000", "model size"},
                             {"eta", K::real, "2", "singular value decay"},
                             {"beta", K::real, "2", "coefficient decay"},
                             {"c", K::real, "1", "a-priori constant"}}),
                 experiments::rate_table});
    r.push_back({"high_order_saturation",
                 with_sweep({{"n", K::integer, "5000", "model size"},
                             {"eta", K::real, "2", "singular value decay"},
                             {"mus", K::real_list, "0.25,1.25,2.25,3.25", "smoothness indices"},
                             {"kappa_order", K::integer, "1", "Tikhonov order"},
                             {"probe_mus", K::real_list, "0.25,1.25", "saturation probe indices"},
                             {"probe_alpha_min", K::real, "1e-6", "probe grid lower end"},
                             {"probe_alpha_max", K::real, "1e-2", "probe grid upper end"},
                             {"probe_count", K::integer, "25", "probe grid size"}}),
                 experiments::high_order_saturation});
    {
      auto specs = with_sweep({{"n", K::integer, "2000", "model size"},
                               {"a", K::real, "1", "smoothing order of A"},
                               {"p", K::real, "1", "smoothness of the solution"},
                               {"s", K::real, "2", "penalty order"},
                               {"c", K::real, "1", "a-priori constant"}});
      for (auto& s : specs)
        if (s.name == "alpha_lo") s.default_value = "1e-30";
      r.push_back({"oversmoothing_rate", specs, experiments::oversmoothing_rate});
    }
    r.push_back({"landweber_vs_tikhonov",
                 {{"n", K::integer, "5000", "model size"},
                  {"eta", K::real, "2", "singular value decay"},
                  {"beta", K::real, "2", "coefficient decay"},
                  {"deltas", K::real_list, "0,0.001", "relative noise levels"},
                  {"alpha_base", K::real, "0.7", "Tikhonov alphas are alpha_base^j"},
                  {"alpha_count", K::integer, "60", "number of Tikhonov alphas"},
                  {"k_max", K::integer, "50000", "Landweber iterations"},
                  {"lw_beta", K::real, "1", "Landweber step size"},
                  {"checkpoint_factor", K::real, "2", "geometric checkpoint spacing"}},
                 experiments::landweber_vs_tikhonov});
    return r;
  }();
  return reg;
}

inline const ExperimentDef& find_experiment(const std::string& id) {
  for (const auto& e : experiment_registry())
    if (e.id == id) return e;
  throw ConfigurationError("unknown experiment '" + id + "'");
}

inline ExperimentReport run_experiment(const std::string& id, const Config& config,
                                       std::uint64_t seed = 42, int jobs = 1) {
  const auto& def = find_experiment(id);
  ExperimentContext ctx{Params(def.specs, config), seed, jobs};
  auto r = def.run(ctx);
  r.id = id;
  r.seed = seed;
  r.config_echo = ctx.params.echo();
  return r;
}

}  // namespace asclab
