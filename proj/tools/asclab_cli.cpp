#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "asclab/asclab.hpp"

namespace {

using namespace asclab;

struct ProblemOpts {
  std::string problem = "deriv2";
  int n = 64;
  std::string solution = "linear_t";
  bool normalize = false;
  double eta = 2.0, beta_decay = 2.0;
  int leading_ones = 0;
  double a = 1.0, p = 1.0, s = 2.0;
  double delta = 0.0;
  std::uint64_t seed = 42;

  void attach(CLI::App* app) {
    app->add_option("--problem", problem, "deriv2 | diagonal | hilbert")
        ->check(CLI::IsMember({"deriv2", "diagonal", "hilbert"}));
    app->add_option("--n", n, "problem size");
    app->add_option("--solution", solution, "deriv2 solution")
        ->check(CLI::IsMember({"linear_t", "constant_one"}));
    app->add_flag("--normalize", normalize, "scale deriv2 to norm one");
    app->add_option("--eta", eta, "diagonal: singular value decay");
    app->add_option("--beta-decay", beta_decay, "diagonal: coefficient decay");
    app->add_option("--leading-ones", leading_ones, "diagonal: leading unit coefficients");
    app->add_option("--a", a, "hilbert: smoothing order");
    app->add_option("--p", p, "hilbert: solution smoothness");
    app->add_option("--s", s, "hilbert: penalty order");
    app->add_option("--delta", delta, "relative noise level");
    app->add_option("--seed", seed, "noise seed");
  }

  InverseProblem build() const {
    if (problem == "diagonal") return make_diagonal_model(n, eta, beta_decay, leading_ones);
    if (problem == "hilbert") return make_hilbert_scale_model(n, a, p, s);
    return make_deriv2(n, solution == "constant_one" ? Deriv2Solution::constant_one
                                                     : Deriv2Solution::linear_t,
                       normalize);
  }
};

void kv(const std::string& k, double v) { std::cout << k << '=' << format_double(v) << '\n'; }

// Experiment parameters are passed as --key value / --key=value after the id.
Config parse_experiment_flags(const std::vector<std::string>& extras) {
  Config cfg;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0) throw ConfigurationError("unexpected argument '" + tok + "'");
    std::string key = tok.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw ConfigurationError("flag --" + key + " needs a value");
      value = extras[++i];
    }
    if (cfg.count(key)) throw ConfigurationError("flag --" + key + " given twice");
    cfg[key] = value;
  }
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Regularization laboratory for linear ill-posed problems"};
  app.require_subcommand(1);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a numerical study");
  std::string exp_id, out_dir = "out";
  std::uint64_t seed = 42;
  int jobs = 1;
  bool list = false;
  exp->add_option("id", exp_id, "experiment id");
  exp->add_option("--out-dir", out_dir, "output directory");
  exp->add_option("--seed", seed, "base seed");
  exp->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  exp->add_flag("--list", list, "list experiments and their parameters");
  exp->allow_extras();

  // solve
  auto* solve = app.add_subcommand("solve", "single Tikhonov or Landweber solve");
  ProblemOpts sp;
  sp.attach(solve);
  std::string method = "tikhonov";
  double alpha = 1e-4, lw_beta = 1.0, hs_s = -1.0;
  int kappa_order = 0;
  long iterations = 100;
  solve->add_option("--method", method, "tikhonov | hilbert | landweber")
      ->check(CLI::IsMember({"tikhonov", "hilbert", "landweber"}));
  solve->add_option("--alpha", alpha, "regularization parameter");
  solve->add_option("--kappa-order", kappa_order, "Tikhonov order");
  solve->add_option("--penalty-s", hs_s, "Hilbert-scale penalty order (default: --s)");
  solve->add_option("--iterations", iterations, "Landweber steps");
  solve->add_option("--lw-beta", lw_beta, "Landweber step size (default 1/sigma_1^2)");

  // asc
  auto* asc = app.add_subcommand("asc", "approximate source condition distance curve");
  ProblemOpts ap;
  ap.problem = "diagonal";
  ap.n = 5000;
  ap.attach(asc);
  double nu = 0.0, kappa = 0.5, rmin = 1e-2, rmax = 100.0;
  int rcount = 41;
  std::string asc_out;
  asc->add_option("--nu", nu, "distance exponent");
  asc->add_option("--kappa", kappa, "benchmark exponent");
  asc->add_option("--r-min", rmin, "R grid lower end");
  asc->add_option("--r-max", rmax, "R grid upper end");
  asc->add_option("--r-count", rcount, "R grid size");
  asc->add_option("--out-dir", asc_out, "write asc.csv here instead of stdout");

  // choose
  auto* choose = app.add_subcommand("choose", "regularization parameter choice");
  ProblemOpts cp;
  cp.attach(choose);
  std::string rule = "discrepancy";
  double tau = 1.5, c = 1.0, amin = 1e-10, amax = 1.0;
  double mu = -1.0;
  int kord = 0, acount = 300;
  choose->add_option("--rule", rule, "apriori | discrepancy | oracle")
      ->check(CLI::IsMember({"apriori", "discrepancy", "oracle"}));
  choose->add_option("--tau", tau, "discrepancy factor");
  choose->add_option("--c", c, "a-priori constant");
  choose->add_option("--mu", mu, "smoothness index (a-priori; default: problem's own)");
  choose->add_option("--kappa-order", kord, "Tikhonov order");
  choose->add_option("--alpha-min", amin, "oracle grid lower end");
  choose->add_option("--alpha-max", amax, "oracle grid upper end");
  choose->add_option("--alpha-count", acount, "oracle grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*exp) {
    if (list) {
      for (const auto& d : experiment_registry()) {
        std::cout << d.id << '\n';
        for (const auto& s : d.specs)
          std::cout << "  --" << s.name << " (default " << s.default_value << ")  " << s.help << '\n';
      }
      return 0;
    }
    if (exp_id.empty()) throw ConfigurationError("experiment id required (see --list)");
    const Config cfg = parse_experiment_flags(exp->remaining());
    const auto report = run_experiment(exp_id, cfg, seed, jobs);
    for (const auto& path : write_report(report, out_dir)) std::cout << path.string() << '\n';
    return 0;
  }

  if (*solve) {
    const auto prob = sp.build();
    const auto noisy = add_noise(prob, sp.delta, sp.seed);
    RegularizedSolution sol;
    if (method == "landweber") {
      LandweberOptions o;
      const double s1 = prob.op.sigma_max();
      o.beta = solve->count("--lw-beta") ? lw_beta : 1.0 / (s1 * s1);
      o.k_max = iterations;
      o.checkpoints = {iterations};
      sol = landweber(prob, noisy.y_delta, o).back();
      kv("iteration", static_cast<double>(*sol.iteration));
    } else if (method == "hilbert") {
      sol = tikhonov_hilbert_scale(prob, noisy.y_delta, alpha, hs_s >= 0.0 ? hs_s : sp.s);
      kv("alpha", alpha);
    } else {
      sol = tikhonov(prob, noisy.y_delta, alpha, kappa_order);
      kv("alpha", alpha);
    }
    kv("delta_abs", noisy.delta_abs);
    kv("residual_norm", sol.residual_norm);
    kv("error_norm", sol.error_norm.value_or(NAN));
    kv("xi_norm", sol.source_norm_half.value_or(NAN));
    return 0;
  }

  if (*asc) {
    const auto prob = ap.build();
    const auto curve = distance_curve(prob.op, prob.x_true, nu, kappa, logspace(rmin, rmax, rcount));
    const auto ds = experiments::curve_dataset("asc", curve);
    if (asc_out.empty()) {
      std::cout << ds.to_csv();
    } else {
      std::filesystem::create_directories(asc_out);
      const auto path = std::filesystem::path(asc_out) / "asc.csv";
      std::ofstream(path, std::ios::binary) << ds.to_csv();
      std::cout << path.string() << '\n';
    }
    return 0;
  }

  if (*choose) {
    const auto prob = cp.build();
    const auto noisy = add_noise(prob, cp.delta, cp.seed);
    const Method m = cp.problem == "hilbert" ? Method{HilbertScale{cp.a, cp.p, cp.s}}
                     : kord > 0              ? Method{HighOrder{kord}}
                                             : Method{Classical{}};
    ChoiceResult res;
    if (rule == "apriori") {
      const double m_mu = mu >= 0.0 ? mu : prob.mu_nominal.value_or(-1.0);
      if (m_mu < 0.0 && cp.problem != "hilbert") {
        throw ConfigurationError("a-priori rule needs --mu for this problem");
      }
      if (noisy.delta_abs == 0.0) throw UnsupportedMode("a-priori rule needs delta > 0");
      res = alpha_apriori(noisy.delta_abs, m_mu, m, c);
    } else if (rule == "discrepancy") {
      res = alpha_discrepancy(solver_for(prob, noisy.y_delta, m), noisy.delta_abs, tau);
    } else {
      res = alpha_oracle(solver_for(prob, noisy.y_delta, m), logspace(amin, amax, acount));
    }
    std::cout << "rule=" << rule_name(res.rule) << '\n';
    kv("alpha", res.alpha);
    for (const auto& [k, v] : res.diagnostics) kv(k, v);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const asclab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const asclab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
