#include "wgf/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wgf/diagnostics.hpp"
#include "wgf/errors.hpp"
#include "wgf/jko.hpp"
#include "wgf/scheme.hpp"
#include "wgf/wasserstein.hpp"

namespace wgf::cli {

namespace {

struct Check {
  const char* name;
  const char* scope;
  std::function<CheckResult(Exec)> fn;
};

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

CheckResult from_report(const InequalityReport& rep) {
  CheckResult r;
  r.pass = rep.pass;
  r.worst = rep.worst_residual;
  r.detail = fmt("worst excess over tolerance %.3e over %.0f iterations", rep.worst_excess,
                 static_cast<double>(rep.residuals.size()));
  if (rep.floor_limited) r.detail += " (floor-limited)";
  return r;
}

// Folds several reports into one result: pass iff all pass.
CheckResult merge(const std::vector<InequalityReport>& reps) {
  CheckResult r;
  r.pass = true;
  r.worst = -INFINITY;
  double excess = -INFINITY;
  bool floor = false;
  for (const auto& rep : reps) {
    r.pass = r.pass && rep.pass;
    r.worst = std::max(r.worst, rep.worst_residual);
    excess = std::max(excess, rep.worst_excess);
    floor = floor || rep.floor_limited;
  }
  r.detail = fmt("worst excess over tolerance %.3e across %.0f runs", excess, static_cast<double>(reps.size()));
  if (floor) r.detail += " (floor-limited)";
  return r;
}

CheckResult discrepancy(double worst, double tol, const char* what) {
  CheckResult r;
  r.pass = worst <= tol;
  r.worst = worst;
  r.detail = std::string(what) + fmt(": %.3e (limit %.1e)", worst, tol);
  return r;
}

SchemeConfig reference_config(Representation rep, Exec exec) {
  SchemeConfig c;
  c.representation = rep;
  c.snapshot_every = 1;
  c.exec = exec;
  return c;
}

TrajectoryLog run_ok(const SchemeConfig& c) {
  TrajectoryLog log = run(c);
  if (!log.ok())
    throw std::runtime_error("run failed at iteration " + std::to_string(log.failure->iteration) + ": " +
                             log.failure->message);
  return log;
}

ParticleCloud random_cloud(std::mt19937_64& eng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n * d);
  for (double& v : x) v = u(eng);
  return ParticleCloud(n, d, std::move(x));
}

double brute_force_w2(const ParticleCloud& a, const ParticleCloud& b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < a.dim(); ++k) {
        const double d = a(i, k) - b(perm[i], k);
        s += d * d;
      }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

GaussianMeasure random_gaussian_1d(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> m(-3.0, 3.0), s(0.3, 3.0);
  const double sd = s(eng);
  return GaussianMeasure({m(eng)}, {sd * sd});
}

// ---- ot ------------------------------------------------------------------

CheckResult ot_exact_vs_bruteforce(Exec exec) {
  std::mt19937_64 eng(2024);
  double worst = 0.0;
  for (std::size_t t = 0; t < 25; ++t) {
    const std::size_t d = 1 + t % 3;
    const auto a = random_cloud(eng, 7, d);
    const auto b = random_cloud(eng, 7, d);
    worst = std::max(worst, std::abs(w2_particles_exact(a, b, kDefaultExactCap, exec) - brute_force_w2(a, b)));
  }
  return discrepancy(worst, 1e-12, "max |assignment - brute force|");
}

CheckResult ot_exact_vs_sorted(Exec exec) {
  std::mt19937_64 eng(77);
  double worst = 0.0;
  for (std::size_t n : {2u, 7u, 64u, 300u}) {
    const auto a = random_cloud(eng, n, 1);
    const auto b = random_cloud(eng, n, 1);
    worst = std::max(worst, std::abs(w2_particles_exact(a, b, kDefaultExactCap, exec) - w2_particles_1d(a, b)));
  }
  return discrepancy(worst, 1e-12, "max |assignment - sorted coupling|");
}

CheckResult ot_quantile_vs_gaussian(Exec) {
  std::mt19937_64 eng(5);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto a = random_gaussian_1d(eng);
    const auto b = random_gaussian_1d(eng);
    const double exact = w2_gaussian(a, b);
    const double grid = w2_quantile(gaussian_to_quantile(a, 4096), gaussian_to_quantile(b, 4096));
    worst = std::max(worst, std::abs(grid - exact) / (1.0 + exact));
  }
  return discrepancy(worst, 1e-3, "max relative |grid W2 - closed form|");
}

// ---- brenier -------------------------------------------------------------

CheckResult brenier_forward_boundary(Exec) {
  CheckResult r;
  r.pass = true;
  std::string failures;
  for (double l : {0.5, 1.0, 4.0, 25.0}) {
    const auto f = Potential::isotropic_quadratic(1, l);
    const auto q = gaussian_to_quantile(GaussianMeasure({0.0}, {1.0}), 256);
    const bool safe = check_monotone(forward_map_values(f, 0.99 / l, q.values()));
    const bool unsafe = check_monotone(forward_map_values(f, 1.01 / l, q.values()));
    if (!safe || unsafe) {
      r.pass = false;
      failures += fmt(" L=%g", l);
    }
  }
  r.worst = r.pass ? 0.0 : 1.0;
  r.detail = r.pass ? "monotone at 0.99/L, not monotone at 1.01/L" : "boundary misplaced for" + failures;
  return r;
}

CheckResult brenier_maps_monotone(Exec) {
  std::mt19937_64 eng(11);
  std::size_t bad = 0;
  for (int t = 0; t < 20; ++t) {
    const auto a = gaussian_to_quantile(random_gaussian_1d(eng), 512);
    const auto b = gaussian_to_quantile(random_gaussian_1d(eng), 512);
    if (!check_monotone(ot_map_1d(a, b))) ++bad;
    if (Coupling1D(a, b).cost() != w2_quantile(a, b)) ++bad;
  }
  CheckResult r;
  r.pass = bad == 0;
  r.worst = static_cast<double>(bad);
  r.detail = fmt("%.0f non-monotone or inconsistent maps out of 20", static_cast<double>(bad));
  return r;
}

// ---- jko -----------------------------------------------------------------

CheckResult jko_entropy_oracle(Exec) {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> sd(0.2, 5.0), step(0.01, 1.0);
  double worst = 0.0, kkt = 0.0;
  for (int t = 0; t < 10; ++t) {
    const GaussianMeasure g({0.0}, {std::pow(sd(eng), 2)});
    const double gamma = step(eng);
    const auto closed = jko_entropy_gaussian(g, gamma);
    const auto res = jko_quantile(InternalEnergy::negative_entropy(), gaussian_to_quantile(g, 4096), gamma);
    worst = std::max(worst, w2_between(Measure(res.measure), Measure(closed)));
    kkt = std::max(kkt, res.report.kkt_residual / std::max(1.0, std::abs(res.measure[0])));
  }
  auto r = discrepancy(worst, 1e-4, "max W2(grid JKO, closed form)");
  if (kkt > 1e-10) {
    r.pass = false;
    r.detail += fmt("; KKT residual %.3e", kkt);
  }
  return r;
}

CheckResult jko_full_oracle(Exec) {
  std::mt19937_64 eng(37);
  std::uniform_real_distribution<double> sd(0.2, 5.0), step(0.01, 1.0), mean(-5.0, 5.0);
  double worst = 0.0;
  const auto f = Potential::isotropic_quadratic(1, 1.0, 0.5);
  for (int t = 0; t < 10; ++t) {
    const GaussianMeasure g({mean(eng)}, {std::pow(sd(eng), 2)});
    const double gamma = step(eng);
    const auto closed = jko_full_gaussian(f, InternalEnergy::negative_entropy(), g, gamma);
    const auto res = jko_backward_full(f, InternalEnergy::negative_entropy(), gaussian_to_quantile(g, 4096), gamma);
    worst = std::max(worst, w2_between(Measure(res.measure), Measure(closed)));
  }
  return discrepancy(worst, 1e-4, "max W2(grid full JKO, closed form)");
}

CheckResult jko_subgradient_inequality(Exec) {
  std::mt19937_64 eng(41);
  double worst = -INFINITY;
  for (int t = 0; t < 50; ++t) {
    const auto s = subgradient_inequality_gaussian(random_gaussian_1d(eng), random_gaussian_1d(eng),
                                                   random_gaussian_1d(eng));
    worst = std::max(worst, s.residual() / (1.0 + std::abs(s.energy_difference)));
  }
  return discrepancy(worst, 1e-12, "max <xi, T^pi - T^mu> - (H(pi) - H(mu))");
}

// ---- descent -------------------------------------------------------------

CheckResult descent_gaussian_matrix(Exec exec) {
  std::vector<InequalityReport> reps;
  for (double gamma : {0.01, 0.1, 0.5})
    for (double s0 : {0.1, 1.0, 100.0}) {
      auto c = reference_config(Representation::gaussian, exec);
      c.gamma = gamma;
      c.initial = GaussianMeasure({10.0}, {s0 * s0});
      reps.push_back(descent_check(run_ok(c)));
    }
  return merge(reps);
}

CheckResult descent_quantile_matrix(Exec exec) {
  std::vector<InequalityReport> reps;
  for (const auto& h : {InternalEnergy::negative_entropy(), InternalEnergy::power(2.0)})
    for (double gamma : {0.01, 0.1, 0.5})
      for (double s0 : {0.1, 1.0, 100.0}) {
        auto c = reference_config(Representation::quantile, exec);
        c.energy = h;
        c.gamma = gamma;
        c.quantile_nodes = 512;
        c.n_iters = 60;
        c.initial = GaussianMeasure({10.0}, {s0 * s0});
        reps.push_back(descent_check(run_ok(c)));
      }
  return merge(reps);
}

CheckResult descent_sharp_quantile(Exec exec) {
  std::vector<InequalityReport> reps;
  for (const auto& h : {InternalEnergy::negative_entropy(), InternalEnergy::power(2.0)}) {
    auto c = reference_config(Representation::quantile, exec);
    c.energy = h;
    c.quantile_nodes = 1024;
    c.n_iters = 100;
    c.initial = GaussianMeasure({3.0}, {4.0});
    const auto log = run_ok(c);
    reps.push_back(descent_residual_1d(log, c.potential, c.energy, c.gamma).report);
  }
  return merge(reps);
}

// ---- evi -----------------------------------------------------------------

std::vector<Measure> comparison_measures(const TrajectoryLog& log) {
  std::vector<Measure> out{*log.target};
  std::mt19937_64 eng(2718);
  for (int t = 0; t < 20; ++t) out.emplace_back(random_gaussian_1d(eng));
  return out;
}

CheckResult evi_pipeline(Representation rep, Exec exec) {
  auto c = reference_config(rep, exec);
  if (rep == Representation::quantile) c.quantile_nodes = 2048;
  const auto log = run_ok(c);
  std::vector<InequalityReport> reps;
  for (const auto& pi : comparison_measures(log)) reps.push_back(evi_check(log, pi, 1.0, c.gamma));
  return merge(reps);
}

CheckResult evi_half_steps(Exec exec) {
  std::vector<InequalityReport> reps;
  for (auto rep : {Representation::gaussian, Representation::quantile}) {
    auto c = reference_config(rep, exec);
    c.quantile_nodes = 1024;
    c.n_iters = 100;
    const auto log = run_ok(c);
    for (const auto& pi : comparison_measures(log)) {
      auto [prox, grad] = half_step_evi_checks(log, pi, 1.0, c.gamma);
      reps.push_back(std::move(prox));
      reps.push_back(std::move(grad));
    }
  }
  return merge(reps);
}

// ---- rates ---------------------------------------------------------------

CheckResult rates_strongly_convex(Exec exec) {
  std::vector<InequalityReport> reps;
  for (auto rep : {Representation::gaussian, Representation::quantile}) {
    auto c = reference_config(rep, exec);
    c.snapshot_every = 10;
    reps.push_back(rate_check_strongly_convex(run_ok(c), c.gamma, 1.0));
  }
  return merge(reps);
}

CheckResult rates_convex(Exec exec) {
  std::vector<InequalityReport> reps;
  for (auto rep : {Representation::gaussian, Representation::quantile}) {
    auto c = reference_config(rep, exec);
    c.snapshot_every = 10;
    reps.push_back(rate_check_convex(run_ok(c), c.gamma));
  }
  return merge(reps);
}

CheckResult rates_fitted_contraction(Exec exec) {
  auto c = reference_config(Representation::gaussian, exec);
  c.potential = Potential::isotropic_quadratic(1000, 1.0);
  c.initial = GaussianMeasure::isotropic(1000, 10.0, 100.0);
  const auto rep = rate_check_strongly_convex(run_ok(c), c.gamma, 1.0);
  auto r = from_report(rep);
  const double rho = rep.fitted_rate.value_or(INFINITY);
  r.pass = r.pass && rho <= 0.9;
  r.detail += fmt("; fitted contraction %.6f", rho);
  return r;
}

CheckResult rates_lmc_bias(Exec exec) {
  auto c = reference_config(Representation::gaussian, exec);
  c.n_iters = 500;
  c.scheme = SchemeKind::lmc;
  const auto lmc = run_ok(c);
  c.scheme = SchemeKind::fb;
  const auto fb = run_ok(c);
  const double expected = 2.0 / (2.0 - c.gamma);
  const double lmc_err = std::abs(lmc.records.back().variance[0] - expected) / expected;
  const double fb_err = std::abs(fb.records.back().variance[0] - 1.0);
  auto r = discrepancy(lmc_err, 1e-9, "lmc relative variance error");
  r.detail += fmt("; fb |variance - 1| %.3e", fb_err);
  r.pass = r.pass && fb_err <= 1e-12;
  return r;
}

// ---- geodesic ------------------------------------------------------------

CheckResult geodesic_probe(const InternalEnergy& h) {
  std::mt19937_64 eng(h.kind() == InternalEnergy::Kind::power ? 1234 : 4321);
  std::vector<InequalityReport> reps;
  for (int t = 0; t < 10; ++t) {
    const auto nu = gaussian_to_quantile(random_gaussian_1d(eng), 1024);
    const auto mu = gaussian_to_quantile(random_gaussian_1d(eng), 1024);
    const auto pi = gaussian_to_quantile(random_gaussian_1d(eng), 1024);
    reps.push_back(geodesic_convexity_probe(h, nu, mu, pi, 11));
  }
  return merge(reps);
}

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks = {
      {"ot.exact_vs_bruteforce", "ot", ot_exact_vs_bruteforce},
      {"ot.exact_vs_sorted_1d", "ot", ot_exact_vs_sorted},
      {"ot.quantile_vs_closed_form", "ot", ot_quantile_vs_gaussian},
      {"brenier.forward_map_boundary", "brenier", brenier_forward_boundary},
      {"brenier.maps_monotone", "brenier", brenier_maps_monotone},
      {"jko.entropy_vs_closed_form", "jko", jko_entropy_oracle},
      {"jko.full_vs_closed_form", "jko", jko_full_oracle},
      {"jko.subgradient_inequality", "jko", jko_subgradient_inequality},
      {"descent.gaussian_matrix", "descent", descent_gaussian_matrix},
      {"descent.quantile_matrix", "descent", descent_quantile_matrix},
      {"descent.sharp_quantile", "descent", descent_sharp_quantile},
      {"evi.gaussian", "evi", [](Exec e) { return evi_pipeline(Representation::gaussian, e); }},
      {"evi.quantile", "evi", [](Exec e) { return evi_pipeline(Representation::quantile, e); }},
      {"evi.half_steps", "evi", evi_half_steps},
      {"rates.strongly_convex", "rates", rates_strongly_convex},
      {"rates.convex", "rates", rates_convex},
      {"rates.fitted_contraction_d1000", "rates", rates_fitted_contraction},
      {"rates.lmc_bias", "rates", rates_lmc_bias},
      {"geodesic.entropy", "geodesic", [](Exec) { return geodesic_probe(InternalEnergy::negative_entropy()); }},
      {"geodesic.power2", "geodesic", [](Exec) { return geodesic_probe(InternalEnergy::power(2.0)); }},
  };
  return checks;
}

}  // namespace

const std::vector<std::string>& validation_scopes() {
  static const std::vector<std::string> scopes = {"ot", "brenier", "jko", "descent", "evi", "rates", "geodesic"};
  return scopes;
}

std::vector<CheckResult> run_validation(std::optional<std::string_view> scope, Exec exec) {
  if (scope && std::find(validation_scopes().begin(), validation_scopes().end(), *scope) == validation_scopes().end())
    throw std::invalid_argument("unknown validation scope '" + std::string(*scope) + "'");
  std::vector<const Check*> selected;
  for (const auto& c : all_checks())
    if (!scope || *scope == c.scope) selected.push_back(&c);

  std::vector<CheckResult> results(selected.size());
  const auto n = static_cast<std::ptrdiff_t>(selected.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Check& c = *selected[i];
    CheckResult r;
    try {
      r = c.fn(exec);
    } catch (const std::exception& e) {
      r.pass = false;
      r.worst = NAN;
      r.detail = std::string("error: ") + e.what();
    }
    r.name = c.name;
    r.scope = c.scope;
    results[i] = std::move(r);
  }
  return results;
}

}  // namespace wgf::cli
