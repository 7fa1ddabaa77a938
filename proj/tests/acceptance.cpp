// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "wgf/diagnostics.hpp"
#include "wgf/jko.hpp"
#include "wgf/scheme.hpp"
#include "wgf/wasserstein.hpp"

using namespace wgf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

SchemeConfig reference(Representation rep = Representation::gaussian) {
  SchemeConfig c;  // F = x²/2, entropy, γ = 0.1, μ₀ = N(10, 100²), 200 iterations
  c.representation = rep;
  return c;
}

GaussianMeasure random_gaussian(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> m(-3.0, 3.0), s(0.3, 3.0);
  const double sd = s(eng);
  return GaussianMeasure({m(eng)}, {sd * sd});
}

// Largest W²_n − 0.9ⁿ·9901 relative to the bound, and the absolute excess.
struct BoundExcess {
  double absolute = -INFINITY;
  double relative = -INFINITY;
};
BoundExcess excess_over_rate(const TrajectoryLog& log) {
  BoundExcess e;
  for (const auto& r : log.records) {
    const double bound = std::pow(0.9, static_cast<double>(r.n)) * 9901.0;
    e.absolute = std::max(e.absolute, *r.w2_to_target - bound);
    e.relative = std::max(e.relative, (*r.w2_to_target - bound) / bound);
  }
  return e;
}

Outcome criterion1() {
  const auto g = run(reference());
  const auto q = run(reference(Representation::quantile));
  const auto p = run(reference(Representation::particles));
  if (!g.ok() || !q.ok() || !p.ok()) return {false, "a run failed"};
  const auto eg = excess_over_rate(g), eq = excess_over_rate(q), ep = excess_over_rate(p);
  const bool pass = eg.absolute <= 1e-9 && eq.relative <= 1e-2 && ep.relative <= 1e-2 && g.records.size() == 201;
  return {pass, fmt("closed form max(W2-bound) %.2e (<=1e-9); quantile %.2e, particles %.2e of bound (<=1e-2); "
                    "particle empirical W2 floor %.2e",
                    eg.absolute, eq.relative, ep.relative, *p.records.back().w2_empirical)};
}

Outcome criterion2() {
  auto c = reference();
  c.potential = Potential::isotropic_quadratic(1000, 1.0);
  c.initial = GaussianMeasure::isotropic(1000, 10.0, 100.0);
  const auto many = run(c);
  const auto one = run(reference());
  if (!many.ok()) return {false, "run failed"};
  const auto rate = rate_check_strongly_convex(many, 0.1, 1.0);
  double worst = 0.0;
  for (std::size_t n = 0; n < one.records.size(); ++n)
    for (std::size_t k = 0; k < 1000; ++k) {
      worst = std::max(worst, std::abs(many.records[n].mean[k] - one.records[n].mean[0]));
      worst = std::max(worst, std::abs(many.records[n].variance[k] - one.records[n].variance[0]));
    }
  const double rho = rate.fitted_rate.value_or(INFINITY);
  return {rho <= 0.9 && worst <= 1e-12 && many.records.size() == 201,
          fmt("fitted contraction %.6f (<=0.9), max per-coordinate deviation from d=1 %.2e (<=1e-12)", rho, worst)};
}

Outcome criterion3() {
  const auto log = run(reference());
  double worst = -INFINITY;
  for (const auto& r : log.records) {
    if (r.n == 0) continue;
    worst = std::max(worst, *r.objective_gap - 9901.0 / (0.2 * static_cast<double>(r.n)));
  }
  return {worst <= 1e-9, fmt("max gap - 9901/(0.2n) = %.4g (<=1e-9)", worst)};
}

Outcome criterion4() {
  std::size_t runs = 0, failed = 0;
  double worst_g = -INFINITY, worst_q = -INFINITY;
  for (double gamma : {0.01, 0.1, 0.5})
    for (double s0 : {0.1, 1.0, 100.0}) {
      auto c = reference();
      c.gamma = gamma;
      c.initial = GaussianMeasure({10.0}, {s0 * s0});
      const auto g = descent_check(run(c));
      worst_g = std::max(worst_g, g.worst_residual);
      failed += !g.pass;
      ++runs;
      for (const auto& h : {InternalEnergy::negative_entropy(), InternalEnergy::power(2.0)}) {
        auto qc = c;
        qc.representation = Representation::quantile;
        qc.quantile_nodes = 1024;
        qc.energy = h;
        const auto log = run(qc);
        if (!log.ok()) {
          ++failed;
          ++runs;
          continue;
        }
        const auto q = descent_check(log);
        worst_q = std::max(worst_q, q.worst_residual);
        failed += !q.pass;
        ++runs;
      }
    }
  return {failed == 0, fmt("%.0f runs, %.0f failing; worst increase Gaussian %.2e (tol 1e-8), quantile %.2e (tol 1e-4(1+|G0|))",
                           static_cast<double>(runs), static_cast<double>(failed), worst_g, worst_q)};
}

Outcome criterion5() {
  std::size_t failed = 0, total = 0;
  double worst = -INFINITY;
  for (auto rep : {Representation::gaussian, Representation::quantile}) {
    auto c = reference(rep);
    c.snapshot_every = 1;
    const auto log = run(c);
    if (!log.ok()) return {false, "run failed"};
    std::vector<Measure> pis{*log.target};
    std::mt19937_64 eng(2718);
    for (int t = 0; t < 20; ++t) pis.emplace_back(random_gaussian(eng));
    for (const auto& pi : pis) {
      const auto e = evi_check(log, pi, 1.0, c.gamma);
      failed += !e.pass;
      worst = std::max(worst, e.worst_excess);
      ++total;
    }
  }
  return {failed == 0, fmt("%.0f comparison measures, %.0f failing; worst residual - tolerance %.2e",
                           static_cast<double>(total), static_cast<double>(failed), worst)};
}

Outcome criterion6() {
  std::mt19937_64 eng(6);
  std::uniform_real_distribution<double> sd(0.2, 5.0), step(0.01, 1.0);
  double worst_w2 = 0.0, worst_kkt = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double s = sd(eng), gamma = step(eng);
    const GaussianMeasure g({0.0}, {s * s});
    const auto res = jko_quantile(InternalEnergy::negative_entropy(), gaussian_to_quantile(g, 4096), gamma);
    worst_w2 = std::max(worst_w2, w2_quantile(res.measure, gaussian_to_quantile(jko_entropy_gaussian(g, gamma), 4096)));
    worst_kkt = std::max(worst_kkt, res.report.kkt_residual);
  }
  // every solve of the quantile reference run
  const auto log = run(reference(Representation::quantile));
  for (const auto& r : log.records)
    if (r.jko) worst_kkt = std::max(worst_kkt, r.jko->kkt_residual);
  return {log.ok() && worst_w2 <= 1e-4 && worst_kkt <= 1e-10,
          fmt("max W2(grid, closed form) %.2e (<=1e-4), max KKT residual %.2e (<=1e-10)", worst_w2, worst_kkt)};
}

Outcome criterion7() {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_brute = 0.0, worst_1d = 0.0;
  for (std::size_t t = 0; t < 25; ++t) {
    const std::size_t d = 1 + t % 3, n = 7;
    std::vector<double> xa(n * d), xb(n * d);
    for (double& v : xa) v = u(eng);
    for (double& v : xb) v = u(eng);
    const ParticleCloud a(n, d, xa), b(n, d, xb);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) s += (a(i, k) - b(perm[i], k)) * (a(i, k) - b(perm[i], k));
      best = std::min(best, s / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double exact = w2_particles_exact(a, b);
    worst_brute = std::max(worst_brute, std::abs(exact - best));
    if (d == 1) worst_1d = std::max(worst_1d, std::abs(exact - w2_particles_1d(a, b)));
  }
  return {worst_brute <= 1e-12 && worst_1d <= 1e-12,
          fmt("max |assignment - 7! brute force| %.2e, max |assignment - sorted 1D| %.2e (<=1e-12)", worst_brute,
              worst_1d)};
}

Outcome criterion8() {
  bool ok = true;
  const auto q = gaussian_to_quantile(GaussianMeasure({0.0}, {1.0}), 1024);
  const auto cloud = sample_gaussian(GaussianMeasure({0.0}, {1.0}), 1000, Rng(8));
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return cloud(i, 0) < cloud(j, 0); });
  for (double l : {0.5, 1.0, 3.0, 40.0}) {
    const auto f = Potential::isotropic_quadratic(1, l);
    ok = ok && check_monotone(forward_map_values(f, 0.99 / l, q.values()));
    ok = ok && !check_monotone(forward_map_values(f, 1.01 / l, q.values()));
    // the same boundary on a particle cloud pushed with the unsafe flag
    const auto pushed = forward_step(f, 1.01 / l, cloud, true);
    std::vector<double> mapped(cloud.size());
    for (std::size_t k = 0; k < order.size(); ++k) mapped[k] = pushed(order[k], 0);
    ok = ok && !check_monotone(mapped);
  }
  return {ok, ok ? "forward map monotone at 0.99/L and not at 1.01/L for L in {0.5, 1, 3, 40}"
                 : "monotonicity boundary misplaced"};
}

Outcome criterion9() {
  auto c = reference();
  c.n_iters = 500;
  c.scheme = SchemeKind::lmc;
  const auto lmc = run(c);
  c.scheme = SchemeKind::fb;
  const auto fb = run(c);
  const double stationary = 2.0 / 1.9;
  const double lmc_err = std::abs(lmc.records.back().variance[0] - stationary) / stationary;
  const double fb_err = std::abs(fb.records.back().variance[0] - 1.0);
  return {lmc.ok() && fb.ok() && lmc_err <= 1e-9 && fb_err <= 1e-12,
          fmt("LMC variance %.16f, relative error %.2e (<=1e-9); FB |variance - 1| %.2e", lmc.records.back().variance[0],
              lmc_err, fb_err)};
}

Outcome criterion10() {
  const auto f = Potential::isotropic_quadratic(1, 1.0);
  double worst = 0.0;
  for (double gamma : {0.1, 0.3, 0.7}) {
    const auto s = fb_step(f, InternalEnergy::negative_entropy(), gamma, GaussianMeasure({0.0}, {1.0}));
    worst = std::max({worst, std::abs(s.next.mean()[0]), std::abs(s.next.stddev(0) - 1.0)});
  }
  return {worst <= 1e-12, fmt("max deviation from N(0,1) after one step %.2e (<=1e-12)", worst)};
}

Outcome criterion11() {
  std::mt19937_64 eng(11);
  double worst = -INFINITY;
  bool ok = true;
  for (int t = 0; t < 10; ++t) {
    const auto nu = gaussian_to_quantile(random_gaussian(eng), 1024);
    const auto mu = gaussian_to_quantile(random_gaussian(eng), 1024);
    const auto pi = gaussian_to_quantile(random_gaussian(eng), 1024);
    const auto rep = geodesic_convexity_probe(InternalEnergy::negative_entropy(), nu, mu, pi, 11, 1e-6);
    ok = ok && rep.pass && rep.residuals.size() == 11;
    worst = std::max(worst, rep.worst_residual);
  }
  return {ok, fmt("max convexity residual %.2e over 10 triples x 11 points (<=1e-6)", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "strongly convex rate on the reference experiment", 30.0, criterion1},
      {2, "product Gaussian in dimension 1000", 10.0, criterion2},
      {3, "convex rate bound", 0.0, criterion3},
      {4, "descent over the step/width/energy matrix", 0.0, criterion4},
      {5, "discrete EVI for the target and 20 random measures", 0.0, criterion5},
      {6, "grid JKO agrees with the closed form", 0.0, criterion6},
      {7, "exact assignment equals brute force", 0.0, criterion7},
      {8, "forward map monotonicity boundary", 0.0, criterion8},
      {9, "LMC bias witness", 0.0, criterion9},
      {10, "fixed point of one FB step", 0.0, criterion10},
      {11, "generalized geodesic convexity of the entropy", 0.0, criterion11},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_s);
    }
    std::printf("%s [%2d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
