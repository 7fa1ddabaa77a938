#include <doctest.h>

#include <cmath>
#include <random>

#include "wgf/diagnostics.hpp"
#include "wgf/errors.hpp"
#include "wgf/wasserstein.hpp"

using namespace wgf;

namespace {

SchemeConfig quantile_config(std::size_t m = 1024, std::size_t iters = 100) {
  SchemeConfig c;
  c.representation = Representation::quantile;
  c.quantile_nodes = m;
  c.n_iters = iters;
  c.snapshot_every = 1;
  return c;
}

GaussianMeasure random_gaussian(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> m(-3.0, 3.0), s(0.3, 3.0);
  const double sd = s(eng);
  return GaussianMeasure({m(eng)}, {sd * sd});
}

}  // namespace

TEST_CASE("tolerance scaling") {
  CHECK(Tolerance::closed_form().at(0.0) == doctest::Approx(2e-9));
  CHECK(Tolerance::discretized().at(1.0) == doctest::Approx(1e-6 + 2e-3));
}

TEST_CASE("report aggregation") {
  InequalityReport r;
  r.add(1, -1.0, 0.1);
  r.add(2, 0.05, 0.1);
  r.finalize();
  CHECK(r.pass);
  CHECK(r.worst_residual == 0.05);
  CHECK(r.worst_excess == doctest::Approx(-0.05));
  r.add(3, 0.15, 0.1);
  r.finalize();
  CHECK_FALSE(r.pass);
  r.finalize({1.0, 1.0, 1e-30}, 1e-20);
  CHECK(r.pass);
  CHECK(r.floor_limited);
  r.add(4, NAN, 0.1);
  r.finalize();
  CHECK_FALSE(r.pass);
}

TEST_CASE("fitted contraction of a geometric sequence") {
  std::vector<double> w{1.0};
  for (int i = 0; i < 50; ++i) w.push_back(w.back() * 0.81);
  w.push_back(0.0);
  CHECK(*fitted_contraction(w, 1e-30) == doctest::Approx(0.81).epsilon(1e-12));
  CHECK_FALSE(fitted_contraction({1e-40, 1e-41}, 1e-30).has_value());
}

TEST_CASE("inequalities hold along the Gaussian reference run") {
  SchemeConfig c;
  const auto log = run(c);
  CHECK(descent_check(log).pass);
  CHECK(evi_check(log, *log.target, 1.0, 0.1).pass);
  const auto strong = rate_check_strongly_convex(log, 0.1, 1.0);
  CHECK(strong.pass);
  CHECK(*strong.fitted_rate <= 0.9);
  CHECK(rate_check_convex(log, 0.1).pass);
  std::mt19937_64 eng(1);
  for (int t = 0; t < 20; ++t) {
    const Measure pi = random_gaussian(eng);
    CHECK(evi_check(log, pi, 1.0, 0.1).pass);
    const auto [prox, grad] = half_step_evi_checks(log, pi, 1.0, 0.1);
    CHECK(prox.pass);
    CHECK(grad.pass);
  }
}

TEST_CASE("a stationary start gives zero residuals") {
  SchemeConfig c;
  c.initial = GaussianMeasure({0.0}, {1.0});
  c.n_iters = 20;
  const auto log = run(c);
  const auto d = descent_check(log);
  CHECK(d.pass);
  for (double r : d.residuals) CHECK(std::abs(r) <= 1e-12);
  const auto e = evi_check(log, *log.target, 1.0, 0.1);
  for (double r : e.residuals) CHECK(std::abs(r) <= 1e-12);

  auto q = quantile_config(512, 200);
  q.initial = GaussianMeasure({0.0}, {1.0});
  const auto qlog = run(q);
  const auto sharp = descent_residual_1d(qlog, q.potential, q.energy, q.gamma);
  CHECK(sharp.report.pass);
  CHECK(sharp.grad_norm_sq.back() <= 1e-12);
}

TEST_CASE("inequalities hold along quantile runs") {
  for (const auto& h : {InternalEnergy::negative_entropy(), InternalEnergy::power(2.0)}) {
    auto c = quantile_config();
    c.energy = h;
    const auto log = run(c);
    REQUIRE(log.ok());
    CHECK(descent_check(log).pass);
    CHECK(descent_residual_1d(log, c.potential, c.energy, c.gamma).report.pass);
    CHECK(evi_check(log, *log.target, 1.0, c.gamma).pass);
    const auto [prox, grad] = half_step_evi_checks(log, *log.target, 1.0, c.gamma);
    CHECK(prox.pass);
    CHECK(grad.pass);
    CHECK(rate_check_strongly_convex(log, c.gamma, 1.0).pass);
  }
}

TEST_CASE("a corrupted trajectory is caught") {
  SchemeConfig c;
  auto log = run(c);
  auto& r = log.records[50];
  const GaussianMeasure bumped({r.mean[0] + 1.0}, r.variance);
  r.state = bumped;
  r.objective = *r.objective + 10.0;
  CHECK_FALSE(evi_check(log, *log.target, 1.0, 0.1).pass);
  CHECK_FALSE(descent_check(log).pass);
}

TEST_CASE("checks need stored states") {
  auto c = quantile_config(256, 20);
  c.snapshot_every = 50;
  const auto log = run(c);
  CHECK_THROWS_AS(evi_check(log, *log.target, 1.0, c.gamma), PreconditionError);
}

TEST_CASE("negative entropy is convex along generalized geodesics on the grid") {
  std::mt19937_64 eng(2);
  for (int t = 0; t < 10; ++t) {
    const auto nu = gaussian_to_quantile(random_gaussian(eng), 1024);
    const auto mu = gaussian_to_quantile(random_gaussian(eng), 1024);
    const auto pi = gaussian_to_quantile(random_gaussian(eng), 1024);
    const auto rep = geodesic_convexity_probe(InternalEnergy::negative_entropy(), nu, mu, pi, 11);
    CHECK(rep.pass);
    CHECK(std::abs(rep.residuals.front()) <= 1e-12);
    CHECK(std::abs(rep.residuals.back()) <= 1e-12);
  }
}

TEST_CASE("entropy subgradient inequality on Gaussians") {
  std::mt19937_64 eng(3);
  for (int t = 0; t < 20; ++t) {
    const auto nu = random_gaussian(eng), mu = random_gaussian(eng), pi = random_gaussian(eng);
    CHECK(subgradient_inequality_gaussian(nu, mu, pi).residual() <= 1e-12);
    CHECK(std::abs(subgradient_inequality_gaussian(nu, mu, mu).residual()) <= 1e-12);
  }
}

TEST_CASE("W2 between mixed representations") {
  const GaussianMeasure a({1.0}, {4.0}), b({0.0}, {1.0});
  CHECK(w2_between(a, b) == 2.0);
  CHECK(w2_between(a, gaussian_to_quantile(b, 4096)) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(w2_between(gaussian_to_quantile(a, 4096), b) == doctest::Approx(2.0).epsilon(1e-3));
  const auto cloud = sample_gaussian(a, 100000, Rng(1));
  CHECK(w2_between(cloud, b) == doctest::Approx(2.0).epsilon(0.02));
  CHECK_THROWS_AS(w2_between(cloud, gaussian_to_quantile(b, 16)), PreconditionError);
}
