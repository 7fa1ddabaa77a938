#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wgf/errors.hpp"
#include "wgf/measures.hpp"

using namespace wgf;

namespace {

// Φ⁻¹ by bisection on the erfc-based CDF.
double quantile_by_bisection(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::numbers::sqrt2);
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal quantile reference values") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.25) == doctest::Approx(-0.6744897501960817).epsilon(1e-15));
  CHECK(normal_quantile(1e-12) == doctest::Approx(-7.034483825301132).epsilon(1e-14));
  CHECK(normal_quantile(0.75) == -normal_quantile(0.25));
}

TEST_CASE("normal quantile agrees with bisection on erfc") {
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 1e-3, 0.01, 0.02425, 0.1, 0.3, 0.425, 0.49, 0.5001, 0.7, 0.9,
                   0.975, 0.999, 1.0 - 1e-9}) {
    const double ref = quantile_by_bisection(p);
    // the oracle is only as good as the conditioning of Φ at ref allows
    const double density = std::exp(-0.5 * ref * ref) / std::sqrt(2.0 * std::numbers::pi);
    const double tol = 1e-14 * std::abs(ref) + 4.0 * 2.3e-16 * std::max(p, 1e-300) / density;
    CHECK(std::abs(normal_quantile(p) - ref) <= tol);
  }
  CHECK_THROWS_AS(normal_quantile(0.0), PreconditionError);
  CHECK_THROWS_AS(normal_quantile(1.0), PreconditionError);
}

TEST_CASE("normal cdf inverts the quantile") {
  for (double p : {1e-10, 0.05, 0.5, 0.8, 0.999999}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
}

TEST_CASE("Gaussian measure invariants") {
  const GaussianMeasure g({1.0, 2.0}, {4.0, 9.0});
  CHECK(g.dim() == 2);
  CHECK(g.stddev(1) == 3.0);
  CHECK(GaussianMeasure::isotropic(3, 10.0, 100.0).variances() == std::vector<double>(3, 1e4));
  CHECK_THROWS_AS(GaussianMeasure({0.0}, {0.0}), PreconditionError);
  CHECK_THROWS_AS(GaussianMeasure({0.0}, {-1.0}), PreconditionError);
  CHECK_THROWS_AS(GaussianMeasure({0.0, 1.0}, {1.0}), PreconditionError);
  CHECK_THROWS_AS(GaussianMeasure({}, {}), PreconditionError);
  CHECK_THROWS_AS(GaussianMeasure({NAN}, {1.0}), PreconditionError);
}

TEST_CASE("quantile measure invariants") {
  const QuantileMeasure q({-1.0, 0.0, 2.0, 3.0});
  CHECK(q.size() == 4);
  CHECK(q.mean() == doctest::Approx(1.0));
  CHECK(q.variance() == doctest::Approx((4.0 + 1.0 + 1.0 + 4.0) / 4.0));
  CHECK(QuantileMeasure::node(0, 4) == 0.125);
  CHECK(QuantileMeasure::node(3, 4) == 0.875);
  CHECK_THROWS_AS(QuantileMeasure({1.0}), PreconditionError);
  CHECK_THROWS_AS(QuantileMeasure({1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(QuantileMeasure({2.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(QuantileMeasure({0.0, INFINITY}), PreconditionError);
}

TEST_CASE("particle cloud shape") {
  const ParticleCloud c(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(c(1, 2) == 6.0);
  CHECK(c.point(1)[0] == 4.0);
  CHECK_THROWS_AS(ParticleCloud(2, 3, {1, 2, 3}), PreconditionError);
  CHECK_THROWS_AS(ParticleCloud(0, 1, {}), PreconditionError);
}

TEST_CASE("gaussian_to_quantile places nodes at midpoint quantiles") {
  const auto q = gaussian_to_quantile(GaussianMeasure({2.0}, {9.0}), 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(q[i] == doctest::Approx(2.0 + 3.0 * quantile_by_bisection((i + 0.5) / 4.0)).epsilon(1e-13));
  CHECK_THROWS_AS(gaussian_to_quantile(GaussianMeasure({0.0, 0.0}, {1.0, 1.0}), 8), PreconditionError);
}

TEST_CASE("particles_to_quantile interpolates the empirical quantile") {
  const ParticleCloud c(2, 1, {3.0, 1.0});
  const auto q = particles_to_quantile(c, 2);
  CHECK(q[0] == doctest::Approx(1.5));
  CHECK(q[1] == doctest::Approx(2.5));
  const auto tied = particles_to_quantile(ParticleCloud(4, 1, {0.0, 1.0, 1.0, 1.0}), 8);
  for (std::size_t i = 1; i < tied.size(); ++i) CHECK(tied[i] > tied[i - 1]);
  CHECK_THROWS_AS(particles_to_quantile(ParticleCloud(3, 1, {1.0, 1.0, 1.0}), 4), PreconditionError);
}

TEST_CASE("sampling is seeded and matches the target moments") {
  const GaussianMeasure g({10.0, -1.0}, {1e4, 0.25});
  const auto a = sample_gaussian(g, 100000, Rng(42));
  const auto b = sample_gaussian(g, 100000, Rng(42), Exec::serial);
  CHECK(a == b);
  CHECK(a != sample_gaussian(g, 100000, Rng(43)));
  const auto m = empirical_moments(a);
  CHECK(std::abs(m.mean[0] - 10.0) < 5.0 * 100.0 / std::sqrt(1e5));
  CHECK(std::abs(m.mean[1] + 1.0) < 5.0 * 0.5 / std::sqrt(1e5));
  CHECK(m.variance[0] == doctest::Approx(1e4).epsilon(0.02));
  CHECK(m.variance[1] == doctest::Approx(0.25).epsilon(0.02));
  CHECK_THROWS_AS(empirical_moments(ParticleCloud(1, 1, {0.0})), PreconditionError);
}

TEST_CASE("rng streams") {
  const Rng r(5);
  CHECK(r.derive(1).seed() == r.derive(1).seed());
  CHECK(r.derive(1).seed() != r.derive(2).seed());
  auto e1 = r.engine(), e2 = Rng(5).engine();
  CHECK(e1() == e2());
}
