#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "wgf/kernels.hpp"

using namespace wgf;
using namespace wgf::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(eng);
  return v;
}

// Forces several OpenMP threads even on a single-core machine.
struct ThreadScope {
  int saved = omp_get_max_threads();
  explicit ThreadScope(int n) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("pairwise_sum matches an extended-precision accumulation") {
  const auto v = random_values(100003, 1);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  CHECK(std::abs(pairwise_sum(v) - static_cast<double>(ref)) <= 1e-10);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{2.5}) == 2.5);
}

TEST_CASE("column moments against a two-pass oracle") {
  const std::size_t n = 9001, d = 3;
  const auto rows = random_values(n * d, 2);
  const auto m = column_moments(rows, n, d, Exec::serial);
  for (std::size_t k = 0; k < d; ++k) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += rows[i * d + k];
    const long double mean = s / n;
    long double q = 0.0L;
    for (std::size_t i = 0; i < n; ++i) q += (rows[i * d + k] - mean) * (rows[i * d + k] - mean);
    CHECK(m.mean[k] == doctest::Approx(static_cast<double>(mean)).epsilon(1e-13));
    CHECK(m.variance[k] == doctest::Approx(static_cast<double>(q / n)).epsilon(1e-13));
  }
}

TEST_CASE("serial and parallel kernels are bit-identical") {
  ThreadScope threads(4);
  const std::size_t n = 3 * kBlock + 17, d = 2;

  SUBCASE("moments") {
    const auto rows = random_values(n * d, 3);
    const auto a = column_moments(rows, n, d, Exec::serial);
    const auto b = column_moments(rows, n, d, Exec::parallel);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
  }
  SUBCASE("normal sampling") {
    std::vector<double> a(n * d), b(n * d);
    fill_standard_normal(a, 42, Exec::serial);
    fill_standard_normal(b, 42, Exec::parallel);
    CHECK(a == b);
    std::vector<double> c(n * d);
    fill_standard_normal(c, 43, Exec::serial);
    CHECK(a != c);
  }
  SUBCASE("maps") {
    const auto base = random_values(n * d, 4);
    auto a = base, b = base;
    const GradientFn grad = [](std::span<const double> x, std::span<double> g) {
      for (std::size_t k = 0; k < x.size(); ++k) g[k] = 2.0 * x[k] + 1.0;
    };
    gradient_step(a, n, d, grad, 0.1, Exec::serial);
    gradient_step(b, n, d, grad, 0.1, Exec::parallel);
    CHECK(a == b);
    const std::vector<double> center{0.5, -1.0}, factor{0.3, 2.0};
    affine_columns(a, n, d, center, factor, Exec::serial);
    affine_columns(b, n, d, center, factor, Exec::parallel);
    CHECK(a == b);
    const auto noise = random_values(n * d, 5);
    add_scaled(a, noise, 0.7, Exec::serial);
    add_scaled(b, noise, 0.7, Exec::parallel);
    CHECK(a == b);
    node_gradient_step(a, [](double x) { return std::sin(x); }, 0.2, Exec::serial);
    node_gradient_step(b, [](double x) { return std::sin(x); }, 0.2, Exec::parallel);
    CHECK(a == b);
  }
  SUBCASE("distance matrix") {
    const std::size_t m = 300;
    const auto x = random_values(m * 3, 6), y = random_values(m * 3, 7);
    const auto a = squared_distance_matrix(x, y, m, 3, Exec::serial);
    const auto b = squared_distance_matrix(x, y, m, 3, Exec::parallel);
    CHECK(a == b);
    double direct = 0.0;
    for (std::size_t k = 0; k < 3; ++k) direct += (x[5 * 3 + k] - y[9 * 3 + k]) * (x[5 * 3 + k] - y[9 * 3 + k]);
    CHECK(a[5 * m + 9] == doctest::Approx(direct).epsilon(1e-15));
  }
}

TEST_CASE("standard normal blocks have the right moments") {
  std::vector<double> z(200000);
  fill_standard_normal(z, 99);
  const auto m = column_moments(z, z.size(), 1);
  CHECK(std::abs(m.mean[0]) < 0.01);
  CHECK(std::abs(m.variance[0] - 1.0) < 0.01);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}
