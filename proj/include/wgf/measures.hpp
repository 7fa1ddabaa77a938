#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wgf/kernels.hpp"

namespace wgf {

/// Product Gaussian N(mean, diag(variances)) on R^d.
class GaussianMeasure {
 public:
  GaussianMeasure(std::vector<double> mean, std::vector<double> variances);

  /// N(mean·1, std²·I) in dimension d.
  static GaussianMeasure isotropic(std::size_t dim, double mean, double std);

  std::size_t dim() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& variances() const { return variances_; }
  double stddev(std::size_t k) const;
  std::vector<double> stddevs() const;

  bool operator==(const GaussianMeasure&) const = default;

 private:
  std::vector<double> mean_;
  std::vector<double> variances_;
};

/// A 1D measure through its quantile function, sampled at midpoint nodes
/// u_i = (i − ½)/M. Values must be strictly increasing.
class QuantileMeasure {
 public:
  static constexpr std::size_t kMinNodes = 2;

  explicit QuantileMeasure(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Node location u_i for zero-based index i.
  static double node(std::size_t i, std::size_t m) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(m);
  }

  double mean() const;
  double variance() const;

  bool operator==(const QuantileMeasure&) const = default;

 private:
  std::vector<double> values_;
};

/// N equally weighted points in R^d, stored row-major.
class ParticleCloud {
 public:
  ParticleCloud(std::size_t n, std::size_t dim, std::vector<double> coords);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> coords() const { return coords_; }
  std::span<double> coords() { return coords_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  double operator()(std::size_t i, std::size_t k) const { return coords_[i * dim_ + k]; }

  bool operator==(const ParticleCloud&) const = default;

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Seeded source of randomness. Streams are Mersenne Twister (mt19937_64)
/// engines whose seeds are derived from (seed, stream index) by the
/// splitmix64 finalizer, so a given seed always yields the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Independent child generator; stream k of seed s is always the same.
  Rng derive(std::uint64_t stream) const { return Rng(kernels::derive_seed(seed_, stream)); }

  std::mt19937_64 engine() const { return std::mt19937_64(seed_); }

 private:
  std::uint64_t seed_;
};

/// Standard normal quantile Φ⁻¹(p), Wichura's AS241 (PPND16) rational
/// approximation; relative accuracy about 1e−16 on (0, 1).
double normal_quantile(double p);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

ParticleCloud sample_gaussian(const GaussianMeasure& g, std::size_t n, const Rng& rng,
                              Exec exec = Exec::parallel);

QuantileMeasure gaussian_to_quantile(const GaussianMeasure& g, std::size_t m);

/// Linear interpolation of the empirical quantile function (knots at
/// (j−1)/(N−1)) evaluated at the midpoint nodes. Ties are separated by a
/// minimum gap of 1e−12 · range.
QuantileMeasure particles_to_quantile(const ParticleCloud& c, std::size_t m);

struct Moments {
  std::vector<double> mean;
  std::vector<double> variance;  // 1/N normalized
};

Moments empirical_moments(const ParticleCloud& c, Exec exec = Exec::parallel);

}  // namespace wgf
