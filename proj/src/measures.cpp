#include "wgf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wgf/errors.hpp"

namespace wgf {

using detail::require;

GaussianMeasure::GaussianMeasure(std::vector<double> mean, std::vector<double> variances)
    : mean_(std::move(mean)), variances_(std::move(variances)) {
  require(!mean_.empty(), "GaussianMeasure: dimension must be >= 1");
  require(mean_.size() == variances_.size(), "GaussianMeasure: mean/variance length mismatch");
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    require(std::isfinite(mean_[k]), "GaussianMeasure: non-finite mean");
    require(std::isfinite(variances_[k]) && variances_[k] > 0.0,
            "GaussianMeasure: variances must be finite and strictly positive");
  }
}

GaussianMeasure GaussianMeasure::isotropic(std::size_t dim, double mean, double std) {
  return GaussianMeasure(std::vector<double>(dim, mean), std::vector<double>(dim, std * std));
}

double GaussianMeasure::stddev(std::size_t k) const { return std::sqrt(variances_[k]); }

std::vector<double> GaussianMeasure::stddevs() const {
  std::vector<double> s(dim());
  for (std::size_t k = 0; k < dim(); ++k) s[k] = stddev(k);
  return s;
}

QuantileMeasure::QuantileMeasure(std::vector<double> values) : values_(std::move(values)) {
  require(values_.size() >= kMinNodes,
          "QuantileMeasure: need at least " + std::to_string(kMinNodes) + " nodes");
  for (double v : values_) require(std::isfinite(v), "QuantileMeasure: non-finite value");
  for (std::size_t i = 0; i + 1 < values_.size(); ++i)
    require(values_[i + 1] > values_[i], "QuantileMeasure: values must be strictly increasing");
}

double QuantileMeasure::mean() const {
  return kernels::pairwise_sum(values_) / static_cast<double>(size());
}

double QuantileMeasure::variance() const {
  const double m = mean();
  std::vector<double> sq(size());
  for (std::size_t i = 0; i < size(); ++i) sq[i] = (values_[i] - m) * (values_[i] - m);
  return kernels::pairwise_sum(sq) / static_cast<double>(size());
}

ParticleCloud::ParticleCloud(std::size_t n, std::size_t dim, std::vector<double> coords)
    : n_(n), dim_(dim), coords_(std::move(coords)) {
  require(n_ >= 1, "ParticleCloud: need at least one particle");
  require(dim_ >= 1, "ParticleCloud: dimension must be >= 1");
  require(coords_.size() == n_ * dim_, "ParticleCloud: coordinate count != n * dim");
  for (double v : coords_) require(std::isfinite(v), "ParticleCloud: non-finite coordinate");
}

// Wichura, "Algorithm AS 241: The percentage points of the normal
// distribution", Applied Statistics 37 (1988).
double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0, 1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

ParticleCloud sample_gaussian(const GaussianMeasure& g, std::size_t n, const Rng& rng, Exec exec) {
  require(n >= 1, "sample_gaussian: n must be >= 1");
  const std::size_t d = g.dim();
  std::vector<double> coords(n * d);
  kernels::fill_standard_normal(coords, rng.seed(), exec);
  const auto sd = g.stddevs();
  // z ↦ m + σ z, reusing the affine kernel with a zero center
  std::vector<double> zero(d, 0.0);
  kernels::affine_columns(coords, n, d, zero, sd, exec);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) coords[i * d + k] += g.mean()[k];
  return ParticleCloud(n, d, std::move(coords));
}

QuantileMeasure gaussian_to_quantile(const GaussianMeasure& g, std::size_t m) {
  require(g.dim() == 1, "gaussian_to_quantile: dimension must be 1");
  require(m >= QuantileMeasure::kMinNodes, "gaussian_to_quantile: too few nodes");
  const double mu = g.mean()[0];
  const double sd = g.stddev(0);
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) q[i] = mu + sd * normal_quantile(QuantileMeasure::node(i, m));
  return QuantileMeasure(std::move(q));
}

QuantileMeasure particles_to_quantile(const ParticleCloud& c, std::size_t m) {
  require(c.dim() == 1, "particles_to_quantile: dimension must be 1");
  require(m >= QuantileMeasure::kMinNodes, "particles_to_quantile: too few nodes");
  std::vector<double> x(c.coords().begin(), c.coords().end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  require(range > 0.0, "particles_to_quantile: all points identical (degenerate measure)");

  const std::size_t n = x.size();
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double h = QuantileMeasure::node(i, m) * static_cast<double>(n - 1);
    const auto lo = std::min(static_cast<std::size_t>(h), n - 2);
    const double t = h - static_cast<double>(lo);
    q[i] = x[lo] + t * (x[lo + 1] - x[lo]);
  }
  const double gap = 1e-12 * range;
  for (std::size_t i = 1; i < m; ++i) q[i] = std::max(q[i], q[i - 1] + gap);
  return QuantileMeasure(std::move(q));
}

Moments empirical_moments(const ParticleCloud& c, Exec exec) {
  require(c.size() >= 2, "empirical_moments: need at least 2 particles");
  auto m = kernels::column_moments(c.coords(), c.size(), c.dim(), exec);
  return {std::move(m.mean), std::move(m.variance)};
}

}  // namespace wgf
