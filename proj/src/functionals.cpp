#include "wgf/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "wgf/errors.hpp"

namespace wgf {

using detail::require;

Potential Potential::quadratic(std::vector<double> alpha, std::vector<double> anchor) {
  require(!alpha.empty(), "Potential: dimension must be >= 1");
  require(alpha.size() == anchor.size(), "Potential: alpha/anchor length mismatch");
  for (double a : alpha) require(std::isfinite(a) && a > 0.0, "Potential: curvatures must be > 0");
  for (double a : anchor) require(std::isfinite(a), "Potential: non-finite anchor");
  Potential p;
  p.kind_ = Kind::quadratic;
  p.smoothness_ = *std::max_element(alpha.begin(), alpha.end());
  p.strong_convexity_ = *std::min_element(alpha.begin(), alpha.end());
  p.alpha_ = std::move(alpha);
  p.anchor_ = std::move(anchor);
  return p;
}

Potential Potential::isotropic_quadratic(std::size_t dim, double alpha, double anchor) {
  return quadratic(std::vector<double>(dim, alpha), std::vector<double>(dim, anchor));
}

Potential Potential::custom_1d(Fn1D value, Fn1D derivative, Fn1D second, double smoothness,
                               double strong_convexity, double probe_radius, std::uint64_t probe_seed) {
  require(value && derivative, "Potential: custom potentials need F and F'");
  require(std::isfinite(smoothness) && smoothness > 0.0, "Potential: L must be > 0");
  require(std::isfinite(strong_convexity) && strong_convexity >= 0.0 && strong_convexity <= smoothness,
          "Potential: need 0 <= lambda <= L");
  Potential p;
  p.kind_ = Kind::custom;
  p.value_fn_ = std::move(value);
  p.derivative_fn_ = std::move(derivative);
  p.second_fn_ = std::move(second);
  p.smoothness_ = smoothness;
  p.strong_convexity_ = strong_convexity;
  const auto probe = probe_potential_constants(p, 1000, probe_radius, probe_seed);
  require(probe.smoothness_violation <= 0.0,
          "Potential: declared L violates the smoothness inequality on a probed pair");
  require(probe.convexity_violation <= 0.0,
          "Potential: declared lambda violates the strong-convexity inequality on a probed pair");
  return p;
}

double Potential::value(std::span<const double> x) const {
  require(x.size() == dim(), "Potential: dimension mismatch");
  if (kind_ == Kind::custom) return value_fn_(x[0]);
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double c = x[k] - anchor_[k];
    s += 0.5 * alpha_[k] * c * c;
  }
  return s;
}

void Potential::gradient(std::span<const double> x, std::span<double> out) const {
  if (kind_ == Kind::custom) {
    out[0] = derivative_fn_(x[0]);
    return;
  }
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = alpha_[k] * (x[k] - anchor_[k]);
}

double Potential::value_1d(double x) const {
  if (kind_ == Kind::custom) return value_fn_(x);
  const double c = x - anchor_[0];
  return 0.5 * alpha_[0] * c * c;
}

double Potential::derivative_1d(double x) const {
  if (kind_ == Kind::custom) return derivative_fn_(x);
  return alpha_[0] * (x - anchor_[0]);
}

double Potential::second_1d(double x) const {
  if (kind_ == Kind::quadratic) return alpha_[0];
  if (second_fn_) return second_fn_(x);
  const double h = 1e-5 * (1.0 + std::abs(x));
  return (derivative_fn_(x + h) - derivative_fn_(x - h)) / (2.0 * h);
}

PotentialProbe probe_potential_constants(const Potential& f, std::size_t pairs, double radius,
                                         std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> coord(-radius, radius);
  const std::size_t d = f.dim();
  std::vector<double> x(d), y(d), g(d);
  PotentialProbe out{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t p = 0; p < pairs; ++p) {
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = coord(engine);
      y[k] = coord(engine);
    }
    const double fx = f.value(x);
    const double fy = f.value(y);
    f.gradient(x, g);
    double inner = 0.0, dist2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      inner += g[k] * (y[k] - x[k]);
      dist2 += (y[k] - x[k]) * (y[k] - x[k]);
    }
    const double slack = 1e-9 * (1.0 + std::abs(fx) + std::abs(fy) + std::abs(inner) +
                                 f.smoothness() * dist2);
    // smoothness: F(y) − F(x) − ⟨∇F(x), y − x⟩ − (L/2)|x − y|² ≤ 0
    out.smoothness_violation =
        std::max(out.smoothness_violation, fy - fx - inner - 0.5 * f.smoothness() * dist2 - slack);
    // strong convexity: F(x) − F(y) + ⟨∇F(x), y − x⟩ + (λ/2)|x − y|² ≤ 0
    out.convexity_violation = std::max(
        out.convexity_violation, fx - fy + inner + 0.5 * f.strong_convexity() * dist2 - slack);
  }
  return out;
}

InternalEnergy InternalEnergy::power(double exponent) {
  require(std::isfinite(exponent) && exponent > 1.0, "InternalEnergy: power exponent must be > 1");
  return InternalEnergy(Kind::power, exponent);
}

std::string InternalEnergy::name() const {
  switch (kind_) {
    case Kind::negative_entropy:
      return "entropy";
    case Kind::power: {
      std::string s = std::to_string(exponent_);
      s.erase(s.find_last_not_of('0') + 1);
      if (s.back() == '.') s.pop_back();
      return "power:" + s;
    }
    case Kind::zero:
      return "zero";
  }
  return {};
}

double InternalEnergy::spacing_term(double gap, std::size_t m) const {
  const double mm = static_cast<double>(m);
  switch (kind_) {
    case Kind::negative_entropy:
      return -std::log(mm * gap) / mm;
    case Kind::power:
      return std::pow(mm * gap, 1.0 - exponent_) / ((exponent_ - 1.0) * mm);
    case Kind::zero:
      return 0.0;
  }
  return 0.0;
}

double InternalEnergy::spacing_first(double gap, std::size_t m) const {
  const double mm = static_cast<double>(m);
  switch (kind_) {
    case Kind::negative_entropy:
      return -1.0 / (mm * gap);
    case Kind::power:
      return -std::pow(mm * gap, -exponent_);
    case Kind::zero:
      return 0.0;
  }
  return 0.0;
}

double InternalEnergy::spacing_second(double gap, std::size_t m) const {
  const double mm = static_cast<double>(m);
  switch (kind_) {
    case Kind::negative_entropy:
      return 1.0 / (mm * gap * gap);
    case Kind::power:
      return exponent_ * mm * std::pow(mm * gap, -exponent_ - 1.0);
    case Kind::zero:
      return 0.0;
  }
  return 0.0;
}

double potential_energy(const Potential& f, const GaussianMeasure& g) {
  require(f.is_quadratic(), "potential_energy: Gaussian evaluation needs a quadratic potential");
  require(f.dim() == g.dim(), "potential_energy: dimension mismatch");
  std::vector<double> terms(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    const double c = g.mean()[k] - f.anchor()[k];
    terms[k] = 0.5 * f.alpha()[k] * (c * c + g.variances()[k]);
  }
  return kernels::pairwise_sum(terms);
}

double potential_energy(const Potential& f, const QuantileMeasure& q) {
  require(f.dim() == 1, "potential_energy: quantile measures are 1D");
  std::vector<double> terms(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) terms[i] = f.value_1d(q[i]);
  return kernels::pairwise_sum(terms) / static_cast<double>(q.size());
}

double potential_energy(const Potential& f, const ParticleCloud& c) {
  require(f.dim() == c.dim(), "potential_energy: dimension mismatch");
  std::vector<double> terms(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) terms[i] = f.value(c.point(i));
  return kernels::pairwise_sum(terms) / static_cast<double>(c.size());
}

double gradient_norm_sq(const Potential& f, const GaussianMeasure& g) {
  require(f.is_quadratic(), "gradient_norm_sq: Gaussian evaluation needs a quadratic potential");
  require(f.dim() == g.dim(), "gradient_norm_sq: dimension mismatch");
  std::vector<double> terms(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    const double c = g.mean()[k] - f.anchor()[k];
    const double a = f.alpha()[k];
    terms[k] = a * a * (c * c + g.variances()[k]);
  }
  return kernels::pairwise_sum(terms);
}

double gradient_norm_sq(const Potential& f, const QuantileMeasure& q) {
  require(f.dim() == 1, "gradient_norm_sq: quantile measures are 1D");
  std::vector<double> terms(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double g = f.derivative_1d(q[i]);
    terms[i] = g * g;
  }
  return kernels::pairwise_sum(terms) / static_cast<double>(q.size());
}

double energy_value(const InternalEnergy& h, const GaussianMeasure& g) {
  switch (h.kind()) {
    case InternalEnergy::Kind::zero:
      return 0.0;
    case InternalEnergy::Kind::negative_entropy: {
      std::vector<double> terms(g.dim());
      for (std::size_t k = 0; k < g.dim(); ++k)
        terms[k] = -0.5 * (1.0 + std::log(2.0 * std::numbers::pi * g.variances()[k]));
      return kernels::pairwise_sum(terms);
    }
    case InternalEnergy::Kind::power: {
      // ∫ρ^m = Π_k (2πσ_k²)^{(1−m)/2} m^{−1/2}
      const double m = h.exponent();
      double log_integral = 0.0;
      for (std::size_t k = 0; k < g.dim(); ++k)
        log_integral += 0.5 * (1.0 - m) * std::log(2.0 * std::numbers::pi * g.variances()[k]) -
                        0.5 * std::log(m);
      return std::exp(log_integral) / (m - 1.0);
    }
  }
  return 0.0;
}

double energy_value(const InternalEnergy& h, const QuantileMeasure& q) {
  if (h.is_zero()) return 0.0;
  const std::size_t m = q.size();
  std::vector<double> terms(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) terms[i] = h.spacing_term(q[i + 1] - q[i], m);
  return kernels::pairwise_sum(terms);
}

std::vector<double> energy_gradient(const InternalEnergy& h, const QuantileMeasure& q) {
  const std::size_t m = q.size();
  std::vector<double> g(m, 0.0);
  if (h.is_zero()) return g;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double d = h.spacing_first(q[i + 1] - q[i], m);
    g[i] -= d;
    g[i + 1] += d;
  }
  return g;
}

std::vector<double> wasserstein_subgradient(const InternalEnergy& h, const QuantileMeasure& q) {
  auto g = energy_gradient(h, q);
  for (double& v : g) v *= static_cast<double>(q.size());
  return g;
}

double objective(const Potential& f, const InternalEnergy& h, const GaussianMeasure& g) {
  return potential_energy(f, g) + energy_value(h, g);
}

double objective(const Potential& f, const InternalEnergy& h, const QuantileMeasure& q) {
  return potential_energy(f, q) + energy_value(h, q);
}

std::size_t smoothing_nodes(std::size_t particles) {
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(particles))));
  return std::max<std::size_t>(8, root);
}

std::optional<double> objective(const Potential& f, const InternalEnergy& h, const ParticleCloud& c) {
  const double ef = potential_energy(f, c);
  if (h.is_zero()) return ef;
  if (c.dim() != 1) return std::nullopt;
  return ef + energy_value(h, particles_to_quantile(c, smoothing_nodes(c.size())));
}

namespace {

double checked_gap(double value, double target_value) {
  const double gap = value - target_value;
  if (!(gap >= -kGapNegativeTolerance))
    throw InconsistencyError("objective_gap_to_target: the target was beaten by " +
                             std::to_string(-gap) + "; it is not the minimizer");
  return gap;
}

}  // namespace

double objective_gap_to_target(const Potential& f, const InternalEnergy& h, const GaussianMeasure& mu,
                               const GaussianMeasure& target) {
  return checked_gap(objective(f, h, mu), objective(f, h, target));
}

double objective_gap_to_target(const Potential& f, const InternalEnergy& h, const QuantileMeasure& mu,
                               const QuantileMeasure& target) {
  require(mu.size() == target.size(), "objective_gap_to_target: node counts differ");
  return checked_gap(objective(f, h, mu), objective(f, h, target));
}

GaussianMeasure gibbs_target(const Potential& f) {
  require(f.is_quadratic(),
          "gibbs_target: no closed-form minimizer for a custom potential; supply the target explicitly");
  std::vector<double> var(f.dim());
  for (std::size_t k = 0; k < f.dim(); ++k) var[k] = 1.0 / f.alpha()[k];
  return GaussianMeasure(f.anchor(), std::move(var));
}

}  // namespace wgf
