#include "wgf/jko.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wgf/errors.hpp"

namespace wgf {

using detail::require;

namespace {

#ifdef WGF_MUTATE_JKO_SIGN
// Deliberately wrong build used to check that the validator catches a sign
// error in the backward step.
constexpr double kEnergySign = -1.0;
#else
constexpr double kEnergySign = 1.0;
#endif

// Φ(Q) = H_disc(Q) + (1/M) Σ F(Q_i) + (w/2) Σ (Q_i − ν_i)²,  w = 1/(γM).
struct QuantileObjective {
  const InternalEnergy& energy;
  const Potential* potential = nullptr;
  const std::vector<double>* anchor = nullptr;
  double prox_weight = 0.0;
  std::size_t m = 0;

  double inv_m() const { return 1.0 / static_cast<double>(m); }

  double value(const std::vector<double>& q) const {
    std::vector<double> terms;
    terms.reserve(3 * m);
    for (std::size_t i = 0; i + 1 < m; ++i) terms.push_back(energy.spacing_term(q[i + 1] - q[i], m));
    if (potential)
      for (std::size_t i = 0; i < m; ++i) terms.push_back(inv_m() * potential->value_1d(q[i]));
    if (anchor)
      for (std::size_t i = 0; i < m; ++i) {
        const double d = q[i] - (*anchor)[i];
        terms.push_back(0.5 * prox_weight * d * d);
      }
    return kernels::pairwise_sum(terms);
  }

  void gradient(const std::vector<double>& q, std::vector<double>& g) const {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double d = kEnergySign * energy.spacing_first(q[i + 1] - q[i], m);
      g[i] -= d;
      g[i + 1] += d;
    }
    if (potential)
      for (std::size_t i = 0; i < m; ++i) g[i] += inv_m() * potential->derivative_1d(q[i]);
    if (anchor)
      for (std::size_t i = 0; i < m; ++i) g[i] += prox_weight * (q[i] - (*anchor)[i]);
  }

  // Tridiagonal Hessian: diag[i], off[i] couples (i, i+1).
  void hessian(const std::vector<double>& q, std::vector<double>& diag, std::vector<double>& off) const {
    std::fill(diag.begin(), diag.end(), prox_weight);
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double s = energy.spacing_second(q[i + 1] - q[i], m);
      diag[i] += s;
      diag[i + 1] += s;
      off[i] = -s;
    }
    if (potential)
      for (std::size_t i = 0; i < m; ++i) diag[i] += inv_m() * potential->second_1d(q[i]);
  }
};

bool strictly_increasing(const std::vector<double>& q) {
  for (std::size_t i = 0; i + 1 < q.size(); ++i)
    if (!(q[i + 1] > q[i])) return false;
  return true;
}

double max_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Solves the symmetric tridiagonal system (diag, off) x = rhs in place
// (Thomas elimination). Returns false on a nonpositive pivot.
bool solve_tridiagonal(std::vector<double> diag, const std::vector<double>& off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (!(diag[i - 1] > 0.0)) return false;
    const double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (!(diag[n - 1] > 0.0)) return false;
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
  return true;
}

JkoResult newton_minimize(const QuantileObjective& obj, std::vector<double> q, double scale,
                          const JkoOptions& options, const char* who) {
  const std::size_t m = q.size();
  const double tol = options.tol * std::max(1.0, scale);
  std::vector<double> g(m), diag(m), off(m > 0 ? m - 1 : 0), step(m), trial(m);

  const double start_value = obj.value(q);
  double value = start_value;
  JkoReport report;
  obj.gradient(q, g);
  report.kkt_residual = max_abs(g);

  while (report.kkt_residual > tol) {
    if (report.iterations >= options.max_iter)
      throw SolverFailure(std::string(who) + ": no convergence after " + std::to_string(options.max_iter) +
                          " Newton iterations (KKT residual " + std::to_string(report.kkt_residual) + ")");
    obj.hessian(q, diag, off);
    for (std::size_t i = 0; i < m; ++i) step[i] = -g[i];
    if (!solve_tridiagonal(diag, off, step))
      throw SolverFailure(std::string(who) + ": Hessian lost positive definiteness");

    double slope = 0.0;
    for (std::size_t i = 0; i < m; ++i) slope += g[i] * step[i];
    const double slack = 1e-13 * (1.0 + std::abs(value));

    double t = 1.0;
    double trial_value = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings, t *= 0.5) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = q[i] + t * step[i];
      if (!strictly_increasing(trial)) continue;
      trial_value = obj.value(trial);
      if (std::isfinite(trial_value) && trial_value <= value + 1e-4 * t * slope + slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw SolverFailure(std::string(who) + ": line search could not decrease the objective (KKT residual " +
                          std::to_string(report.kkt_residual) + ")");
    q.swap(trial);
    value = trial_value;
    ++report.iterations;
    obj.gradient(q, g);
    report.kkt_residual = max_abs(g);
  }
  // a few full steps past the tolerance while they still pay off
  for (int polish = 0; polish < 3 && report.kkt_residual > 0.0; ++polish) {
    obj.hessian(q, diag, off);
    for (std::size_t i = 0; i < m; ++i) step[i] = -g[i];
    if (!solve_tridiagonal(diag, off, step)) break;
    for (std::size_t i = 0; i < m; ++i) trial[i] = q[i] + step[i];
    if (!strictly_increasing(trial)) break;
    const double trial_value = obj.value(trial);
    if (!(trial_value <= value + 1e-13 * (1.0 + std::abs(value)))) break;
    obj.gradient(trial, step);
    const double residual = max_abs(step);
    if (!(residual < 0.5 * report.kkt_residual)) break;
    q.swap(trial);
    g.swap(step);
    value = trial_value;
    report.kkt_residual = residual;
  }
  report.objective_decrease = start_value - value;
  return {QuantileMeasure(std::move(q)), report};
}

}  // namespace

GaussianMeasure jko_entropy_gaussian(const GaussianMeasure& g, double gamma) {
  require(std::isfinite(gamma) && gamma > 0.0, "jko_entropy_gaussian: gamma must be > 0");
  std::vector<double> var(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    const double s = g.stddev(k);
    const double next = 0.5 * (s + kEnergySign * std::sqrt(s * s + 4.0 * gamma));
    var[k] = next * next;
  }
  return GaussianMeasure(g.mean(), std::move(var));
}

GaussianMeasure jko_full_gaussian(const Potential& f, const InternalEnergy& h, const GaussianMeasure& g,
                                  double gamma) {
  require(std::isfinite(gamma) && gamma > 0.0, "jko_full_gaussian: gamma must be > 0");
  require(f.is_quadratic() && f.dim() == g.dim(), "jko_full_gaussian: needs a quadratic potential of matching dimension");
  require(h.kind() != InternalEnergy::Kind::power, "jko_full_gaussian: power entropy has no Gaussian closed form");
  std::vector<double> mean(g.dim()), var(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    const double c = 1.0 + gamma * f.alpha()[k];
    mean[k] = (g.mean()[k] + gamma * f.alpha()[k] * f.anchor()[k]) / c;
    const double s = g.stddev(k);
    // (1 + γα) s'² − σ s' − γ = 0 for entropy; s' = σ/(1 + γα) without it
    const double next = h.is_zero() ? s / c : (s + kEnergySign * std::sqrt(s * s + 4.0 * gamma * c)) / (2.0 * c);
    var[k] = next * next;
  }
  return GaussianMeasure(std::move(mean), std::move(var));
}

JkoResult jko_quantile(const InternalEnergy& h, const QuantileMeasure& nu, double gamma, const JkoOptions& options) {
  require(std::isfinite(gamma) && gamma > 0.0, "jko_quantile: gamma must be > 0");
  if (h.is_zero()) return {nu, JkoReport{}};
  QuantileObjective obj{h, nullptr, &nu.values(), 1.0 / (gamma * static_cast<double>(nu.size())), nu.size()};
  return newton_minimize(obj, nu.values(), max_abs(nu.values()), options, "jko_quantile");
}

JkoResult jko_backward_full(const Potential& f, const InternalEnergy& h, const QuantileMeasure& nu, double gamma,
                            const JkoOptions& options) {
  require(std::isfinite(gamma) && gamma > 0.0, "jko_backward_full: gamma must be > 0");
  require(f.dim() == 1, "jko_backward_full: potential must be 1D");
  require(f.strong_convexity() >= 0.0, "jko_backward_full: potential must be convex");
  QuantileObjective obj{h, &f, &nu.values(), 1.0 / (gamma * static_cast<double>(nu.size())), nu.size()};
  return newton_minimize(obj, nu.values(), max_abs(nu.values()), options, "jko_backward_full");
}

JkoResult gibbs_quantile(const Potential& f, const InternalEnergy& h, std::size_t m, const JkoOptions& options) {
  require(f.dim() == 1, "gibbs_quantile: potential must be 1D");
  require(!h.is_zero(), "gibbs_quantile: zero energy has no absolutely continuous minimizer");
  require(m >= QuantileMeasure::kMinNodes, "gibbs_quantile: too few nodes");
  const GaussianMeasure start =
      f.is_quadratic() ? gibbs_target(f) : GaussianMeasure({0.0}, {1.0 / std::max(f.strong_convexity(), 1e-2)});
  QuantileObjective obj{h, &f, nullptr, 0.0, m};
  auto q0 = gaussian_to_quantile(start, m).values();
  const double scale = max_abs(q0);
  return newton_minimize(obj, std::move(q0), scale, options, "gibbs_quantile");
}

ParticleCloud jko_affine_particles(const ParticleCloud& c, double gamma, Exec exec) {
  require(std::isfinite(gamma) && gamma > 0.0, "jko_affine_particles: gamma must be > 0");
  const auto moments = empirical_moments(c, exec);
  const std::size_t d = c.dim();
  std::vector<double> factor(d);
  for (std::size_t k = 0; k < d; ++k) {
    require(moments.variance[k] > 0.0, "jko_affine_particles: zero empirical variance");
    const double s = std::sqrt(moments.variance[k]);
    factor[k] = 0.5 * (s + kEnergySign * std::sqrt(s * s + 4.0 * gamma)) / s;
  }
  ParticleCloud out = c;
  kernels::affine_columns(out.coords(), out.size(), d, moments.mean, factor, exec);
  return out;
}

}  // namespace wgf
