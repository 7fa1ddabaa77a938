#include "wgf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wgf/errors.hpp"
#include "wgf/wasserstein.hpp"

namespace wgf {

using detail::require;

Tolerance Tolerance::for_log(const TrajectoryLog& log) {
  return log.config.representation == Representation::gaussian ? closed_form() : discretized();
}

void InequalityReport::add(std::size_t n, double residual, double tolerance) {
  iterations.push_back(n);
  residuals.push_back(residual);
  tolerances.push_back(tolerance);
}

void InequalityReport::finalize(const std::vector<double>& w2_level, double w2_floor_value) {
  worst_residual = -std::numeric_limits<double>::infinity();
  worst_excess = -std::numeric_limits<double>::infinity();
  pass = true;
  floor_limited = false;
  const std::size_t count = residuals.size();
  const std::size_t tail_start = count - std::min<std::size_t>(count, std::max<std::size_t>(1, count / 10));
  for (std::size_t k = 0; k < count; ++k) {
    const double r = residuals[k];
    const double excess = r - tolerances[k];
    if (!std::isfinite(r)) {
      pass = false;
      worst_residual = std::numeric_limits<double>::quiet_NaN();
      worst_excess = std::numeric_limits<double>::infinity();
      continue;
    }
    worst_residual = std::max(worst_residual, r);
    worst_excess = std::max(worst_excess, excess);
    if (excess <= 0.0) continue;
    const bool at_floor = k < w2_level.size() && k >= tail_start && w2_level[k] <= w2_floor_value &&
                          r <= 2.0 * tolerances[k];
    if (at_floor)
      floor_limited = true;
    else
      pass = false;
  }
  if (count == 0) {
    worst_residual = 0.0;
    worst_excess = 0.0;
  }
}

namespace {

const QuantileMeasure* first_quantile_state(const TrajectoryLog& log) {
  for (const auto& r : log.records)
    if (r.state)
      if (const auto* q = std::get_if<QuantileMeasure>(&*r.state)) return q;
  return nullptr;
}

// Puts π into the representation the log's states use.
Measure align(const Measure& pi, const TrajectoryLog& log) {
  if (const auto* g = std::get_if<GaussianMeasure>(&pi)) {
    if (const auto* q = first_quantile_state(log)) return gaussian_to_quantile(*g, q->size());
  }
  return pi;
}

double potential_term(const Potential& f, const Measure& mu) {
  return std::visit([&](const auto& m) { return potential_energy(f, m); }, mu);
}

double energy_term(const InternalEnergy& h, const Measure& mu) {
  if (const auto* g = std::get_if<GaussianMeasure>(&mu)) return energy_value(h, *g);
  if (const auto* q = std::get_if<QuantileMeasure>(&mu)) return energy_value(h, *q);
  const auto& c = std::get<ParticleCloud>(mu);
  if (h.is_zero()) return 0.0;
  require(c.dim() == 1, "diagnostics: internal energy of a particle cloud is only defined in 1D");
  return energy_value(h, particles_to_quantile(c, smoothing_nodes(c.size())));
}

double objective_term(const TrajectoryLog& log, const Measure& mu) {
  return potential_term(log.config.potential, mu) + energy_term(log.config.energy, mu);
}

double grad_norm_term(const Potential& f, const Measure& mu) {
  if (const auto* g = std::get_if<GaussianMeasure>(&mu)) return gradient_norm_sq(f, *g);
  if (const auto* q = std::get_if<QuantileMeasure>(&mu)) return gradient_norm_sq(f, *q);
  const auto& c = std::get<ParticleCloud>(mu);
  std::vector<double> g(c.dim()), terms(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    f.gradient(c.point(i), g);
    double s = 0.0;
    for (double v : g) s += v * v;
    terms[i] = s;
  }
  return kernels::pairwise_sum(terms) / static_cast<double>(c.size());
}

double max_abs(std::initializer_list<double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

// Consecutive (n, n+1) record pairs that both carry a stored state.
std::vector<std::size_t> consecutive_state_pairs(const TrajectoryLog& log, bool need_intermediate) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k + 1 < log.records.size(); ++k) {
    const auto& a = log.records[k];
    const auto& b = log.records[k + 1];
    if (!a.state || !b.state) continue;
    if (need_intermediate && !b.intermediate) continue;
    out.push_back(k);
  }
  return out;
}

}  // namespace

double w2_between(const Measure& a, const Measure& b) {
  if (const auto* ga = std::get_if<GaussianMeasure>(&a)) {
    if (const auto* gb = std::get_if<GaussianMeasure>(&b)) return w2_gaussian(*ga, *gb);
    if (const auto* qb = std::get_if<QuantileMeasure>(&b)) return w2_quantile(gaussian_to_quantile(*ga, qb->size()), *qb);
    return w2_gaussian(*ga, moment_gaussian(std::get<ParticleCloud>(b)));
  }
  if (const auto* qa = std::get_if<QuantileMeasure>(&a)) {
    if (const auto* qb = std::get_if<QuantileMeasure>(&b)) return w2_quantile(*qa, *qb);
    if (const auto* gb = std::get_if<GaussianMeasure>(&b)) return w2_quantile(*qa, gaussian_to_quantile(*gb, qa->size()));
    throw PreconditionError("w2_between: quantile vs particle comparison is not supported");
  }
  const auto& ca = std::get<ParticleCloud>(a);
  if (const auto* gb = std::get_if<GaussianMeasure>(&b)) return w2_gaussian(moment_gaussian(ca), *gb);
  if (const auto* cb = std::get_if<ParticleCloud>(&b)) {
    if (ca.dim() == 1) return w2_particles_1d(ca, *cb);
    return w2_particles_exact(ca, *cb);
  }
  throw PreconditionError("w2_between: particle vs quantile comparison is not supported");
}

double w2_floor(const TrajectoryLog& log) {
  double scale = 1.0;
  if (!log.records.empty() && log.records.front().w2_to_target) scale += *log.records.front().w2_to_target;
  // closed form: W² is exact down to ~(1e4·eps)² relative; discretized runs
  // are limited by the Newton stopping tolerance
  return log.config.representation == Representation::gaussian ? 1e-24 * scale : 1e-16 * scale;
}

InequalityReport descent_check(const TrajectoryLog& log, std::optional<double> tol) {
  InequalityReport rep;
  rep.name = "descent";
  require(!log.records.empty() && log.records.front().objective.has_value(),
          "descent_check: objective not available for this log");
  const double g0 = *log.records.front().objective;
  const double t = tol.value_or(log.config.representation == Representation::gaussian ? 1e-8
                                                                                      : 1e-4 * (1.0 + std::abs(g0)));
  for (std::size_t k = 0; k + 1 < log.records.size(); ++k) {
    const auto& a = log.records[k];
    const auto& b = log.records[k + 1];
    if (!a.objective || !b.objective) continue;
    rep.add(b.n, *b.objective - *a.objective, t);
  }
  rep.finalize();
  return rep;
}

InequalityReport evi_check(const TrajectoryLog& log, const Measure& pi_in, double lambda, double gamma,
                           std::optional<Tolerance> tol) {
  InequalityReport rep;
  rep.name = "evi";
  const Tolerance t = tol.value_or(Tolerance::for_log(log));
  const auto pairs = consecutive_state_pairs(log, false);
  require(!pairs.empty(), "evi_check: the log has no consecutive stored states (set snapshot_every = 1)");
  const Measure pi = align(pi_in, log);
  const double g_pi = objective_term(log, pi);
  std::vector<double> level;
  for (std::size_t k : pairs) {
    const auto& cur = *log.records[k].state;
    const auto& next = *log.records[k + 1].state;
    const double w_next = w2_between(next, pi);
    const double w_cur = (1.0 - gamma * lambda) * w2_between(cur, pi);
    const double gap = 2.0 * gamma * (objective_term(log, next) - g_pi);
    rep.add(log.records[k + 1].n, w_next - w_cur + gap, t.at(max_abs({w_next, w_cur, gap})));
    level.push_back(w_next);
  }
  rep.finalize(level, w2_floor(log));
  return rep;
}

std::pair<InequalityReport, InequalityReport> half_step_evi_checks(const TrajectoryLog& log, const Measure& pi_in,
                                                                   double lambda, double gamma,
                                                                   std::optional<Tolerance> tol) {
  InequalityReport prox, grad;
  prox.name = "evi-prox";
  grad.name = "evi-grad";
  const Tolerance t = tol.value_or(Tolerance::for_log(log));
  const auto pairs = consecutive_state_pairs(log, true);
  require(!pairs.empty(), "half_step_evi_checks: missing intermediate (forward half-step) snapshots");
  const Measure pi = align(pi_in, log);
  const auto& f = log.config.potential;
  const auto& h = log.config.energy;
  const double h_pi = energy_term(h, pi);
  const double ef_pi = potential_term(f, pi);
  std::vector<double> level;
  for (std::size_t k : pairs) {
    const auto& mu = *log.records[k].state;
    const auto& mu_next = *log.records[k + 1].state;
    const auto& nu = *log.records[k + 1].intermediate;
    const double w_mu_next = w2_between(mu_next, pi);
    const double w_nu = w2_between(nu, pi);
    const double w_mu = w2_between(mu, pi);
    const std::size_t n = log.records[k + 1].n;

    // W²(μ_{n+1}, π) ≤ W²(ν_{n+1}, π) − 2γ(H(μ_{n+1}) − H(π))
    const double dh = 2.0 * gamma * (energy_term(h, mu_next) - h_pi);
    prox.add(n, w_mu_next - w_nu + dh, t.at(max_abs({w_mu_next, w_nu, dh})));

    // W²(ν_{n+1}, π) ≤ (1 − γλ)W²(μ_n, π) − 2γ(E_F(μ_n) − E_F(π)) + γ²‖∇F‖²_{μ_n}
    const double contracted = (1.0 - gamma * lambda) * w_mu;
    const double df = 2.0 * gamma * (potential_term(f, mu) - ef_pi);
    const double g2 = gamma * gamma * grad_norm_term(f, mu);
    grad.add(n, w_nu - contracted + df - g2, t.at(max_abs({w_nu, contracted, df, g2})));
    level.push_back(std::min(w_mu_next, w_nu));
  }
  const double floor = w2_floor(log);
  prox.finalize(level, floor);
  grad.finalize(level, floor);
  return {std::move(prox), std::move(grad)};
}

InequalityReport rate_check_convex(const TrajectoryLog& log, double gamma, std::optional<Tolerance> tol) {
  InequalityReport rep;
  rep.name = "rate-convex";
  require(log.target.has_value() && !log.records.empty() && log.records.front().w2_to_target,
          "rate_check_convex: the minimizer is unknown for this configuration");
  const Tolerance t = tol.value_or(Tolerance::for_log(log));
  const double w0 = *log.records.front().w2_to_target;
  for (const auto& r : log.records) {
    if (r.n == 0 || !r.objective_gap) continue;
    const double bound = w0 / (2.0 * gamma * static_cast<double>(r.n));
    rep.add(r.n, *r.objective_gap - bound, t.at(max_abs({*r.objective_gap, bound})));
  }
  rep.finalize();
  return rep;
}

std::optional<double> fitted_contraction(const std::vector<double>& w2, double floor) {
  double log_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 1; n < w2.size(); ++n) {
    if (!(w2[n - 1] > floor) || !(w2[n] > floor)) continue;
    log_sum += std::log(w2[n] / w2[n - 1]);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return std::exp(log_sum / static_cast<double>(count));
}

InequalityReport rate_check_strongly_convex(const TrajectoryLog& log, double gamma, double lambda,
                                            std::optional<Tolerance> tol) {
  require(lambda > 0.0, "rate_check_strongly_convex: lambda must be > 0");
  require(log.target.has_value() && !log.records.empty() && log.records.front().w2_to_target,
          "rate_check_strongly_convex: the minimizer is unknown for this configuration");
  InequalityReport rep;
  rep.name = "rate-strongly-convex";
  const Tolerance t = tol.value_or(Tolerance::for_log(log));
  const double w0 = *log.records.front().w2_to_target;
  const double factor = 1.0 - gamma * lambda;
  std::vector<double> w2;
  for (const auto& r : log.records) {
    if (!r.w2_to_target) continue;
    const double bound = std::pow(factor, static_cast<double>(r.n)) * w0;
    rep.add(r.n, *r.w2_to_target - bound, t.at(max_abs({*r.w2_to_target, bound})));
    w2.push_back(*r.w2_to_target);
  }
  const double floor = w2_floor(log);
  rep.finalize(w2, floor);
  rep.fitted_rate = fitted_contraction(w2, floor);
  return rep;
}

InequalityReport geodesic_convexity_probe(const InternalEnergy& h, const QuantileMeasure& nu, const QuantileMeasure& mu,
                                          const QuantileMeasure& pi, std::size_t grid, double tol) {
  require(nu.size() == mu.size() && mu.size() == pi.size(), "geodesic_convexity_probe: node counts differ");
  require(grid >= 2, "geodesic_convexity_probe: need at least 2 interpolation points");
  InequalityReport rep;
  rep.name = "geodesic-convexity";
  const double h_mu = energy_value(h, mu);
  const double h_pi = energy_value(h, pi);
  std::vector<double> q(mu.size());
  for (std::size_t j = 0; j < grid; ++j) {
    const double eps = static_cast<double>(j) / static_cast<double>(grid - 1);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = eps * pi[i] + (1.0 - eps) * mu[i];
    const double h_eps = energy_value(h, QuantileMeasure(q));
    rep.add(j, h_eps - eps * h_pi - (1.0 - eps) * h_mu, tol);
  }
  rep.finalize();
  return rep;
}

DescentResidual descent_residual_1d(const TrajectoryLog& log, const Potential& f, const InternalEnergy& h, double gamma,
                                    std::optional<double> tol) {
  require(log.config.representation == Representation::quantile, "descent_residual_1d: needs a quantile run");
  const auto pairs = consecutive_state_pairs(log, false);
  require(!pairs.empty(), "descent_residual_1d: the log has no consecutive stored states");
  DescentResidual out;
  out.report.name = "descent-sharp";
  const auto& first = std::get<QuantileMeasure>(*log.records[pairs.front()].state);
  const double g0 = objective(f, h, first);
  const double t = tol.value_or(1e-3 * (1.0 + std::abs(g0)));
  const double coeff = gamma * (1.0 - 0.5 * f.smoothness() * gamma);
  for (std::size_t k : pairs) {
    const auto& mu = std::get<QuantileMeasure>(*log.records[k].state);
    const auto& mu_next = std::get<QuantileMeasure>(*log.records[k + 1].state);
    // node i of μ_n is carried to node i of μ_{n+1}: X_{n+1}(Q^n_i) = Q^{n+1}_i
    const auto xi = wasserstein_subgradient(h, mu_next);
    std::vector<double> terms(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double v = f.derivative_1d(mu[i]) + xi[i];
      terms[i] = v * v;
    }
    const double g = kernels::pairwise_sum(terms) / static_cast<double>(mu.size());
    out.iterations.push_back(log.records[k + 1].n);
    out.grad_norm_sq.push_back(g);
    out.report.add(log.records[k + 1].n, objective(f, h, mu_next) - objective(f, h, mu) + coeff * g, t);
  }
  out.report.finalize();
  return out;
}

SubgradientInequality subgradient_inequality_gaussian(const GaussianMeasure& nu, const GaussianMeasure& mu,
                                                      const GaussianMeasure& pi) {
  require(nu.dim() == mu.dim() && mu.dim() == pi.dim(), "subgradient_inequality_gaussian: dimension mismatch");
  // With x = m_ν + σ_ν z: T_ν^μ = m_μ + σ_μ z, T_ν^π = m_π + σ_π z and
  // ξ(T_ν^μ) = −z/σ_μ, so the inner product is Σ_k (1 − σ_π/σ_μ).
  SubgradientInequality out;
  for (std::size_t k = 0; k < mu.dim(); ++k) out.inner_product += 1.0 - pi.stddev(k) / mu.stddev(k);
  const auto entropy = InternalEnergy::negative_entropy();
  out.energy_difference = energy_value(entropy, pi) - energy_value(entropy, mu);
  return out;
}

}  // namespace wgf
