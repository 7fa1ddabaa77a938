#include "wgf/scheme.hpp"

#include <cmath>
#include <sstream>

#include "wgf/errors.hpp"
#include "wgf/wasserstein.hpp"

namespace wgf {

using detail::require;

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::fb: return "fb";
    case SchemeKind::forward: return "forward";
    case SchemeKind::lmc: return "lmc";
    case SchemeKind::backward: return "backward";
  }
  return {};
}

std::string to_string(Representation rep) {
  switch (rep) {
    case Representation::gaussian: return "gaussian";
    case Representation::quantile: return "quantile";
    case Representation::particles: return "particles";
  }
  return {};
}

namespace {

void require_step_size(const Potential& f, double gamma, bool unsafe, const char* who) {
  require(std::isfinite(gamma) && gamma > 0.0, std::string(who) + ": gamma must be > 0");
  if (unsafe) return;
  if (!(gamma * f.smoothness() < 1.0)) {
    std::ostringstream msg;
    msg << who << ": step size must satisfy gamma < 1/L (gamma = " << gamma << ", L = " << f.smoothness()
        << ", 1/L = " << 1.0 / f.smoothness() << ")";
    throw PreconditionError(msg.str());
  }
}

void require_zero_energy(const InternalEnergy& h) {
  require(h.is_zero(),
          "forward_euler_step: the Wasserstein gradient of a nonzero internal energy is not evaluable "
          "pointwise; use the fb scheme");
}

}  // namespace

void SchemeConfig::validate() const {
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(n_iters >= 1, "iters must be >= 1");
  require(snapshot_every >= 1, "snapshot_every must be >= 1");
  require(potential.dim() == initial.dim(), "potential dimension differs from the initial measure dimension");
  if (scheme != SchemeKind::backward && !unsafe)
    require(gamma * potential.smoothness() < 1.0,
            "step size must satisfy gamma < 1/L (gamma = " + std::to_string(gamma) +
                ", 1/L = " + std::to_string(1.0 / potential.smoothness()) + ")");
  if (scheme == SchemeKind::lmc)
    require(energy.kind() == InternalEnergy::Kind::negative_entropy, "lmc requires energy = entropy");
  if (scheme == SchemeKind::forward)
    require(energy.is_zero(), "the forward scheme requires energy = zero");
  if (target_mode == TargetMode::explicit_gaussian) {
    require(target.has_value(), "explicit target requested but not given");
    require(target->dim() == initial.dim(), "target dimension differs from the initial measure dimension");
  }

  switch (representation) {
    case Representation::gaussian:
      require(potential.is_quadratic(), "gaussian representation requires a quadratic potential");
      require(energy.kind() != InternalEnergy::Kind::power,
              "gaussian representation has no closed-form JKO for the power entropy; use quantile");
      break;
    case Representation::quantile:
      require(initial.dim() == 1, "quantile representation is 1D only");
      require(quantile_nodes >= QuantileMeasure::kMinNodes, "quantile.m must be >= 2");
      require(scheme != SchemeKind::lmc, "lmc is not available in the quantile representation");
      break;
    case Representation::particles:
      require(particle_count >= 2, "particles.n must be >= 2");
      require(energy.kind() != InternalEnergy::Kind::power,
              "particle representation supports only entropy and zero energies");
      require(scheme != SchemeKind::backward, "the backward scheme is not available for particles");
      break;
  }
}

std::vector<double> forward_map_values(const Potential& f, double gamma, std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v -= gamma * f.derivative_1d(v);
  return out;
}

GaussianMeasure forward_step(const Potential& f, double gamma, const GaussianMeasure& mu, bool unsafe) {
  require_step_size(f, gamma, unsafe, "forward_step");
  require(f.is_quadratic() && f.dim() == mu.dim(), "forward_step: Gaussian pushforward needs a quadratic potential");
  std::vector<double> mean(mu.dim()), var(mu.dim());
  for (std::size_t k = 0; k < mu.dim(); ++k) {
    const double a = f.alpha()[k];
    const double c = 1.0 - gamma * a;
    mean[k] = mu.mean()[k] - gamma * a * (mu.mean()[k] - f.anchor()[k]);
    const double s = c * mu.stddev(k);
    var[k] = s * s;
  }
  return GaussianMeasure(std::move(mean), std::move(var));
}

QuantileMeasure forward_step(const Potential& f, double gamma, const QuantileMeasure& mu, bool unsafe, Exec exec) {
  require_step_size(f, gamma, unsafe, "forward_step");
  require(f.dim() == 1, "forward_step: quantile measures are 1D");
  std::vector<double> q = mu.values();
  kernels::node_gradient_step(q, [&f](double x) { return f.derivative_1d(x); }, gamma, exec);
  return QuantileMeasure(std::move(q));
}

ParticleCloud forward_step(const Potential& f, double gamma, const ParticleCloud& mu, bool unsafe, Exec exec) {
  require_step_size(f, gamma, unsafe, "forward_step");
  require(f.dim() == mu.dim(), "forward_step: dimension mismatch");
  ParticleCloud out = mu;
  kernels::gradient_step(out.coords(), out.size(), out.dim(),
                         [&f](std::span<const double> x, std::span<double> g) { f.gradient(x, g); }, gamma, exec);
  return out;
}

FbStep<GaussianMeasure> fb_step(const Potential& f, const InternalEnergy& h, double gamma, const GaussianMeasure& mu) {
  auto nu = forward_step(f, gamma, mu);
  switch (h.kind()) {
    case InternalEnergy::Kind::zero: {
      auto next = nu;
      return {std::move(nu), std::move(next), std::nullopt};
    }
    case InternalEnergy::Kind::negative_entropy: {
      auto next = jko_entropy_gaussian(nu, gamma);
      return {std::move(nu), std::move(next), std::nullopt};
    }
    case InternalEnergy::Kind::power:
      break;
  }
  throw PreconditionError("fb_step: power entropy has no Gaussian closed form; use the quantile representation");
}

FbStep<QuantileMeasure> fb_step(const Potential& f, const InternalEnergy& h, double gamma, const QuantileMeasure& mu,
                                const JkoOptions& options, Exec exec) {
  auto nu = forward_step(f, gamma, mu, false, exec);
  auto result = jko_quantile(h, nu, gamma, options);
  return {std::move(nu), std::move(result.measure), result.report};
}

FbStep<ParticleCloud> fb_step(const Potential& f, const InternalEnergy& h, double gamma, const ParticleCloud& mu,
                              Exec exec) {
  auto nu = forward_step(f, gamma, mu, false, exec);
  switch (h.kind()) {
    case InternalEnergy::Kind::zero: {
      auto next = nu;
      return {std::move(nu), std::move(next), std::nullopt};
    }
    case InternalEnergy::Kind::negative_entropy: {
      auto next = jko_affine_particles(nu, gamma, exec);
      return {std::move(nu), std::move(next), std::nullopt};
    }
    case InternalEnergy::Kind::power:
      break;
  }
  throw PreconditionError("fb_step: particle clouds support only entropy and zero energies");
}

GaussianMeasure lmc_step(const Potential& f, double gamma, const GaussianMeasure& mu) {
  auto nu = forward_step(f, gamma, mu);
  std::vector<double> var = nu.variances();
  for (double& v : var) v += 2.0 * gamma;
  return GaussianMeasure(nu.mean(), std::move(var));
}

ParticleCloud lmc_step(const Potential& f, double gamma, const ParticleCloud& mu, const Rng& rng, Exec exec) {
  auto out = forward_step(f, gamma, mu, false, exec);
  std::vector<double> noise(out.coords().size());
  kernels::fill_standard_normal(noise, rng.seed(), exec);
  kernels::add_scaled(out.coords(), noise, std::sqrt(2.0 * gamma), exec);
  return out;
}

GaussianMeasure forward_euler_step(const Potential& f, const InternalEnergy& h, double gamma, const GaussianMeasure& mu) {
  require_zero_energy(h);
  return forward_step(f, gamma, mu);
}

QuantileMeasure forward_euler_step(const Potential& f, const InternalEnergy& h, double gamma, const QuantileMeasure& mu) {
  require_zero_energy(h);
  return forward_step(f, gamma, mu);
}

ParticleCloud forward_euler_step(const Potential& f, const InternalEnergy& h, double gamma, const ParticleCloud& mu) {
  require_zero_energy(h);
  return forward_step(f, gamma, mu);
}

GaussianMeasure moment_gaussian(const ParticleCloud& c, Exec exec) {
  auto m = empirical_moments(c, exec);
  return GaussianMeasure(std::move(m.mean), std::move(m.variance));
}

namespace {

// Per-representation bookkeeping for run().
class Runner {
 public:
  explicit Runner(const SchemeConfig& config) : cfg_(config) { log_.config = config; }

  TrajectoryLog execute() {
    Measure current = initial_measure();
    setup_target(current);
    log_.model_mismatch = cfg_.representation == Representation::particles && cfg_.scheme == SchemeKind::fb &&
                          cfg_.energy.kind() == InternalEnergy::Kind::negative_entropy &&
                          !cfg_.potential.is_quadratic();
    if (log_.failure) return std::move(log_);
    try {
      log_.records.push_back(describe(0, current, nullptr));
    } catch (...) {
      record_failure(0);
      return std::move(log_);
    }
    for (std::size_t n = 0; n < cfg_.n_iters; ++n) {
      try {
        std::optional<Measure> nu;
        std::optional<JkoReport> jko;
        current = step(n, current, nu, jko);
        auto rec = describe(n + 1, current, nu ? &*nu : nullptr);
        rec.jko = jko;
        log_.records.push_back(std::move(rec));
      } catch (...) {
        record_failure(n + 1);
        break;
      }
    }
    return std::move(log_);
  }

 private:
  Measure initial_measure() const {
    switch (cfg_.representation) {
      case Representation::gaussian:
        return cfg_.initial;
      case Representation::quantile:
        return gaussian_to_quantile(cfg_.initial, cfg_.quantile_nodes);
      case Representation::particles:
        return sample_gaussian(cfg_.initial, cfg_.particle_count, Rng(cfg_.seed), cfg_.exec);
    }
    return cfg_.initial;
  }

  bool closed_form_gibbs() const {
    return cfg_.potential.is_quadratic() && cfg_.energy.kind() == InternalEnergy::Kind::negative_entropy;
  }

  void setup_target(const Measure&) {
    try {
      if (cfg_.target_mode == TargetMode::none) return;
      const bool is_explicit = cfg_.target_mode == TargetMode::explicit_gaussian;
      switch (cfg_.representation) {
        case Representation::gaussian:
        case Representation::particles:
          if (is_explicit)
            gaussian_target_ = *cfg_.target;
          else if (closed_form_gibbs())
            gaussian_target_ = gibbs_target(cfg_.potential);
          if (gaussian_target_) {
            log_.target = *gaussian_target_;
            if (cfg_.potential.is_quadratic())
              log_.target_objective = objective(cfg_.potential, cfg_.energy, *gaussian_target_);
          }
          break;
        case Representation::quantile:
          if (is_explicit) {
            quantile_target_ = gaussian_to_quantile(*cfg_.target, cfg_.quantile_nodes);
          } else if (!cfg_.energy.is_zero()) {
            // the minimizer of the discretized objective, so that gaps stay ≥ 0
            quantile_target_ = gibbs_quantile(cfg_.potential, cfg_.energy, cfg_.quantile_nodes, cfg_.jko).measure;
          }
          if (quantile_target_) {
            log_.target = *quantile_target_;
            log_.target_objective = objective(cfg_.potential, cfg_.energy, *quantile_target_);
          }
          break;
      }
    } catch (...) {
      record_failure(0);
    }
  }

  bool keep_state(std::size_t n) const {
    return cfg_.representation == Representation::gaussian || n % cfg_.snapshot_every == 0 || n == cfg_.n_iters;
  }

  IterationRecord describe(std::size_t n, const Measure& mu, const Measure* nu) const {
    IterationRecord rec;
    rec.n = n;
    const bool explicit_target = cfg_.target_mode == TargetMode::explicit_gaussian;
    if (const auto* g = std::get_if<GaussianMeasure>(&mu)) {
      rec.mean = g->mean();
      rec.variance = g->variances();
      if (gaussian_target_) rec.w2_to_target = w2_gaussian(*g, *gaussian_target_);
      rec.objective = objective(cfg_.potential, cfg_.energy, *g);
      if (gaussian_target_ && log_.target_objective) {
        rec.objective_gap = explicit_target ? *rec.objective - *log_.target_objective
                                            : objective_gap_to_target(cfg_.potential, cfg_.energy, *g, *gaussian_target_);
      }
    } else if (const auto* q = std::get_if<QuantileMeasure>(&mu)) {
      rec.mean = {q->mean()};
      rec.variance = {q->variance()};
      rec.objective = objective(cfg_.potential, cfg_.energy, *q);
      if (quantile_target_) {
        rec.w2_to_target = w2_quantile(*q, *quantile_target_);
        rec.objective_gap = explicit_target ? *rec.objective - *log_.target_objective
                                            : objective_gap_to_target(cfg_.potential, cfg_.energy, *q, *quantile_target_);
      }
    } else {
      const auto& c = std::get<ParticleCloud>(mu);
      const auto fit = moment_gaussian(c, cfg_.exec);
      rec.mean = fit.mean();
      rec.variance = fit.variances();
      rec.objective = objective(cfg_.potential, cfg_.energy, c);
      if (gaussian_target_) {
        rec.w2_to_target = w2_gaussian(fit, *gaussian_target_);
        if (c.dim() == 1) rec.w2_empirical = w2_particles_gaussian_1d(c, *gaussian_target_);
        if (rec.objective && log_.target_objective) rec.objective_gap = *rec.objective - *log_.target_objective;
      }
    }
    if (keep_state(n)) {
      rec.state = mu;
      if (nu) rec.intermediate = *nu;
    }
    return rec;
  }

  Measure step(std::size_t n, const Measure& mu, std::optional<Measure>& nu, std::optional<JkoReport>& jko) const {
    const auto& f = cfg_.potential;
    const auto& h = cfg_.energy;
    const double gamma = cfg_.gamma;
    return std::visit(
        [&](const auto& m) -> Measure {
          using M = std::decay_t<decltype(m)>;
          switch (cfg_.scheme) {
            case SchemeKind::fb: {
              FbStep<M> s = [&] {
                if constexpr (std::is_same_v<M, QuantileMeasure>)
                  return fb_step(f, h, gamma, m, cfg_.jko, cfg_.exec);
                else if constexpr (std::is_same_v<M, ParticleCloud>)
                  return fb_step(f, h, gamma, m, cfg_.exec);
                else
                  return fb_step(f, h, gamma, m);
              }();
              nu = std::move(s.intermediate);
              jko = s.jko;
              return std::move(s.next);
            }
            case SchemeKind::forward:
              return forward_euler_step(f, h, gamma, m);
            case SchemeKind::lmc:
              if constexpr (std::is_same_v<M, ParticleCloud>)
                return lmc_step(f, gamma, m, Rng(cfg_.seed).derive(n + 1), cfg_.exec);
              else if constexpr (std::is_same_v<M, GaussianMeasure>)
                return lmc_step(f, gamma, m);
              else
                throw PreconditionError("lmc is not available in the quantile representation");
            case SchemeKind::backward:
              if constexpr (std::is_same_v<M, QuantileMeasure>) {
                auto r = jko_backward_full(f, h, m, gamma, cfg_.jko);
                jko = r.report;
                return std::move(r.measure);
              } else if constexpr (std::is_same_v<M, GaussianMeasure>) {
                return jko_full_gaussian(f, h, m, gamma);
              } else {
                throw PreconditionError("the backward scheme is not available for particles");
              }
          }
          throw PreconditionError("unknown scheme");
        },
        mu);
  }

  void record_failure(std::size_t n) {
    RunFailure failure{RunFailure::Kind::precondition, {}, n};
    try {
      throw;
    } catch (const SolverFailure& e) {
      failure.kind = RunFailure::Kind::solver;
      failure.message = e.what();
    } catch (const InconsistencyError& e) {
      failure.kind = RunFailure::Kind::inconsistency;
      failure.message = e.what();
    } catch (const std::exception& e) {
      failure.message = e.what();
    }
    log_.failure = std::move(failure);
  }

  const SchemeConfig& cfg_;
  TrajectoryLog log_;
  std::optional<GaussianMeasure> gaussian_target_;
  std::optional<QuantileMeasure> quantile_target_;
};

}  // namespace

TrajectoryLog run(const SchemeConfig& config) {
  config.validate();
  return Runner(config).execute();
}

}  // namespace wgf
