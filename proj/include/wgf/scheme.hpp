#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wgf/functionals.hpp"
#include "wgf/jko.hpp"
#include "wgf/measures.hpp"

namespace wgf {

enum class SchemeKind { fb, forward, lmc, backward };
enum class Representation { gaussian, quantile, particles };
enum class TargetMode { automatic, none, explicit_gaussian };

std::string to_string(SchemeKind kind);
std::string to_string(Representation rep);

struct SchemeConfig {
  SchemeKind scheme = SchemeKind::fb;
  Representation representation = Representation::gaussian;
  double gamma = 0.1;
  std::size_t n_iters = 200;
  Potential potential = Potential::isotropic_quadratic(1, 1.0);
  InternalEnergy energy = InternalEnergy::negative_entropy();
  GaussianMeasure initial = GaussianMeasure::isotropic(1, 10.0, 100.0);
  TargetMode target_mode = TargetMode::automatic;
  std::optional<GaussianMeasure> target;  // used when target_mode is explicit
  std::uint64_t seed = 42;
  std::size_t snapshot_every = 10;  // quantile / particle runs; Gaussian runs keep every state
  std::size_t quantile_nodes = 4096;
  std::size_t particle_count = 100000;
  bool unsafe = false;  // allow γ ≥ 1/L (only for demonstrating the failure)
  JkoOptions jko;
  Exec exec = Exec::parallel;

  /// Throws PreconditionError naming the first violated requirement.
  void validate() const;
};

using Measure = std::variant<GaussianMeasure, QuantileMeasure, ParticleCloud>;

struct IterationRecord {
  std::size_t n = 0;
  std::vector<double> mean;
  std::vector<double> variance;
  std::optional<double> w2_to_target;
  std::optional<double> objective;
  std::optional<double> objective_gap;
  std::optional<double> w2_empirical;   // 1D particle runs: raw W² of the cloud to the target
  std::optional<Measure> state;         // μ_n
  std::optional<Measure> intermediate;  // ν_n, the forward half-step (fb, n ≥ 1)
  std::optional<JkoReport> jko;
};

struct RunFailure {
  enum class Kind { precondition, solver, inconsistency };
  Kind kind;
  std::string message;
  std::size_t iteration = 0;
};

struct TrajectoryLog {
  SchemeConfig config;
  std::optional<Measure> target;
  std::optional<double> target_objective;
  bool model_mismatch = false;  // affine particle JKO used outside the Gaussian family
  std::vector<IterationRecord> records;
  std::optional<RunFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Node values x − γF'(x) without any monotonicity check.
std::vector<double> forward_map_values(const Potential& f, double gamma, std::span<const double> x);

// ν = (I − γ∇F)#μ. Requires γ < 1/L unless `unsafe`.
GaussianMeasure forward_step(const Potential& f, double gamma, const GaussianMeasure& mu, bool unsafe = false);
QuantileMeasure forward_step(const Potential& f, double gamma, const QuantileMeasure& mu, bool unsafe = false,
                             Exec exec = Exec::parallel);
ParticleCloud forward_step(const Potential& f, double gamma, const ParticleCloud& mu, bool unsafe = false,
                           Exec exec = Exec::parallel);

template <class M>
struct FbStep {
  M intermediate;  // ν_{n+1}
  M next;          // μ_{n+1}
  std::optional<JkoReport> jko;
};

FbStep<GaussianMeasure> fb_step(const Potential& f, const InternalEnergy& h, double gamma, const GaussianMeasure& mu);
FbStep<QuantileMeasure> fb_step(const Potential& f, const InternalEnergy& h, double gamma, const QuantileMeasure& mu,
                                const JkoOptions& options = {}, Exec exec = Exec::parallel);
FbStep<ParticleCloud> fb_step(const Potential& f, const InternalEnergy& h, double gamma, const ParticleCloud& mu,
                              Exec exec = Exec::parallel);

/// Gradient step followed by the exact heat flow for time γ.
GaussianMeasure lmc_step(const Potential& f, double gamma, const GaussianMeasure& mu);
ParticleCloud lmc_step(const Potential& f, double gamma, const ParticleCloud& mu, const Rng& rng,
                       Exec exec = Exec::parallel);

/// Forward Euler on G; only defined when H is zero.
GaussianMeasure forward_euler_step(const Potential& f, const InternalEnergy& h, double gamma, const GaussianMeasure& mu);
QuantileMeasure forward_euler_step(const Potential& f, const InternalEnergy& h, double gamma, const QuantileMeasure& mu);
ParticleCloud forward_euler_step(const Potential& f, const InternalEnergy& h, double gamma, const ParticleCloud& mu);

/// Executes config.n_iters steps. Validation errors throw; errors during the
/// iteration are recorded in `failure` and the partial log is returned.
TrajectoryLog run(const SchemeConfig& config);

/// Gaussian with the empirical moments of a cloud.
GaussianMeasure moment_gaussian(const ParticleCloud& c, Exec exec = Exec::parallel);

}  // namespace wgf
