#pragma once

#include <cstddef>
#include <optional>

#include "wgf/functionals.hpp"
#include "wgf/measures.hpp"

namespace wgf {

/// Certificate returned by the quantile JKO solvers.
struct JkoReport {
  std::size_t iterations = 0;
  double kkt_residual = 0.0;        // ‖∇Φ(Q)‖_∞ at the returned point
  double objective_decrease = 0.0;  // Φ(start) − Φ(Q)
};

struct JkoOptions {
  double tol = 1e-10;  // relative to max(1, ‖Qν‖_∞)
  std::size_t max_iter = 200;
};

struct JkoResult {
  QuantileMeasure measure;
  JkoReport report;
};

/// JKO of the negative entropy for a product Gaussian: mean kept,
/// σ_k ← (σ_k + √(σ_k² + 4γ)) / 2.
GaussianMeasure jko_entropy_gaussian(const GaussianMeasure& g, double gamma);

/// JKO of the full objective G = E_F + H for quadratic F and H ∈ {entropy,
/// zero}, in closed form:
///   m ← (m + γαa)/(1 + γα),  σ ← (σ + √(σ² + 4γ(1 + γα))) / (2(1 + γα)).
GaussianMeasure jko_full_gaussian(const Potential& f, const InternalEnergy& h, const GaussianMeasure& g,
                                  double gamma);

/// argmin_Q H_disc(Q) + (1/(2γM)) Σ (Q_i − Qν_i)² by damped Newton.
/// Throws SolverFailure when max_iter is reached without meeting tol.
JkoResult jko_quantile(const InternalEnergy& h, const QuantileMeasure& nu, double gamma,
                       const JkoOptions& options = {});

/// As jko_quantile with the potential term (1/M) Σ F(Q_i) added; F must be
/// convex (λ ≥ 0) and 1D.
JkoResult jko_backward_full(const Potential& f, const InternalEnergy& h, const QuantileMeasure& nu,
                            double gamma, const JkoOptions& options = {});

/// Minimizer of the discretized objective (1/M) Σ F(Q_i) + H_disc(Q) on M
/// nodes: the Gibbs measure of the discrete problem. Needs H ≠ zero.
JkoResult gibbs_quantile(const Potential& f, const InternalEnergy& h, std::size_t m,
                         const JkoOptions& options = {});

/// Affine particle JKO of the entropy: each coordinate is rescaled about its
/// empirical mean by s/σ̂ with s = (σ̂ + √(σ̂² + 4γ))/2. Exact only when the
/// cloud represents a Gaussian.
ParticleCloud jko_affine_particles(const ParticleCloud& c, double gamma, Exec exec = Exec::parallel);

}  // namespace wgf
