#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgf/functionals.hpp"
#include "wgf/scheme.hpp"

namespace wgf {

/// Scale-aware tolerance: atol + rtol · (1 + magnitude of the dominant term).
struct Tolerance {
  double atol = 1e-9;
  double rtol = 1e-9;

  double at(double magnitude) const { return atol + rtol * (1.0 + magnitude); }

  static constexpr Tolerance closed_form() { return {1e-9, 1e-9}; }
  static constexpr Tolerance discretized() { return {1e-6, 1e-3}; }
  static Tolerance for_log(const TrajectoryLog& log);
};

/// Per-iteration residuals of one inequality; a residual ≤ its tolerance
/// means the inequality holds at that iteration.
struct InequalityReport {
  std::string name;
  std::vector<std::size_t> iterations;
  std::vector<double> residuals;
  std::vector<double> tolerances;
  double worst_residual = 0.0;  // max residual
  double worst_excess = 0.0;    // max (residual − tolerance); pass ⇔ ≤ 0
  bool pass = true;
  bool floor_limited = false;   // some late residual within 2× tol was excused at the W² floor
  std::optional<double> fitted_rate;

  void add(std::size_t n, double residual, double tolerance);
  /// Computes worst_* and pass. `w2_level[k]` (optional) is the W² value tied
  /// to residual k and is used to excuse near-tolerance residuals at the end
  /// of a run where W² is down at the floor.
  void finalize(const std::vector<double>& w2_level = {}, double w2_floor = 0.0);
};

/// Residual_n = G(μ_{n+1}) − G(μ_n). Default tolerance 1e−8 for Gaussian
/// runs and 1e−4 · (1 + |G(μ₀)|) otherwise.
InequalityReport descent_check(const TrajectoryLog& log, std::optional<double> tol = std::nullopt);

/// W²(μ_{n+1}, π) − (1 − γλ) W²(μ_n, π) + 2γ (G(μ_{n+1}) − G(π)) over all
/// consecutive stored states. A Gaussian π is discretized on the log's grid
/// for quantile runs.
InequalityReport evi_check(const TrajectoryLog& log, const Measure& pi, double lambda, double gamma,
                           std::optional<Tolerance> tol = std::nullopt);

/// {prox-side, gradient-side} half-step inequalities. Needs ν snapshots.
std::pair<InequalityReport, InequalityReport> half_step_evi_checks(const TrajectoryLog& log, const Measure& pi,
                                                                   double lambda, double gamma,
                                                                   std::optional<Tolerance> tol = std::nullopt);

/// (G(μ_n) − G(μ⋆)) − W²(μ₀, μ⋆)/(2γn), n ≥ 1.
InequalityReport rate_check_convex(const TrajectoryLog& log, double gamma, std::optional<Tolerance> tol = std::nullopt);

/// W²(μ_n, μ⋆) − (1 − γλ)ⁿ W²(μ₀, μ⋆); also fits the per-step contraction
/// as the geometric mean of successive ratios above the W² floor.
InequalityReport rate_check_strongly_convex(const TrajectoryLog& log, double gamma, double lambda,
                                            std::optional<Tolerance> tol = std::nullopt);

/// Geometric mean of W²_{n}/W²_{n−1} over iterations where both exceed `floor`.
std::optional<double> fitted_contraction(const std::vector<double>& w2, double floor);

/// W² level below which successive ratios carry no information.
double w2_floor(const TrajectoryLog& log);

/// H(Q_ε) − εH(Qπ) − (1−ε)H(Qμ) for Q_ε = εQπ + (1−ε)Qμ on `grid` values
/// of ε ∈ [0, 1]. In 1D the generalized geodesic with base ν is this
/// node-wise interpolation whatever ν is.
InequalityReport geodesic_convexity_probe(const InternalEnergy& h, const QuantileMeasure& nu, const QuantileMeasure& mu,
                                          const QuantileMeasure& pi, std::size_t grid, double tol = 1e-6);

struct DescentResidual {
  std::vector<std::size_t> iterations;
  std::vector<double> grad_norm_sq;  // g_n = ‖∇F + ∇_W H(μ_{n+1})(X_{n+1})‖²_{μ_n}
  InequalityReport report;           // G(μ_{n+1}) − G(μ_n) + γ(1 − Lγ/2) g_n
};

/// Sharp descent inequality on a quantile run; uses consecutive stored states.
DescentResidual descent_residual_1d(const TrajectoryLog& log, const Potential& f, const InternalEnergy& h, double gamma,
                                    std::optional<double> tol = std::nullopt);

/// ⟨ξ∘T_ν^μ, T_ν^π − T_ν^μ⟩_ν versus H(π) − H(μ) for H the negative entropy
/// and ξ = ∇log μ, product Gaussians (all maps affine).
struct SubgradientInequality {
  double inner_product = 0.0;
  double energy_difference = 0.0;
  double residual() const { return inner_product - energy_difference; }
};
SubgradientInequality subgradient_inequality_gaussian(const GaussianMeasure& nu, const GaussianMeasure& mu,
                                                      const GaussianMeasure& pi);

/// W² between two measures of compatible representations (Gaussian pairs in
/// closed form, quantile pairs on the grid, Gaussian vs quantile through the
/// Gaussian's grid, particles through their moment-matched Gaussian).
double w2_between(const Measure& a, const Measure& b);

}  // namespace wgf
