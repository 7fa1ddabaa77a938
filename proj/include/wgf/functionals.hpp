#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wgf/measures.hpp"

namespace wgf {

/// Smooth potential F with smoothness constant L and strong-convexity
/// constant λ ≥ 0, i.e. for all x, y
///   F(y) ≤ F(x) + ⟨∇F(x), y − x⟩ + (L/2)‖x − y‖²,
///   F(x) ≤ F(y) − ⟨∇F(x), y − x⟩ − (λ/2)‖x − y‖².
class Potential {
 public:
  enum class Kind { quadratic, custom };

  using Fn1D = std::function<double(double)>;

  /// F(x) = Σ_k (α_k/2)(x_k − a_k)²; L = max α, λ = min α.
  static Potential quadratic(std::vector<double> alpha, std::vector<double> anchor);

  /// F(x) = (α/2)|x − a|² in every coordinate of R^d.
  static Potential isotropic_quadratic(std::size_t dim, double alpha, double anchor = 0.0);

  /// User-supplied 1D potential. The declared (L, λ) are property-tested on
  /// random pairs drawn from [−probe_radius, probe_radius]; a violation
  /// throws PreconditionError. `second` may be empty, in which case F'' is
  /// taken by central differences of F'.
  static Potential custom_1d(Fn1D value, Fn1D derivative, Fn1D second, double smoothness,
                             double strong_convexity, double probe_radius = 50.0,
                             std::uint64_t probe_seed = 7);

  Kind kind() const { return kind_; }
  bool is_quadratic() const { return kind_ == Kind::quadratic; }
  /// Dimension the potential is defined on.
  std::size_t dim() const { return kind_ == Kind::quadratic ? alpha_.size() : 1; }
  double smoothness() const { return smoothness_; }
  double strong_convexity() const { return strong_convexity_; }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& anchor() const { return anchor_; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  // 1D views (quadratic potentials use coordinate 0 and require d = 1).
  double value_1d(double x) const;
  double derivative_1d(double x) const;
  double second_1d(double x) const;

 private:
  Potential() = default;

  Kind kind_ = Kind::quadratic;
  std::vector<double> alpha_;
  std::vector<double> anchor_;
  Fn1D value_fn_;
  Fn1D derivative_fn_;
  Fn1D second_fn_;
  double smoothness_ = 0.0;
  double strong_convexity_ = 0.0;
};

/// Largest violation of the smoothness and strong-convexity
/// inequalities over `pairs` random pairs in [−radius, radius]^d.
/// Nonpositive values mean no violation was found.
struct PotentialProbe {
  double smoothness_violation = 0.0;
  double convexity_violation = 0.0;
};
PotentialProbe probe_potential_constants(const Potential& f, std::size_t pairs, double radius,
                                         std::uint64_t seed);

/// Internal energy H. Negative entropy ∫ρ log ρ, power entropy
/// ∫ρ^m/(m − 1) with m > 1, or zero.
class InternalEnergy {
 public:
  enum class Kind { negative_entropy, power, zero };

  static InternalEnergy negative_entropy() { return InternalEnergy(Kind::negative_entropy, 1.0); }
  static InternalEnergy power(double exponent);
  static InternalEnergy zero() { return InternalEnergy(Kind::zero, 1.0); }

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  std::string name() const;

  // In quantile coordinates the energy is Σ_i φ(Q_{i+1} − Q_i) on M nodes:
  //   entropy: φ(d) = −(1/M) log(M d)
  //   power:   φ(d) = (1/(m−1)) (1/M) (M d)^{1−m}
  double spacing_term(double gap, std::size_t m) const;
  double spacing_first(double gap, std::size_t m) const;
  double spacing_second(double gap, std::size_t m) const;

 private:
  InternalEnergy(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}

  Kind kind_;
  double exponent_;
};

// E_F(μ) = ∫ F dμ
double potential_energy(const Potential& f, const GaussianMeasure& g);
double potential_energy(const Potential& f, const QuantileMeasure& q);
double potential_energy(const Potential& f, const ParticleCloud& c);

/// ‖∇F‖²_μ = ∫ ‖∇F‖² dμ.
double gradient_norm_sq(const Potential& f, const GaussianMeasure& g);
double gradient_norm_sq(const Potential& f, const QuantileMeasure& q);

double energy_value(const InternalEnergy& h, const GaussianMeasure& g);
double energy_value(const InternalEnergy& h, const QuantileMeasure& q);

/// ∂H_disc/∂Q_i for the quantile discretization.
std::vector<double> energy_gradient(const InternalEnergy& h, const QuantileMeasure& q);

/// Strong Fréchet subgradient ∇_W H evaluated at the nodes, M·∂H_disc/∂Q_i.
std::vector<double> wasserstein_subgradient(const InternalEnergy& h, const QuantileMeasure& q);

// G = E_F + H
double objective(const Potential& f, const InternalEnergy& h, const GaussianMeasure& g);
double objective(const Potential& f, const InternalEnergy& h, const QuantileMeasure& q);

/// Node count used to smooth an atomic 1D cloud before evaluating H.
std::size_t smoothing_nodes(std::size_t particles);

/// Objective of a 1D particle cloud; H is evaluated on
/// particles_to_quantile(c, smoothing_nodes(N)). Unavailable (nullopt) for
/// d > 1 unless H is zero.
std::optional<double> objective(const Potential& f, const InternalEnergy& h, const ParticleCloud& c);

inline constexpr double kGapNegativeTolerance = 1e-8;

/// G(μ) − G(μ⋆). Throws InconsistencyError below −1e−8 (a minimizer beaten).
double objective_gap_to_target(const Potential& f, const InternalEnergy& h, const GaussianMeasure& mu,
                               const GaussianMeasure& target);
double objective_gap_to_target(const Potential& f, const InternalEnergy& h, const QuantileMeasure& mu,
                               const QuantileMeasure& target);

/// Gibbs measure ∝ exp(−F) for quadratic F: N(a, diag(1/α)).
GaussianMeasure gibbs_target(const Potential& f);

}  // namespace wgf
