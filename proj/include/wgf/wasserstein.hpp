#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wgf/measures.hpp"

namespace wgf {

/// Monotone (node-to-node) coupling between two quantile measures on the
/// same grid. In 1D this is the optimal coupling; the induced node map is
/// the Brenier map from source to target.
class Coupling1D {
 public:
  Coupling1D(const QuantileMeasure& source, const QuantileMeasure& target);

  const QuantileMeasure& source() const { return *source_; }
  const QuantileMeasure& target() const { return *target_; }

  /// (1/M) Σ (Qa_i − Qb_i)².
  double cost() const;

  /// Target value at each source node.
  std::vector<double> map() const { return target_->values(); }

 private:
  const QuantileMeasure* source_;
  const QuantileMeasure* target_;
};

/// Σ_k (m1_k − m2_k)² + (σ1_k − σ2_k)².
double w2_gaussian(const GaussianMeasure& a, const GaussianMeasure& b);

double w2_quantile(const QuantileMeasure& a, const QuantileMeasure& b);

/// Sort both clouds and pair by rank.
double w2_particles_1d(const ParticleCloud& a, const ParticleCloud& b);

/// W² between a 1D cloud and a 1D Gaussian, ∫₀¹ (Q_emp − Q_g)² du evaluated
/// with one midpoint node per particle.
double w2_particles_gaussian_1d(const ParticleCloud& a, const GaussianMeasure& g);

inline constexpr std::size_t kDefaultExactCap = 2048;

/// Result of a square linear assignment problem.
struct Assignment {
  std::vector<std::size_t> row_to_col;
  double cost = 0.0;  // Σ_i cost(i, row_to_col[i]), summed in row order
};

/// Exact minimum-cost perfect matching (shortest augmenting path /
/// Hungarian method with potentials). Rows are inserted in increasing index
/// order and the entering column is the lowest index among equal reduced
/// costs, so the matching is deterministic.
Assignment solve_assignment(std::span<const double> cost, std::size_t n);

/// Exact W² between equal-size clouds via optimal assignment.
double w2_particles_exact(const ParticleCloud& a, const ParticleCloud& b,
                          std::size_t cap = kDefaultExactCap, Exec exec = Exec::parallel);

/// Brenier map from a to b sampled at a's nodes: T_i = Qb_i.
std::vector<double> ot_map_1d(const QuantileMeasure& a, const QuantileMeasure& b);

/// True iff values are nondecreasing (a 1D map is an OT map iff monotone).
bool check_monotone(std::span<const double> values);

}  // namespace wgf
