#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path and an
// OpenMP path selected by Exec; both produce bit-identical results because
// work is split into fixed-size blocks whose layout does not depend on the
// thread count, and block results are combined in a fixed order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wgf {

enum class Exec { serial, parallel };

namespace kernels {

/// Block length (in scalars) for RNG streams and partial reductions.
inline constexpr std::size_t kBlock = 4096;

/// Pairwise (cascade) summation; error O(log n · eps) instead of O(n · eps).
double pairwise_sum(std::span<const double> values);

struct ColumnMoments {
  std::vector<double> mean;
  std::vector<double> variance;  // 1/N normalized
};

/// Per-column mean and variance of a row-major n × d matrix.
ColumnMoments column_moments(std::span<const double> rows, std::size_t n, std::size_t d,
                             Exec exec = Exec::parallel);

/// Fills `out` with i.i.d. standard normals. Block b draws from its own
/// generator seeded by derive_seed(seed, b).
void fill_standard_normal(std::span<double> out, std::uint64_t seed, Exec exec = Exec::parallel);

/// splitmix64 finalizer applied to (seed, stream), used to derive
/// independent per-block seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// rows[i] ← rows[i] − γ ∇F(rows[i]) for a row-major n × d matrix.
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;
void gradient_step(std::span<double> rows, std::size_t n, std::size_t d, const GradientFn& grad,
                   double gamma, Exec exec = Exec::parallel);

/// x ← x + scale · noise, elementwise.
void add_scaled(std::span<double> x, std::span<const double> noise, double scale,
                Exec exec = Exec::parallel);

/// rows[i][k] ← center[k] + factor[k] · (rows[i][k] − center[k]).
void affine_columns(std::span<double> rows, std::size_t n, std::size_t d,
                    std::span<const double> center, std::span<const double> factor,
                    Exec exec = Exec::parallel);

/// q[i] ← q[i] − γ f'(q[i]).
void node_gradient_step(std::span<double> q, const std::function<double(double)>& derivative,
                        double gamma, Exec exec = Exec::parallel);

/// cost[i*n + j] = ‖a_i − b_j‖² for two row-major n × d matrices.
std::vector<double> squared_distance_matrix(std::span<const double> a, std::span<const double> b,
                                            std::size_t n, std::size_t d,
                                            Exec exec = Exec::parallel);

}  // namespace kernels
}  // namespace wgf
