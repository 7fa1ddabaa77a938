#include "wgf/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wgf/errors.hpp"

namespace wgf {

using detail::require;

Coupling1D::Coupling1D(const QuantileMeasure& source, const QuantileMeasure& target)
    : source_(&source), target_(&target) {
  require(source.size() == target.size(), "Coupling1D: node counts differ");
}

double Coupling1D::cost() const {
  const std::size_t m = source_->size();
  std::vector<double> sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = (*source_)[i] - (*target_)[i];
    sq[i] = d * d;
  }
  return kernels::pairwise_sum(sq) / static_cast<double>(m);
}

double w2_gaussian(const GaussianMeasure& a, const GaussianMeasure& b) {
  require(a.dim() == b.dim(), "w2_gaussian: dimension mismatch");
  std::vector<double> terms(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const double dm = a.mean()[k] - b.mean()[k];
    const double ds = a.stddev(k) - b.stddev(k);
    terms[k] = dm * dm + ds * ds;
  }
  return kernels::pairwise_sum(terms);
}

double w2_quantile(const QuantileMeasure& a, const QuantileMeasure& b) {
  require(a.size() == b.size(), "w2_quantile: node counts differ");
  return Coupling1D(a, b).cost();
}

namespace {

std::vector<double> sorted_coords(const ParticleCloud& c) {
  std::vector<double> x(c.coords().begin(), c.coords().end());
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

double w2_particles_1d(const ParticleCloud& a, const ParticleCloud& b) {
  require(a.dim() == 1 && b.dim() == 1, "w2_particles_1d: clouds must be 1D");
  require(a.size() == b.size(), "w2_particles_1d: particle counts differ");
  const auto xa = sorted_coords(a);
  const auto xb = sorted_coords(b);
  std::vector<double> sq(xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i) sq[i] = (xa[i] - xb[i]) * (xa[i] - xb[i]);
  return kernels::pairwise_sum(sq) / static_cast<double>(xa.size());
}

double w2_particles_gaussian_1d(const ParticleCloud& a, const GaussianMeasure& g) {
  require(a.dim() == 1 && g.dim() == 1, "w2_particles_gaussian_1d: inputs must be 1D");
  const auto x = sorted_coords(a);
  const std::size_t n = x.size();
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = g.mean()[0] + g.stddev(0) * normal_quantile(QuantileMeasure::node(i, n));
    sq[i] = (x[i] - q) * (x[i] - q);
  }
  return kernels::pairwise_sum(sq) / static_cast<double>(n);
}

Assignment solve_assignment(std::span<const double> cost, std::size_t n) {
  require(cost.size() == n * n, "solve_assignment: cost matrix must be n x n");
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is a virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.row_to_col[owner[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) out.cost += cost[i * n + out.row_to_col[i]];
  return out;
}

double w2_particles_exact(const ParticleCloud& a, const ParticleCloud& b, std::size_t cap, Exec exec) {
  require(a.dim() == b.dim(), "w2_particles_exact: dimension mismatch");
  require(a.size() == b.size(), "w2_particles_exact: particle counts differ");
  require(a.size() <= cap, "w2_particles_exact: N = " + std::to_string(a.size()) +
                               " exceeds the exact-solver cap " + std::to_string(cap));
  const std::size_t n = a.size();
  const auto cost = kernels::squared_distance_matrix(a.coords(), b.coords(), n, a.dim(), exec);
  return solve_assignment(cost, n).cost / static_cast<double>(n);
}

std::vector<double> ot_map_1d(const QuantileMeasure& a, const QuantileMeasure& b) {
  require(a.size() == b.size(), "ot_map_1d: node counts differ");
  return Coupling1D(a, b).map();
}

bool check_monotone(std::span<const double> values) {
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    if (values[i + 1] < values[i]) return false;
  return true;
}

}  // namespace wgf
