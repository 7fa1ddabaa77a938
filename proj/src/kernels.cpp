#include "wgf/kernels.hpp"

#include <algorithm>
#include <random>

namespace wgf::kernels {

namespace {

double pairwise_strided(const double* x, std::size_t count, std::size_t stride) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += x[i * stride];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_strided(x, half, stride) + pairwise_strided(x + half * stride, count - half, stride);
}

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_strided(values.data(), values.size(), 1);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ColumnMoments column_moments(std::span<const double> rows, std::size_t n, std::size_t d, Exec exec) {
  const std::size_t blocks = block_count(n);
  std::vector<double> partial(blocks * d);
  const auto row_span = [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    return std::pair{lo, std::min(n, lo + kBlock) - lo};
  };

  // pass 1: means
  const auto sum_block = [&](std::size_t b) {
    auto [lo, len] = row_span(b);
    for (std::size_t k = 0; k < d; ++k)
      partial[b * d + k] = pairwise_strided(rows.data() + lo * d + k, len, d);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) sum_block(b);
  } else {
    for (std::size_t b = 0; b < blocks; ++b) sum_block(b);
  }
  ColumnMoments out;
  out.mean.resize(d);
  for (std::size_t k = 0; k < d; ++k)
    out.mean[k] = pairwise_strided(partial.data() + k, blocks, d) / static_cast<double>(n);

  // pass 2: centered second moments
  const auto sq_block = [&](std::size_t b) {
    auto [lo, len] = row_span(b);
    std::vector<double> dev(len);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < len; ++i) {
        const double c = rows[(lo + i) * d + k] - out.mean[k];
        dev[i] = c * c;
      }
      partial[b * d + k] = pairwise_sum(dev);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) sq_block(b);
  } else {
    for (std::size_t b = 0; b < blocks; ++b) sq_block(b);
  }
  out.variance.resize(d);
  for (std::size_t k = 0; k < d; ++k)
    out.variance[k] = pairwise_strided(partial.data() + k, blocks, d) / static_cast<double>(n);
  return out;
}

void fill_standard_normal(std::span<double> out, std::uint64_t seed, Exec exec) {
  const std::size_t blocks = block_count(out.size());
  const auto fill_block = [&](std::size_t b) {
    std::mt19937_64 engine(derive_seed(seed, b));
    std::normal_distribution<double> normal;
    const std::size_t hi = std::min(out.size(), (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < hi; ++i) out[i] = normal(engine);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) fill_block(b);
  } else {
    for (std::size_t b = 0; b < blocks; ++b) fill_block(b);
  }
}

void gradient_step(std::span<double> rows, std::size_t n, std::size_t d, const GradientFn& grad,
                   double gamma, Exec exec) {
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<double> g(d);
#pragma omp for schedule(static)
      for (std::size_t i = 0; i < n; ++i) {
        auto x = rows.subspan(i * d, d);
        grad(x, g);
        for (std::size_t k = 0; k < d; ++k) x[k] -= gamma * g[k];
      }
    }
  } else {
    std::vector<double> g(d);
    for (std::size_t i = 0; i < n; ++i) {
      auto x = rows.subspan(i * d, d);
      grad(x, g);
      for (std::size_t k = 0; k < d; ++k) x[k] -= gamma * g[k];
    }
  }
}

void add_scaled(std::span<double> x, std::span<const double> noise, double scale, Exec exec) {
  const std::size_t n = x.size();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) x[i] += scale * noise[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) x[i] += scale * noise[i];
  }
}

void affine_columns(std::span<double> rows, std::size_t n, std::size_t d,
                    std::span<const double> center, std::span<const double> factor, Exec exec) {
  const auto apply = [&](std::size_t i) {
    for (std::size_t k = 0; k < d; ++k) {
      double& x = rows[i * d + k];
      x = center[k] + factor[k] * (x - center[k]);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) apply(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) apply(i);
  }
}

void node_gradient_step(std::span<double> q, const std::function<double(double)>& derivative,
                        double gamma, Exec exec) {
  const std::size_t n = q.size();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) q[i] -= gamma * derivative(q[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) q[i] -= gamma * derivative(q[i]);
  }
}

std::vector<double> squared_distance_matrix(std::span<const double> a, std::span<const double> b,
                                            std::size_t n, std::size_t d, Exec exec) {
  std::vector<double> cost(n * n);
  const auto row = [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[i * d + k] - b[j * d + k];
        s += diff * diff;
      }
      cost[i * n + j] = s;
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) row(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) row(i);
  }
  return cost;
}

}  // namespace wgf::kernels
