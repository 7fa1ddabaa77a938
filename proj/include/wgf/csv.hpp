#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wgf/scheme.hpp"

namespace wgf::cli {

/// Shortest round-trip-safe text for a double (17 significant digits);
/// empty for nullopt.
std::string format_cell(std::optional<double> value);

/// Per-iteration CSV derived from a log:
///   iter,w2_to_target,objective,objective_gap,descent_residual,evi_residual,contraction_ratio
/// descent_residual = G(μ_n) − G(μ_{n−1});
/// evi_residual = W²(μ_n, μ⋆) − (1 − γλ)W²(μ_{n−1}, μ⋆) + 2γ(G(μ_n) − G(μ⋆));
/// contraction_ratio = W²(μ_n, μ⋆) / W²(μ_{n−1}, μ⋆).
struct CsvRow {
  std::size_t iter = 0;
  std::optional<double> w2_to_target, objective, objective_gap, descent_residual, evi_residual, contraction_ratio;
};
std::vector<CsvRow> trajectory_rows(const TrajectoryLog& log);
void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out);

/// Side-by-side columns <scheme>.w2_to_target, <scheme>.objective,
/// <scheme>.objective_gap per log, followed by a `stationary_bias` row with the
/// last W²(μ_n, μ⋆) of each scheme.
void write_compare_csv(const std::vector<TrajectoryLog>& logs, std::ostream& out);

}  // namespace wgf::cli
