#include "wgf/csv.hpp"

#include <cstdio>

namespace wgf::cli {

std::string format_cell(std::optional<double> value) {
  if (!value) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *value);
  return buf;
}

std::vector<CsvRow> trajectory_rows(const TrajectoryLog& log) {
  const double gamma = log.config.gamma;
  const double lambda = log.config.potential.strong_convexity();
  std::vector<CsvRow> rows;
  rows.reserve(log.records.size());
  const IterationRecord* prev = nullptr;
  for (const auto& r : log.records) {
    CsvRow row;
    row.iter = r.n;
    row.w2_to_target = r.w2_to_target;
    row.objective = r.objective;
    row.objective_gap = r.objective_gap;
    if (prev && prev->n + 1 == r.n) {
      if (r.objective && prev->objective) row.descent_residual = *r.objective - *prev->objective;
      if (r.w2_to_target && prev->w2_to_target) {
        if (r.objective_gap)
          row.evi_residual = *r.w2_to_target - (1.0 - gamma * lambda) * *prev->w2_to_target + 2.0 * gamma * *r.objective_gap;
        if (*prev->w2_to_target > 0.0) row.contraction_ratio = *r.w2_to_target / *prev->w2_to_target;
      }
    }
    rows.push_back(row);
    prev = &r;
  }
  return rows;
}

void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out) {
  out << "iter,w2_to_target,objective,objective_gap,descent_residual,evi_residual,contraction_ratio\n";
  for (const auto& row : trajectory_rows(log)) {
    out << row.iter << ',' << format_cell(row.w2_to_target) << ',' << format_cell(row.objective) << ','
        << format_cell(row.objective_gap) << ',' << format_cell(row.descent_residual) << ','
        << format_cell(row.evi_residual) << ',' << format_cell(row.contraction_ratio) << '\n';
  }
}

void write_compare_csv(const std::vector<TrajectoryLog>& logs, std::ostream& out) {
  out << "iter";
  for (const auto& log : logs) {
    const std::string s = to_string(log.config.scheme);
    out << ',' << s << ".w2_to_target," << s << ".objective," << s << ".objective_gap";
  }
  out << '\n';
  std::size_t rows = 0;
  for (const auto& log : logs) rows = std::max(rows, log.records.size());
  for (std::size_t i = 0; i < rows; ++i) {
    std::optional<std::size_t> iter;
    for (const auto& log : logs)
      if (i < log.records.size()) iter = log.records[i].n;
    out << *iter;
    for (const auto& log : logs) {
      if (i < log.records.size()) {
        const auto& r = log.records[i];
        out << ',' << format_cell(r.w2_to_target) << ',' << format_cell(r.objective) << ','
            << format_cell(r.objective_gap);
      } else {
        out << ",,,";
      }
    }
    out << '\n';
  }
  out << "stationary_bias";
  for (const auto& log : logs) {
    const auto last = log.records.empty() ? std::nullopt : log.records.back().w2_to_target;
    out << ',' << format_cell(last) << ",,";
  }
  out << '\n';
}

}  // namespace wgf::cli
