#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wgf/kernels.hpp"

namespace wgf::cli {

/// Scopes accepted by `validate --scope`.
const std::vector<std::string>& validation_scopes();

struct CheckResult {
  std::string name;
  std::string scope;
  bool pass = false;
  double worst = 0.0;  // worst residual (or discrepancy) observed
  std::string detail;
};

/// Runs every built-in check, or only the checks of `scope`. Checks are
/// independent and may run concurrently; results come back in a fixed order.
/// Throws std::invalid_argument for an unknown scope.
std::vector<CheckResult> run_validation(std::optional<std::string_view> scope = std::nullopt,
                                        Exec exec = Exec::parallel);

}  // namespace wgf::cli
