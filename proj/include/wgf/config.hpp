#pragma once

// Run configuration files.
//
// Grammar: one `key = value` pair per line. Blank lines and lines whose first
// non-space character is '#' are ignored; a '#' after a value starts a
// comment. Keys are case-sensitive, may appear at most once, and unknown
// keys are rejected. Lists are comma-separated; a scalar given for a
// per-coordinate key is broadcast to `dim` coordinates.
//
//   scheme          fb | forward | lmc | backward
//   schemes         comma list of schemes (compare only)
//   representation  gaussian | quantile | particles
//   potential.kind  quadratic
//   potential.alpha curvature(s) α > 0
//   potential.anchor anchor point a
//   energy          entropy | power:<m> | zero
//   gamma           step size
//   iters           number of iterations
//   dim             dimension d
//   particles.n     particle count
//   quantile.m      quantile grid size
//   init.mean       initial mean(s)
//   init.std        initial standard deviation(s)
//   target          auto | none | explicit (explicit reads target.mean/std)
//   target.mean     explicit target mean(s)
//   target.std      explicit target standard deviation(s)
//   seed            unsigned 64-bit seed
//   snapshot_every  full-state period for quantile/particle runs
//   out_path        CSV destination
//   unsafe          true | false (permit gamma >= 1/L)
//   jko.tol         Newton stopping tolerance
//   jko.max_iter    Newton iteration cap

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wgf/scheme.hpp"

namespace wgf::cli {

/// Malformed configuration text (syntax, unknown key, bad literal).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfigFile {
  SchemeConfig scheme;
  std::vector<SchemeKind> compare;  // from `schemes`; empty unless given
  std::string out_path;
};

/// Parses and validates. Throws ConfigError for malformed text and
/// PreconditionError when a value violates a scheme precondition.
RunConfigFile parse_config(std::string_view text);
RunConfigFile load_config(const std::filesystem::path& path);

struct Preset {
  std::string name;
  std::string description;
  std::string text;  // configuration file contents
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(std::string_view name);

}  // namespace wgf::cli
