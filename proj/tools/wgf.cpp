// Command-line front end: run, compare, validate, presets.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 precondition violation, 4 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wgf/config.hpp"
#include "wgf/csv.hpp"
#include "wgf/diagnostics.hpp"
#include "wgf/errors.hpp"
#include "wgf/validation.hpp"

namespace {

using namespace wgf;
using namespace wgf::cli;

enum Exit : int { kOk = 0, kValidation = 1, kConfig = 2, kPrecondition = 3, kSolver = 4 };

struct Source {
  std::string config_path;
  std::string preset;
  std::string out;
  bool serial = false;
};

RunConfigFile load(const Source& src) {
  if (!src.preset.empty()) {
    const auto p = find_preset(src.preset);
    if (!p) throw ConfigError("unknown preset '" + src.preset + "' (see `wgf presets`)");
    return parse_config(p->text);
  }
  if (src.config_path.empty()) throw ConfigError("a config file or --preset is required");
  return load_config(src.config_path);
}

int exit_for(const RunFailure& f) {
  return f.kind == RunFailure::Kind::precondition ? kPrecondition : kSolver;
}

// Writes via `write` to `path`, or stdout when path is "-" or empty.
template <class Fn>
void emit(const std::string& path, Fn write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

std::string number(std::optional<double> v) { return v ? format_cell(v) : "n/a"; }

int cmd_run(const Source& src) {
  auto file = load(src);
  if (src.serial) file.scheme.exec = Exec::serial;
  const std::string out_path = src.out.empty() ? file.out_path : src.out;
  const TrajectoryLog log = run(file.scheme);
  emit(out_path, [&](std::ostream& os) { write_trajectory_csv(log, os); });
  std::ostream& msg = (out_path.empty() || out_path == "-") ? std::cerr : std::cout;
  if (!log.ok()) {
    msg << "error at iteration " << log.failure->iteration << ": " << log.failure->message << '\n';
    return exit_for(*log.failure);
  }

  const auto& last = log.records.back();
  bool checks_pass = true;
  std::ostringstream checks;
  if (last.objective) {
    const auto d = descent_check(log);
    checks << " descent=" << (d.pass ? "pass" : "FAIL");
    checks_pass = checks_pass && d.pass;
  }
  if (log.target && log.records.front().w2_to_target && file.scheme.scheme == SchemeKind::fb &&
      file.scheme.potential.strong_convexity() > 0.0) {
    const auto r = rate_check_strongly_convex(log, file.scheme.gamma, file.scheme.potential.strong_convexity());
    checks << " rate=" << (r.pass ? "pass" : "FAIL");
    checks_pass = checks_pass && r.pass;
  }
  msg << to_string(file.scheme.scheme) << '/' << to_string(file.scheme.representation) << " iters=" << last.n
      << " final_w2=" << number(last.w2_to_target) << " final_gap=" << number(last.objective_gap) << checks.str()
      << (out_path.empty() || out_path == "-" ? "" : " csv=" + out_path) << '\n';
  return checks_pass ? kOk : kValidation;
}

int cmd_compare(const Source& src) {
  auto file = load(src);
  if (file.compare.empty()) throw ConfigError("compare needs a `schemes` key listing at least one scheme");
  if (src.serial) file.scheme.exec = Exec::serial;
  const std::string out_path = src.out.empty() ? file.out_path : src.out;
  std::vector<TrajectoryLog> logs;
  for (SchemeKind s : file.compare) {
    SchemeConfig c = file.scheme;
    c.scheme = s;
    logs.push_back(run(c));
  }
  emit(out_path, [&](std::ostream& os) { write_compare_csv(logs, os); });
  std::ostream& msg = (out_path.empty() || out_path == "-") ? std::cerr : std::cout;
  int code = kOk;
  for (const auto& log : logs) {
    msg << to_string(log.config.scheme) << ": ";
    if (!log.ok()) {
      msg << "error at iteration " << log.failure->iteration << ": " << log.failure->message << '\n';
      code = std::max(code, exit_for(*log.failure));
      continue;
    }
    msg << "stationary_w2=" << number(log.records.back().w2_to_target)
        << " final_objective=" << number(log.records.back().objective) << '\n';
  }
  return code;
}

int cmd_validate(const std::optional<std::string>& scope, bool serial) {
  const auto results = run_validation(scope, serial ? Exec::serial : Exec::parallel);
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::printf("%-4s %-34s worst=%-12.4g %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.worst, r.detail.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%zu/%zu checks passed\n", results.size() - failed, results.size());
  if (failed) {
    for (const auto& r : results)
      if (!r.pass) std::printf("failing check: %s\n", r.name.c_str());
    return kValidation;
  }
  return kOk;
}

int cmd_presets() {
  for (const auto& p : presets()) std::printf("%-24s %s\n", p.name.c_str(), p.description.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward-backward Wasserstein gradient flow experiments"};
  app.require_subcommand(1);

  Source run_src, compare_src;
  auto* run_cmd = app.add_subcommand("run", "Run one scheme and write its trajectory CSV");
  run_cmd->add_option("config", run_src.config_path, "Configuration file");
  run_cmd->add_option("--preset", run_src.preset, "Use a built-in preset instead of a file");
  run_cmd->add_option("--out", run_src.out, "CSV destination ('-' for stdout); overrides out_path");
  run_cmd->add_flag("--serial", run_src.serial, "Use the serial kernels");

  auto* compare_cmd = app.add_subcommand("compare", "Run several schemes side by side");
  compare_cmd->add_option("config", compare_src.config_path, "Configuration file with a `schemes` key");
  compare_cmd->add_option("--preset", compare_src.preset, "Use a built-in preset instead of a file");
  compare_cmd->add_option("--out", compare_src.out, "CSV destination ('-' for stdout); overrides out_path");
  compare_cmd->add_flag("--serial", compare_src.serial, "Use the serial kernels");

  std::optional<std::string> scope;
  bool validate_serial = false;
  auto* validate_cmd = app.add_subcommand("validate", "Run the diagnostics suite");
  validate_cmd->add_option("--scope", scope, "Only run one scope")
      ->check(CLI::IsMember(wgf::cli::validation_scopes()));
  validate_cmd->add_flag("--serial", validate_serial, "Run checks one at a time with serial kernels");

  auto* presets_cmd = app.add_subcommand("presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_src);
    if (compare_cmd->parsed()) return cmd_compare(compare_src);
    if (validate_cmd->parsed()) return cmd_validate(scope, validate_serial);
    if (presets_cmd->parsed()) return cmd_presets();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
