#include <doctest.h>

#include <sstream>

#include "wgf/config.hpp"
#include "wgf/csv.hpp"
#include "wgf/errors.hpp"
#include "wgf/validation.hpp"

using namespace wgf;
using namespace wgf::cli;

namespace {

std::string csv_of(const RunConfigFile& f) {
  std::ostringstream os;
  write_trajectory_csv(run(f.scheme), os);
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto f = parse_config(
      "# comment\n"
      "scheme = fb\n"
      "representation = quantile   # trailing comment\n"
      "quantile.m = 128\n"
      "energy = power:2\n"
      "gamma = 0.25\n"
      "iters = 7\n"
      "init.mean = 1.5\n"
      "init.std = 2\n"
      "seed = 18446744073709551615\n");
  CHECK(f.scheme.representation == Representation::quantile);
  CHECK(f.scheme.quantile_nodes == 128);
  CHECK(f.scheme.energy.kind() == InternalEnergy::Kind::power);
  CHECK(f.scheme.energy.exponent() == 2.0);
  CHECK(f.scheme.gamma == 0.25);
  CHECK(f.scheme.n_iters == 7);
  CHECK(f.scheme.initial == GaussianMeasure({1.5}, {4.0}));
  CHECK(f.scheme.seed == 18446744073709551615ull);
}

TEST_CASE("scalars broadcast to every coordinate") {
  const auto f = parse_config("dim = 3\ninit.std = 2\npotential.alpha = 1, 2, 4\ngamma = 0.2\n");
  CHECK(f.scheme.initial.variances() == std::vector<double>(3, 4.0));
  CHECK(f.scheme.potential.smoothness() == 4.0);
  CHECK_THROWS_AS(parse_config("dim = 3\ninit.std = 1, 2\n"), PreconditionError);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(parse_config("gama = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = 0.1\ngamma = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = 0.1x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma =\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("iters = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scheme = euler\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("energy = power:x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("unsafe = yes\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("target = explicit\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("target.mean = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = nan\n"), ConfigError);
}

TEST_CASE("invalid values are precondition violations") {
  try {
    parse_config("gamma = 1.5\npotential.alpha = 1\n");
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("gamma < 1/L") != std::string::npos);
  }
  CHECK_NOTHROW(parse_config("gamma = 1.5\nunsafe = true\n"));
  CHECK_THROWS_AS(parse_config("init.std = 0\n"), PreconditionError);
  CHECK_THROWS_AS(parse_config("energy = power:1\n"), PreconditionError);
  CHECK_THROWS_AS(parse_config("schemes = fb, lmc\nrepresentation = quantile\n"), PreconditionError);
}

TEST_CASE("explicit targets") {
  const auto f = parse_config("target = explicit\ntarget.mean = 1\ntarget.std = 0.5\n");
  CHECK(f.scheme.target_mode == TargetMode::explicit_gaussian);
  CHECK(*f.scheme.target == GaussianMeasure({1.0}, {0.25}));
}

TEST_CASE("every preset parses") {
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    CHECK_NOTHROW(parse_config(p.text));
  }
  const auto ref = parse_config(find_preset("paper-sec5")->text).scheme;
  CHECK(ref.gamma == 0.1);
  CHECK(ref.initial == GaussianMeasure({10.0}, {1e4}));
  CHECK(ref.potential.strong_convexity() == 1.0);
  CHECK(parse_config(find_preset("paper-appendix-d1000")->text).scheme.initial.dim() == 1000);
  CHECK_FALSE(find_preset("nope").has_value());
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_cell(std::nullopt).empty());
  CHECK(format_cell(0.1) == "0.10000000000000001");
  CHECK(format_cell(9901.0) == "9901");
  for (double x : {1.0 / 3.0, 6.748747770602301e-4, -5e-300}) CHECK(std::stod(format_cell(x)) == x);
}

TEST_CASE("reference preset CSV") {
  const auto text = csv_of(parse_config(find_preset("paper-sec5")->text));
  const auto lines = split(text, '\n');
  CHECK(lines.front() == "iter,w2_to_target,objective,objective_gap,descent_residual,evi_residual,contraction_ratio");
  CHECK(lines.size() == 203);  // header, n = 0..200, trailing newline
  CHECK(lines.back().empty());
  CHECK(text.find('\r') == std::string::npos);
  double prev = INFINITY;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    REQUIRE(cells.size() == 7);
    const double w2 = std::stod(cells[1]);
    CHECK(w2 <= prev);
    prev = w2;
    if (i == 1) CHECK(cells[4].empty());
    else CHECK(std::stod(cells[6]) <= 0.9);
  }
  CHECK(prev <= 1e-5);
  CHECK(csv_of(parse_config(find_preset("paper-sec5")->text)) == text);
}

TEST_CASE("particle CSV reruns are byte-identical") {
  const auto f = parse_config("representation = particles\nparticles.n = 5000\niters = 20\nseed = 9\n");
  CHECK(csv_of(f) == csv_of(f));
}

TEST_CASE("compare CSV carries the stationary bias row") {
  const auto f = parse_config(find_preset("compare-fb-lmc")->text);
  std::vector<TrajectoryLog> logs;
  for (auto s : f.compare) {
    auto c = f.scheme;
    c.scheme = s;
    logs.push_back(run(c));
  }
  std::ostringstream os;
  write_compare_csv(logs, os);
  const auto lines = split(os.str(), '\n');
  CHECK(lines.front() == "iter,fb.w2_to_target,fb.objective,fb.objective_gap,lmc.w2_to_target,lmc.objective,lmc.objective_gap");
  const auto bias = split(lines[lines.size() - 2], ',');
  REQUIRE(bias.size() == 7);
  CHECK(bias[0] == "stationary_bias");
  CHECK(std::stod(bias[1]) <= 1e-8);
  CHECK(std::stod(bias[4]) == doctest::Approx(6.748747770602301e-4).epsilon(1e-6));
}

TEST_CASE("validation scopes filter checks") {
  const auto results = run_validation("geodesic");
  REQUIRE_FALSE(results.empty());
  for (const auto& r : results) {
    CHECK(r.scope == "geodesic");
    CHECK(r.pass);
  }
  CHECK_THROWS(run_validation("nonsense"));
}
