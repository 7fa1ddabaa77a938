#include "wgf/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wgf/errors.hpp"

namespace wgf::cli {

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "scheme",     "schemes",     "representation", "potential.kind", "potential.alpha", "potential.anchor",
    "energy",     "gamma",       "iters",          "dim",            "particles.n",     "quantile.m",
    "init.mean",  "init.std",    "target",         "target.mean",    "target.std",      "seed",
    "snapshot_every", "out_path", "unsafe",        "jko.tol",        "jko.max_iter"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("key '" + key + "': '" + text + "' is not a non-negative integer");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_reals(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_real(key, item));
  return out;
}

SchemeKind to_scheme(const std::string& text) {
  if (text == "fb") return SchemeKind::fb;
  if (text == "forward") return SchemeKind::forward;
  if (text == "lmc") return SchemeKind::lmc;
  if (text == "backward") return SchemeKind::backward;
  throw ConfigError("scheme must be one of fb|forward|lmc|backward, got '" + text + "'");
}

Representation to_representation(const std::string& text) {
  if (text == "gaussian") return Representation::gaussian;
  if (text == "quantile") return Representation::quantile;
  if (text == "particles") return Representation::particles;
  throw ConfigError("representation must be one of gaussian|quantile|particles, got '" + text + "'");
}

InternalEnergy to_energy(const std::string& text) {
  if (text == "entropy") return InternalEnergy::negative_entropy();
  if (text == "zero") return InternalEnergy::zero();
  if (text.rfind("power:", 0) == 0) {
    const double m = to_real("energy", text.substr(6));
    if (!(m > 1.0)) throw PreconditionError("energy power:<m> requires m > 1");
    return InternalEnergy::power(m);
  }
  throw ConfigError("energy must be entropy|power:<m>|zero, got '" + text + "'");
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("key '" + key + "' must be true or false");
}

class Entries {
 public:
  explicit Entries(std::map<std::string, std::string, std::less<>> kv) : kv_(std::move(kv)) {}

  std::optional<std::string> get(std::string_view key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<double> per_coordinate(const std::string& key, std::size_t dim, std::vector<double> fallback) const {
    auto text = get(key);
    std::vector<double> v = text ? to_reals(key, *text) : std::move(fallback);
    if (v.size() == 1 && dim > 1) v.assign(dim, v.front());
    if (v.size() != dim)
      throw PreconditionError("key '" + key + "' has " + std::to_string(v.size()) + " values but dim = " +
                              std::to_string(dim));
    return v;
  }

 private:
  std::map<std::string, std::string, std::less<>> kv_;
};

std::vector<double> squares(std::vector<double> v) {
  for (double& x : v) {
    if (!(x > 0.0)) throw PreconditionError("standard deviations must be > 0");
    x *= x;
  }
  return v;
}

}  // namespace

RunConfigFile parse_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!kKnownKeys.contains(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    if (!kv.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  const Entries e(std::move(kv));

  RunConfigFile out;
  SchemeConfig& c = out.scheme;
  if (auto v = e.get("scheme")) c.scheme = to_scheme(*v);
  if (auto v = e.get("schemes"))
    for (const auto& s : split_list(*v)) out.compare.push_back(to_scheme(s));
  if (auto v = e.get("representation")) c.representation = to_representation(*v);
  if (auto v = e.get("energy")) c.energy = to_energy(*v);
  if (auto v = e.get("gamma")) c.gamma = to_real("gamma", *v);
  if (auto v = e.get("iters")) c.n_iters = to_unsigned("iters", *v);
  const std::size_t dim = e.get("dim") ? to_unsigned("dim", *e.get("dim")) : 1;
  if (dim == 0) throw PreconditionError("dim must be >= 1");
  if (auto v = e.get("particles.n")) c.particle_count = to_unsigned("particles.n", *v);
  if (auto v = e.get("quantile.m")) c.quantile_nodes = to_unsigned("quantile.m", *v);
  if (auto v = e.get("seed")) c.seed = to_unsigned("seed", *v);
  if (auto v = e.get("snapshot_every")) c.snapshot_every = to_unsigned("snapshot_every", *v);
  if (auto v = e.get("unsafe")) c.unsafe = to_bool("unsafe", *v);
  if (auto v = e.get("jko.tol")) c.jko.tol = to_real("jko.tol", *v);
  if (auto v = e.get("jko.max_iter")) c.jko.max_iter = to_unsigned("jko.max_iter", *v);
  if (auto v = e.get("out_path")) out.out_path = *v;

  const std::string kind = e.get("potential.kind").value_or("quadratic");
  if (kind != "quadratic")
    throw ConfigError("potential.kind must be 'quadratic' (custom potentials are library-only)");
  c.potential = Potential::quadratic(e.per_coordinate("potential.alpha", dim, {1.0}),
                                     e.per_coordinate("potential.anchor", dim, {0.0}));
  c.initial = GaussianMeasure(e.per_coordinate("init.mean", dim, {0.0}),
                              squares(e.per_coordinate("init.std", dim, {1.0})));

  const std::string target = e.get("target").value_or("auto");
  if (target == "auto") {
    c.target_mode = TargetMode::automatic;
  } else if (target == "none") {
    c.target_mode = TargetMode::none;
  } else if (target == "explicit") {
    if (!e.get("target.mean") || !e.get("target.std"))
      throw ConfigError("target = explicit needs target.mean and target.std");
    c.target_mode = TargetMode::explicit_gaussian;
    c.target = GaussianMeasure(e.per_coordinate("target.mean", dim, {}),
                               squares(e.per_coordinate("target.std", dim, {})));
  } else {
    throw ConfigError("target must be auto|none|explicit, got '" + target + "'");
  }
  if (target != "explicit" && (e.get("target.mean") || e.get("target.std")))
    throw ConfigError("target.mean/target.std are only allowed with target = explicit");
  if (!(c.jko.tol > 0.0)) throw PreconditionError("jko.tol must be > 0");

  c.validate();
  for (SchemeKind s : out.compare) {
    SchemeConfig variant = c;
    variant.scheme = s;
    variant.validate();
  }
  return out;
}

RunConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"paper-sec5", "FB on F = x^2/2 + negative entropy, gamma = 0.1, mu0 = N(10, 100^2), closed-form Gaussian",
       "scheme = fb\nrepresentation = gaussian\npotential.alpha = 1\nenergy = entropy\ngamma = 0.1\niters = 200\n"
       "dim = 1\ninit.mean = 10\ninit.std = 100\ntarget = auto\nout_path = paper-sec5.csv\n"},
      {"paper-appendix-d1000", "The same experiment for the product Gaussian in dimension 1000",
       "scheme = fb\nrepresentation = gaussian\npotential.alpha = 1\nenergy = entropy\ngamma = 0.1\niters = 200\n"
       "dim = 1000\ninit.mean = 10\ninit.std = 100\ntarget = auto\nout_path = paper-appendix-d1000.csv\n"},
      {"reference-particles", "The reference experiment with 10^5 particles and the affine particle JKO",
       "scheme = fb\nrepresentation = particles\npotential.alpha = 1\nenergy = entropy\ngamma = 0.1\niters = 200\n"
       "dim = 1\nparticles.n = 100000\ninit.mean = 10\ninit.std = 100\nseed = 42\ntarget = auto\n"
       "out_path = reference-particles.csv\n"},
      {"reference-quantile", "The reference experiment on a 4096-node quantile grid with the Newton JKO solver",
       "scheme = fb\nrepresentation = quantile\npotential.alpha = 1\nenergy = entropy\ngamma = 0.1\niters = 200\n"
       "dim = 1\nquantile.m = 4096\ninit.mean = 10\ninit.std = 100\ntarget = auto\nout_path = reference-quantile.csv\n"},
      {"compare-fb-lmc", "FB versus Langevin (closed form) on the reference experiment, 500 iterations",
       "schemes = fb, lmc\nrepresentation = gaussian\npotential.alpha = 1\nenergy = entropy\ngamma = 0.1\n"
       "iters = 500\ndim = 1\ninit.mean = 10\ninit.std = 100\ntarget = auto\nout_path = compare-fb-lmc.csv\n"},
      {"compare-fb-backward", "FB versus the all-backward JKO scheme on a 2048-node grid",
       "schemes = fb, backward\nrepresentation = quantile\nquantile.m = 2048\npotential.alpha = 1\n"
       "energy = entropy\ngamma = 0.1\niters = 200\ndim = 1\ninit.mean = 10\ninit.std = 100\ntarget = auto\n"
       "out_path = compare-fb-backward.csv\n"},
      {"compare-fb-forward-zero", "FB versus plain gradient descent when H is zero (the JKO step is the identity)",
       "schemes = fb, forward\nrepresentation = gaussian\npotential.alpha = 1\nenergy = zero\ngamma = 0.1\n"
       "iters = 200\ndim = 1\ninit.mean = 10\ninit.std = 100\ntarget = none\nout_path = compare-fb-forward-zero.csv\n"},
  };
  return all;
}

std::optional<Preset> find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

}  // namespace wgf::cli
