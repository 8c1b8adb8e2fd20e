#include "marcuslab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "marcuslab/errors.hpp"

namespace marcuslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

constexpr const char* kDefaults = R"(
seed = 1
out = out
map.kind = PM
map.alpha = 1.5
map.orbit_length = 1000
map.branch_tol = 1e-15
returns.count = 1000
observable.name = circle
observable.calibration = 100000000
fields.b = rotation-dilation
fields.a = zero
fields.box = 4
fields.noise_dim = 2
fields.drift_rate = 1
run.n = 10000
run.replicas = 1
run.xi = 1, 0
run.p = 1.7
run.burn_in = 0
levy.source = limit
levy.atoms = 1 0 0.5; -1 0 0.5
rde.driver = levy
rde.clock = stepped
rde.bridge_steps = 16
rde.theta = 6.283185307179586
validate.suite = circle
stats.h_orbit = 100000000
stats.h_bin = 0.001

threshold.branch_points.rel_error = 0.05
threshold.branch_points.K = 10000
threshold.branch_points.alphas = 1.3, 1.5, 1.7
threshold.tail_index.returns = 1000000
threshold.tail_index.half_width = 0.1
threshold.stable_law.replicas = 10000
threshold.stable_law.n = 10000
threshold.stable_law.max_gap = 0.05
threshold.stable_law.sampler_draws = 100000
threshold.stable_law.sampler_laws = 5
threshold.stable_law.sampler_alphas = 1.2, 1.5, 1.8
threshold.stable_law.sampler_se = 3
threshold.pvar_tight.ns = 1000, 10000, 100000
threshold.pvar_tight.replicas = 200
threshold.pvar_tight.q = 0.95
threshold.pvar_tight.spread = 0.25
threshold.pvar_tight.p_offset = 0.2
threshold.circle.n = 1000
threshold.circle.endpoint = 0.001
threshold.circle.sm1_floor = 0.5
threshold.circle.flow_ns = 10, 100, 1000
threshold.circle.flow_final = 0.01
threshold.circle.ramp_substeps = 256
threshold.circle.resolution = 0.001
threshold.marcus_gap.fields = 100
threshold.marcus_gap.hs = 0.1, 0.01
threshold.marcus_gap.staircase = 200, 400, 800, 1600
threshold.marcus_gap.ratio_drift = 0.2
threshold.marcus_gap.chain_drivers = 50
threshold.marcus_gap.chain_tol = 1e-8
threshold.pvar_oracle.paths = 200
threshold.pvar_oracle.max_points = 12
threshold.pvar_oracle.ps = 1, 1.3, 1.7, 2
threshold.homogenise.n = 10000
threshold.homogenise.replicas = 2000
threshold.homogenise.levy_n = 1000
threshold.homogenise.permutations = 199
threshold.homogenise.quantile = 0.95
)";

}  // namespace

Config Config::defaults() { return parse(kDefaults, "<defaults>"); }

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like key=value: " + assignment);
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty config key");
  entries_[key] = value;
}

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

std::string Config::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key " + key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const auto s = get_string(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(key + ": not a number: " + s);
  return v;
}

std::int64_t Config::get_int(const std::string& key) const {
  const auto s = get_string(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  // Accept integral reals such as 1e6.
  const double d = get_double(key);
  if (d != static_cast<double>(static_cast<std::int64_t>(d))) throw ConfigError(key + ": not an integer: " + s);
  return static_cast<std::int64_t>(d);
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not an unsigned 64-bit integer: " + s);
  return v;
}

std::uint64_t Config::get_u64(const std::string& key) const { return parse_u64(get_string(key)); }

bool Config::get_bool(const std::string& key) const {
  const auto s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": not a boolean: " + s);
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::string s = text;
  for (char& ch : s) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream words(s);
  while (words >> token) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) throw ConfigError("not a number: " + token);
    out.push_back(v);
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key) const { return parse_doubles(get_string(key)); }

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace marcuslab
