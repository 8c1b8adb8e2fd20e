#include "marcuslab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/errors.hpp"
#include "marcuslab/pvariation.hpp"
#include "marcuslab/rde.hpp"
#include "marcuslab/rng.hpp"
#include "marcuslab/stats.hpp"

namespace marcuslab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"map-orbit", "returns", "driver", "fastslow", "levy", "rde", "validate"};
  return kinds;
}

json RunManifest::to_json() const {
  json files_json = json::array();
  for (const auto& f : files) files_json.push_back({{"file", f.file}, {"rows", f.rows}, {"sha256", f.sha256}});
  return {{"experiment", experiment},
          {"artifact_version", version},
          {"config_digest", config_digest},
          {"wall_clock_seconds", wall_clock_seconds},
          {"files", files_json}};
}

IntermittentMap map_from(const Config& cfg) {
  const double alpha = cfg.get_double("map.alpha");
  if (!(alpha > 1.0 && alpha < 2.0)) throw ConfigError("map.alpha must lie in (1, 2)");
  try {
    return IntermittentMap(parse_map_kind(cfg.get_string("map.kind")), alpha);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("map: ") + e.what());
  }
}

VectorField field_from(const Config& cfg) {
  FieldSpec spec;
  spec.noise = cfg.get_string("fields.b");
  spec.drift = cfg.get_string("fields.a");
  spec.box_radius = cfg.get_double("fields.box");
  spec.noise_dim = static_cast<int>(cfg.get_int("fields.noise_dim"));
  spec.drift_rate = cfg.get_double("fields.drift_rate");
  if (cfg.has("fields.a_constant")) {
    const auto c = cfg.get_doubles("fields.a_constant");
    spec.drift_constant = Eigen::Map<const Point>(c.data(), static_cast<Eigen::Index>(c.size()));
  }
  if (cfg.has("fields.b0")) {
    // Row-major m x d matrix; m taken from fields.b0_rows (default 1).
    const auto v = cfg.get_doubles("fields.b0");
    const auto rows = cfg.has("fields.b0_rows") ? cfg.get_int("fields.b0_rows") : 1;
    if (rows < 1 || v.size() % static_cast<std::size_t>(rows) != 0) throw ConfigError("fields.b0: bad shape");
    const auto cols = static_cast<Eigen::Index>(v.size()) / rows;
    spec.affine_b0 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        v.data(), rows, cols);
  }
  return make_field(spec);
}

Observable observable_from(const Config& cfg, const IntermittentMap& map) {
  const auto name = cfg.get_string("observable.name");
  Point centering;
  if (cfg.has("observable.centering")) {
    const auto c = cfg.get_doubles("observable.centering");
    centering = Eigen::Map<const Point>(c.data(), static_cast<Eigen::Index>(c.size()));
  } else {
    centering = calibrate_centering(map, name, cfg.get_int("observable.calibration"), cfg.get_u64("seed"),
                                    substream(0, kCalibration));
  }
  return catalog_observable(name, map, centering);
}

LimitSetup limit_setup(const Config& cfg) {
  const IntermittentMap map = map_from(cfg);
  Observable obs = observable_from(cfg, map);
  InvariantStatsOptions opts;
  opts.bin_width = cfg.get_double("stats.h_bin");
  InvariantStats st = invariant_stats(map, cfg.get_int("stats.h_orbit"), cfg.get_u64("seed"), opts,
                                      substream(0, kInvariantStats));
  LimitLaw law = limit_spectral_measure(map, obs(0.0), obs(1.0), st.h_at_boundary, st.tau_bar);
  return {map, std::move(obs), std::move(st), std::move(law)};
}

SpectralMeasure parse_spectral_measure(const std::string& text) {
  std::vector<SpectralAtom> atoms;
  std::stringstream ss(text);
  std::string chunk;
  while (std::getline(ss, chunk, ';')) {
    const auto v = parse_doubles(chunk);
    if (v.empty()) continue;
    if (v.size() < 2) throw ConfigError("spectral atom needs direction components and a weight: " + chunk);
    Point dir = Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(v.size() - 1));
    if (dir.norm() == 0.0) throw ConfigError("spectral atom with zero direction");
    atoms.push_back({dir / dir.norm(), v.back()});
  }
  try {
    return SpectralMeasure(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("levy.atoms: ") + e.what());
  }
}

CadlagPath ramp_driver(double theta, std::int64_t n, int substeps) {
  if (n < 3) throw std::invalid_argument("ramp_driver: n must be >= 3");
  if (substeps < 1) throw std::invalid_argument("ramp_driver: substeps must be >= 1");
  std::vector<double> t{0.0, 0.5};
  std::vector<double> w{0.0, 0.0};
  const double width = 1.0 / static_cast<double>(n);
  for (int j = 1; j <= substeps; ++j) {
    t.push_back(0.5 + width * j / substeps);
    w.push_back(theta * j / substeps);
  }
  if (t.back() < 1.0) {
    t.push_back(1.0);
    w.push_back(theta);
  }
  Eigen::MatrixXd values = Eigen::Map<const Eigen::RowVectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return CadlagPath(std::move(t), std::move(values), 1.0);
}

namespace {

std::int64_t check_positive(const Config& cfg, const std::string& key) {
  const auto v = cfg.get_int(key);
  if (v < 1) throw ConfigError(key + " must be >= 1");
  return v;
}

Point point_from(const Config& cfg, const std::string& key) {
  const auto v = cfg.get_doubles(key);
  return Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::string> point_strings(const Point& p) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(format_double(p(i)));
  return out;
}

json point_json(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

// Collects output files and their row counts.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& body, std::int64_t rows) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    out << body;
    entries_.push_back({name, rows, sha256_hex(body)});
  }

  void csv(const std::string& name, const CadlagPath& path, const std::vector<std::string>& names) {
    std::ostringstream os;
    write_csv(os, path, names);
    text(name, os.str(), static_cast<std::int64_t>(path.size()));
  }

  void table(const std::string& name, const std::string& header, const std::vector<std::vector<std::string>>& rows) {
    std::string body = header + "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) body += (i ? "," : "") + r[i];
      body += "\n";
    }
    text(name, body, static_cast<std::int64_t>(rows.size()));
  }

  void report(const std::string& name, const json& j) { text(name, j.dump(2) + "\n", 1); }

  const std::vector<ManifestEntry>& entries() const { return entries_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<ManifestEntry> entries_;
};

void run_map_orbit(const Config& cfg, Outputs& out) {
  const IntermittentMap map = map_from(cfg);
  const auto len = check_positive(cfg, "map.orbit_length");
  Philox rng(cfg.get_u64("seed"), substream(0, kSampling));
  std::vector<std::vector<std::string>> rows;
  double q = map.encode(rng.uniform());
  for (std::int64_t k = 0; k < len; ++k) {
    rows.push_back({std::to_string(k), format_double(map.decode(q))});
    q = map.step_encoded(q);
  }
  out.table("orbit.csv", "k,y", rows);
}

void run_returns(const Config& cfg, Outputs& out) {
  const IntermittentMap map = map_from(cfg);
  const auto count = check_positive(cfg, "returns.count");
  const Interval z = map.return_set();
  Philox rng(cfg.get_u64("seed"), substream(0, kSampling));
  double y = rng.uniform(z.lo, z.hi);
  std::vector<std::vector<std::string>> rows;
  std::vector<double> taus;
  for (std::int64_t i = 0; i < count; ++i) {
    double landing = 0.0;
    const auto tau = return_time(map, y, kDefaultMaxIter, &landing);
    rows.push_back({std::to_string(i), format_double(y), std::to_string(tau)});
    taus.push_back(static_cast<double>(tau));
    y = landing;
  }
  out.table("returns.csv", "index,z,tau", rows);
  json summary{{"map", to_string(map.kind())},
               {"alpha", map.alpha()},
               {"returns", count},
               {"tau_mean", std::accumulate(taus.begin(), taus.end(), 0.0) / static_cast<double>(count)},
               {"tau_max", *std::max_element(taus.begin(), taus.end())}};
  const int k = default_hill_k(taus.size());
  if (k >= 2 && static_cast<std::size_t>(k) < taus.size()) {
    try {
      summary["hill"] = to_json(hill_estimator(taus, k));
    } catch (const DegenerateSample&) {
      summary["hill"] = nullptr;
    }
  }
  out.report("returns.json", summary);
}

void run_driver(const Config& cfg, Outputs& out) {
  const IntermittentMap map = map_from(cfg);
  const Observable obs = observable_from(cfg, map);
  const auto n = check_positive(cfg, "run.n");
  const auto replicas = check_positive(cfg, "run.replicas");
  const double p = cfg.get_double("run.p");
  const auto seed = cfg.get_u64("seed");
  std::vector<std::vector<std::string>> rows;
  std::vector<double> pvars, jss;
  for (std::int64_t r = 0; r < replicas; ++r) {
    Philox rng(seed, substream(static_cast<std::uint64_t>(r), kSampling));
    const CadlagPath w = driver_path(map, obs, n, rng);
    const DriverStats s = driver_statistics(w, p);
    std::vector<std::string> row{std::to_string(r), format_double(s.pvar), format_double(s.jump_sum_sq)};
    for (const auto& c : point_strings(s.end_value)) row.push_back(c);
    rows.push_back(std::move(row));
    pvars.push_back(s.pvar);
    jss.push_back(s.jump_sum_sq);
    if (r == 0) out.csv("wn.csv", w, numbered_names("w", obs.dimension()));
  }
  std::string header = "replica,pvar,jumpsumsq";
  for (const auto& name : numbered_names("w", obs.dimension())) header += "," + name + "(1)";
  out.table("driver_stats.csv", header, rows);
  json q;
  for (double level : {0.05, 0.5, 0.95}) {
    q[format_double(level)] = {{"pvar", quantile(pvars, level)}, {"jumpsumsq", quantile(jss, level)}};
  }
  out.report("driver_summary.json", {{"n", n},
                                      {"replicas", replicas},
                                      {"p", p},
                                      {"centering", point_json(obs.centering())},
                                      {"jumpsumsq_bound", std::pow(obs.sup_bound(), 2) *
                                                              std::pow(static_cast<double>(n), 1.0 - 2.0 / map.alpha())},
                                      {"quantiles", q}});
}

void run_fastslow(const Config& cfg, Outputs& out) {
  const IntermittentMap map = map_from(cfg);
  const Observable obs = observable_from(cfg, map);
  const VectorField field = field_from(cfg);
  FastSlowConfig fc;
  fc.map = map;
  fc.n = check_positive(cfg, "run.n");
  fc.xi = point_from(cfg, "run.xi");
  fc.seed = cfg.get_u64("seed");
  fc.stream = substream(0, kSampling);
  fc.burn_in = cfg.get_int("run.burn_in");
  const FastSlowRun run = run_fast_slow(fc, obs, field);
  const SolutionPair check = forward_solve(DriverPath(run.wn, DriftClock::Stepped), field, fc.xi);
  const double agreement = (check.solution.values() - run.xn.values()).cwiseAbs().maxCoeff();
  out.csv("wn.csv", run.wn, numbered_names("w", obs.dimension()));
  out.csv("xn.csv", run.xn, numbered_names("x", field.state_dim()));
  out.report("fastslow.json", {{"map", to_string(map.kind())},
                               {"alpha", map.alpha()},
                               {"n", run.n},
                               {"observable", obs.name()},
                               {"centering", point_json(obs.centering())},
                               {"field", field.name()},
                               {"xi", point_json(run.xi)},
                               {"y0", run.y0},
                               {"wn_end", point_json(run.wn.value(run.wn.size() - 1))},
                               {"xn_end", point_json(run.xn.value(run.xn.size() - 1))},
                               {"forward_solver_max_abs_diff", agreement}});
}

StableLaw law_from(const Config& cfg, json& meta) {
  const auto source = cfg.get_string("levy.source");
  if (source == "limit") {
    const LimitSetup s = limit_setup(cfg);
    meta = {{"source", "limit"},
            {"h_boundary", s.stats.h_at_boundary},
            {"tau_bar", s.stats.tau_bar},
            {"c", s.limit.c},
            {"centering", point_json(s.observable.centering())}};
    return s.limit.law;
  }
  if (source == "config") {
    meta = {{"source", "config"}};
    return StableLaw(map_from(cfg).alpha(), parse_spectral_measure(cfg.get_string("levy.atoms")));
  }
  throw ConfigError("levy.source must be limit or config");
}

json law_json(const StableLaw& law) {
  json atoms = json::array();
  for (const auto& a : law.spectral().atoms()) atoms.push_back({{"direction", point_json(a.direction)}, {"weight", a.weight}});
  return {{"alpha", law.alpha()}, {"atoms", atoms}};
}

void run_levy(const Config& cfg, Outputs& out) {
  json meta;
  const StableLaw law = law_from(cfg, meta);
  const auto n = check_positive(cfg, "run.n");
  const auto replicas = check_positive(cfg, "run.replicas");
  const auto seed = cfg.get_u64("seed");
  std::vector<Point> ends;
  std::vector<std::vector<std::string>> rows;
  for (std::int64_t r = 0; r < replicas; ++r) {
    Philox rng(seed, substream(static_cast<std::uint64_t>(r), kLevy));
    const LevyPathSample s = sample_levy_path(law, static_cast<int>(n), rng);
    if (r == 0) out.csv("levy_path.csv", s.path, numbered_names("l", law.dimension()));
    ends.push_back(s.path.value(s.path.size() - 1));
    std::vector<std::string> row{std::to_string(r)};
    for (const auto& c : point_strings(ends.back())) row.push_back(c);
    rows.push_back(std::move(row));
  }
  json report{{"law", law_json(law)}, {"meta", meta}, {"n", n}, {"replicas", replicas}};
  if (replicas > 1) {
    std::string header = "replica";
    for (const auto& name : numbered_names("l", law.dimension())) header += "," + name + "(1)";
    out.table("levy_endpoints.csv", header, rows);
    if (ends.size() >= 1000) report["ecf"] = to_json(ecf_distance(ends, law, default_u_grid(law)));
  }
  out.report("levy.json", report);
}

void run_rde(const Config& cfg, Outputs& out) {
  const VectorField field = field_from(cfg);
  const Point xi = point_from(cfg, "run.xi");
  const auto seed = cfg.get_u64("seed");
  const auto driver_kind = cfg.get_string("rde.driver");
  const auto clock_name = cfg.get_string("rde.clock");
  if (clock_name != "stepped" && clock_name != "continuous") throw ConfigError("rde.clock must be stepped or continuous");
  const DriftClock clock = clock_name == "stepped" ? DriftClock::Stepped : DriftClock::Continuous;
  json meta;
  CadlagPath w;
  if (driver_kind == "levy") {
    const StableLaw law = law_from(cfg, meta);
    Philox rng(seed, substream(0, kLevy));
    w = sample_levy_path(law, static_cast<int>(check_positive(cfg, "run.n")), rng).path;
    meta["law"] = law_json(law);
  } else if (driver_kind == "ramp") {
    w = ramp_driver(cfg.get_double("rde.theta"), check_positive(cfg, "run.n"),
                    static_cast<int>(cfg.get_int("threshold.circle.ramp_substeps")));
    meta = {{"source", "ramp"}, {"theta", cfg.get_double("rde.theta")}};
  } else {
    throw ConfigError("rde.driver must be levy or ramp");
  }
  if (w.dimension() != field.noise_dim()) throw ConfigError("driver dimension does not match fields.noise_dim");
  SolverOptions opts;
  opts.bridge_steps = static_cast<int>(cfg.get_int("rde.bridge_steps"));
  const DriverPath driver(w, clock);
  const SolutionPair marcus = marcus_solve(driver, field, xi, opts);
  const SolutionPair forward = forward_solve(driver, field, xi, opts);
  const GapReport gap = marcus_forward_gap(driver, field, xi, cfg.get_double("run.p"), 1.0, opts);
  std::vector<std::string> names = numbered_names("w", w.dimension());
  for (const auto& s : numbered_names("x", field.state_dim())) names.push_back(s);
  out.csv("rde_marcus.csv", marcus.pair(), names);
  out.csv("rde_forward.csv", forward.pair(), names);
  out.report("rde.json", {{"driver", meta},
                          {"field", field.name()},
                          {"clock", clock_name},
                          {"marcus_end", point_json(marcus.solution.value(marcus.solution.size() - 1))},
                          {"forward_end", point_json(forward.solution.value(forward.solution.size() - 1))},
                          {"pvar_gap", gap.pvar_gap},
                          {"sup_gap", gap.sup_gap},
                          {"jump_sum_sq", gap.jump_sum_sq},
                          {"gap_bound", gap.bound}});
}

std::vector<std::string> split_suites(const std::string& text) {
  std::vector<std::string> out;
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::string name;
  while (is >> name) {
    if (name == "all") return suite_names();
    out.push_back(name);
  }
  return out;
}

}  // namespace

RunManifest run(const std::string& experiment, const Config& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.experiment = experiment;
  // The output directory does not change the data, so it stays out of the digest.
  std::string canonical;
  std::istringstream lines(cfg.canonical());
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("out = ", 0) != 0) canonical += line + "\n";
  }
  m.config_digest = sha256_hex(experiment + "\n" + canonical);
  Outputs out(cfg.get_string("out"));
  if (experiment == "map-orbit") {
    run_map_orbit(cfg, out);
  } else if (experiment == "returns") {
    run_returns(cfg, out);
  } else if (experiment == "driver") {
    run_driver(cfg, out);
  } else if (experiment == "fastslow") {
    run_fastslow(cfg, out);
  } else if (experiment == "levy") {
    run_levy(cfg, out);
  } else if (experiment == "rde") {
    run_rde(cfg, out);
  } else if (experiment == "validate") {
    const auto suites = split_suites(cfg.get_string("validate.suite"));
    if (suites.empty()) throw ConfigError("validate.suite is empty");
    for (const auto& s : suites) {
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) throw UnknownSuite(s);
    }
    for (const auto& s : suites) {
      json report = run_suite(s, cfg);
      out.report(s + ".json", report);
      m.reports.push_back(std::move(report));
    }
  } else {
    throw ConfigError("unknown experiment: " + experiment);
  }
  m.files = out.entries();
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream mf(out.dir() / "manifest.json", std::ios::binary);
  mf << m.to_json().dump(2) << "\n";
  return m;
}

}  // namespace marcuslab
