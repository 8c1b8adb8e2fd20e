#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include "marcuslab/errors.hpp"
#include "marcuslab/experiments.hpp"
#include "marcuslab/pvariation.hpp"
#include "marcuslab/rde.hpp"
#include "marcuslab/rng.hpp"
#include "marcuslab/skorokhod.hpp"
#include "marcuslab/stats.hpp"

namespace marcuslab {

using json = nlohmann::ordered_json;

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"circle",     "marcus-gap", "stable-law",   "tail-index",
                                              "pvar-tight", "homogenise", "pvar-oracle", "branch-points"};
  return names;
}

namespace {

json criterion(const std::string& id, const std::string& name, bool gating, bool pass, json numbers, json threshold) {
  return {{"id", id},
          {"name", name},
          {"gating", gating},
          {"pass", pass},
          {"numbers", std::move(numbers)},
          {"threshold", std::move(threshold)}};
}

json point_json(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

std::string t(const std::string& suite, const std::string& key) { return "threshold." + suite + "." + key; }

// A1.
json suite_branch_points(const Config& cfg) {
  const auto K = static_cast<int>(cfg.get_int(t("branch_points", "K")));
  const double tol = cfg.get_double(t("branch_points", "rel_error"));
  const double solve_tol = cfg.get_double("map.branch_tol");
  json rows = json::array();
  bool pass = true;
  for (double alpha : cfg.get_doubles(t("branch_points", "alphas"))) {
    const IntermittentMap map(MapKind::PM, alpha);
    const BranchPoints bp = branch_points(map, K, solve_tol);
    const double aK = bp.a.back();
    const double scaled = aK * std::pow(static_cast<double>(K), alpha);
    const double rel = std::abs(scaled * 3.0 / std::pow(alpha, alpha) - 1.0);
    pass = pass && rel < tol;
    rows.push_back({{"alpha", alpha},
                    {"a_K", aK},
                    {"a_K_K_alpha", scaled},
                    {"alpha_alpha_over_3", std::pow(alpha, alpha) / 3.0},
                    {"rel_error", rel},
                    {"max_residual", *std::max_element(bp.residuals.begin(), bp.residuals.end())}});
  }
  return json::array({criterion("A1", "branch-point asymptotics", true, pass, {{"K", K}, {"rows", rows}},
                                {{"rel_error", tol}})});
}

// A2.
json suite_tail_index(const Config& cfg) {
  const IntermittentMap map(MapKind::PM, 1.5);
  const auto count = cfg.get_int(t("tail_index", "returns"));
  const double half_width = cfg.get_double(t("tail_index", "half_width"));
  Philox rng(cfg.get_u64("seed"), substream(0, kAuxiliary));
  const Interval z = map.return_set();
  double y = rng.uniform(z.lo, z.hi);
  std::vector<double> taus;
  taus.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    double landing = 0.0;
    taus.push_back(static_cast<double>(return_time(map, y, kDefaultMaxIter, &landing)));
    y = landing;
  }
  const int k = default_hill_k(taus.size());
  const TailEstimate est = hill_estimator(taus, k);
  const bool pass = std::abs(est.alpha_hat - map.alpha()) < half_width;
  json numbers = to_json(est);
  numbers["alpha"] = map.alpha();
  numbers["tau_mean"] = std::accumulate(taus.begin(), taus.end(), 0.0) / static_cast<double>(taus.size());
  return json::array(
      {criterion("A2", "return-time tail index", true, pass, numbers, {{"half_width", half_width}, {"k_rule", "N^0.6"}})});
}

// Spectral measure with 1-3 random atoms in dimension d.
SpectralMeasure random_measure(int d, Philox& rng) {
  const int count = 1 + static_cast<int>(rng() % 3);
  std::vector<SpectralAtom> atoms;
  for (int i = 0; i < count; ++i) {
    Point s(d);
    for (int c = 0; c < d; ++c) s(c) = rng.normal();
    atoms.push_back({s / s.norm(), rng.uniform(0.2, 2.0)});
  }
  return SpectralMeasure(atoms);
}

// A3 and A10.
json suite_stable_law(const Config& cfg) {
  Config c = cfg;
  c.set("map.kind", "PM");
  c.set("map.alpha", "1.5");
  c.set("observable.name", "circle");
  const LimitSetup setup = limit_setup(c);
  const auto n = cfg.get_int(t("stable_law", "n"));
  const auto replicas = cfg.get_int(t("stable_law", "replicas"));
  const double max_gap = cfg.get_double(t("stable_law", "max_gap"));
  const auto seed = cfg.get_u64("seed");
  std::vector<Point> ends;
  ends.reserve(static_cast<std::size_t>(replicas));
  for (std::int64_t r = 0; r < replicas; ++r) {
    Philox rng(seed, substream(static_cast<std::uint64_t>(r), kSampling));
    ends.push_back(driver_endpoint(setup.map, setup.observable, n, rng));
  }
  const auto grid = default_u_grid(setup.limit.law);
  const EcfReport ecf = ecf_distance(ends, setup.limit.law, grid);
  // Diagnostic split: gaps along atom directions only vs along their complements.
  double atom_gap = 0.0, complement_gap = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    bool along_atom = false;
    for (const auto& a : setup.limit.law.spectral().atoms()) {
      along_atom = along_atom || std::abs(std::abs(grid[j].normalized().dot(a.direction)) - 1.0) < 1e-12;
    }
    (along_atom ? atom_gap : complement_gap) = std::max(along_atom ? atom_gap : complement_gap, ecf.abs_gap[j]);
  }
  // Sample standard deviation of W_n(1) along each coordinate.
  Point mean = Point::Zero(setup.observable.dimension()), sq = mean;
  for (const auto& e : ends) {
    mean += e;
    sq += e.cwiseProduct(e);
  }
  mean /= static_cast<double>(ends.size());
  const Point sd = (sq / static_cast<double>(ends.size()) - mean.cwiseProduct(mean)).cwiseSqrt();
  json a3_numbers{{"n", n},
                  {"replicas", replicas},
                  {"centering", point_json(setup.observable.centering())},
                  {"v0", point_json(setup.observable(0.0))},
                  {"v1", point_json(setup.observable(1.0))},
                  {"h_boundary", setup.stats.h_at_boundary},
                  {"tau_bar", setup.stats.tau_bar},
                  {"c", setup.limit.c},
                  {"lambda_mass", setup.limit.law.spectral().total_mass()},
                  {"max_abs_gap", ecf.max_abs_gap},
                  {"max_gap_along_atoms", atom_gap},
                  {"max_gap_along_complements", complement_gap},
                  {"coordinate_sd", point_json(sd)},
                  {"ecf", to_json(ecf)}};
  json a3 = criterion("A3", "stable limit of W_n(1)", true, ecf.max_abs_gap < max_gap, a3_numbers, {{"max_gap", max_gap}});

  const auto draws = cfg.get_int(t("stable_law", "sampler_draws"));
  const auto laws = cfg.get_int(t("stable_law", "sampler_laws"));
  const double se_limit = cfg.get_double(t("stable_law", "sampler_se"));
  json rows = json::array();
  bool pass = true;
  std::uint64_t stream = 0;
  for (double alpha : cfg.get_doubles(t("stable_law", "sampler_alphas"))) {
    for (std::int64_t i = 0; i < laws; ++i, ++stream) {
      Philox rng(seed, substream(stream, kLevy));
      const int d = 1 + static_cast<int>(i % 3);
      const StableLaw law(alpha, random_measure(d, rng));
      std::vector<Point> xs;
      xs.reserve(static_cast<std::size_t>(draws));
      for (std::int64_t k = 0; k < draws; ++k) xs.push_back(sample_stable_vector(law, rng));
      const EcfReport r = ecf_distance(xs, law, default_u_grid(law));
      pass = pass && r.max_gap_in_se < se_limit;
      rows.push_back({{"alpha", alpha},
                      {"dimension", d},
                      {"atoms", law.spectral().atoms().size()},
                      {"grid_points", r.u_grid.size()},
                      {"max_abs_gap", r.max_abs_gap},
                      {"max_gap_in_se", r.max_gap_in_se}});
    }
  }
  json a10 = criterion("A10", "stable sampler self-consistency", true, pass, {{"draws", draws}, {"laws", rows}},
                       {{"max_gap_in_se", se_limit}});
  return json::array({a3, a10});
}

// A4.
json suite_pvar_tight(const Config& cfg) {
  Config c = cfg;
  c.set("map.kind", "PM");
  c.set("map.alpha", "1.5");
  const IntermittentMap map = map_from(c);
  const Observable obs = observable_from(c, map);
  const double p = map.alpha() + cfg.get_double(t("pvar_tight", "p_offset"));
  const auto replicas = cfg.get_int(t("pvar_tight", "replicas"));
  const auto seed = cfg.get_u64("seed");
  std::map<std::int64_t, std::vector<double>> series;
  bool bound_ok = true;
  for (double nd : cfg.get_doubles(t("pvar_tight", "ns"))) {
    const auto n = static_cast<std::int64_t>(nd);
    const double bound = std::pow(obs.sup_bound(), 2) * std::pow(static_cast<double>(n), 1.0 - 2.0 / map.alpha());
    for (std::int64_t r = 0; r < replicas; ++r) {
      Philox rng(seed, substream(static_cast<std::uint64_t>(r), kSampling));
      const CadlagPath w = driver_path(map, obs, n, rng);
      const DriverStats s = driver_statistics(w, p);
      series[n].push_back(s.pvar);
      bound_ok = bound_ok && s.jump_sum_sq <= bound;
    }
  }
  const QuantileStability qs = quantile_stability(series, cfg.get_double(t("pvar_tight", "q")),
                                                  cfg.get_double(t("pvar_tight", "spread")));
  json numbers = to_json(qs);
  numbers["p"] = p;
  numbers["replicas"] = replicas;
  numbers["observable"] = obs.name();
  numbers["jumpsumsq_within_bound"] = bound_ok;
  return json::array({criterion("A4", "p-variation tightness proxy", true, qs.pass, numbers,
                                {{"spread", qs.threshold}, {"q", qs.q}})});
}

// A5.
json suite_circle(const Config& cfg) {
  const double theta = 2.0 * std::numbers::pi;
  const int substeps = static_cast<int>(cfg.get_int(t("circle", "ramp_substeps")));
  const double res = cfg.get_double(t("circle", "resolution"));
  const double endpoint_tol = cfg.get_double(t("circle", "endpoint"));
  const double floor = cfg.get_double(t("circle", "sm1_floor"));
  const double flow_final = cfg.get_double(t("circle", "flow_final"));
  const VectorField field = rotation_field(1, 2.0);
  Point xi(2);
  xi << 1.0, 0.0;
  SolverOptions opts;
  opts.refine_tol = 1e-12;

  // Limit pair (theta 1_{[1/2, 1]}, (1, 0)).
  Eigen::MatrixXd lim(3, 3);
  lim << 0.0, theta, theta, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0;
  const CadlagPath limit({0.0, 0.5, 1.0}, lim, 1.0);
  const PathFunction phi = PathFunction::flow_bridge(field, 256);

  auto solve_pair = [&](std::int64_t n) {
    return marcus_solve(DriverPath(ramp_driver(theta, n, substeps)), field, xi, opts).pair();
  };

  const CadlagPath main_pair = solve_pair(cfg.get_int(t("circle", "n")));
  const Point x_end = main_pair.value(main_pair.size() - 1).tail(2);
  const double endpoint_err = (x_end - xi).norm();

  json rows = json::array();
  double min_linear = std::numeric_limits<double>::infinity();
  std::vector<double> flow_dist;
  for (double nd : cfg.get_doubles(t("circle", "flow_ns"))) {
    const auto n = static_cast<std::int64_t>(nd);
    const CadlagPath pair = solve_pair(n);
    const double lin = sm1_distance(pair, limit, res);
    const double flow = sm1_distance(pair, limit, res, PathFunction::linear(), phi);
    min_linear = std::min(min_linear, lin);
    flow_dist.push_back(flow);
    rows.push_back({{"n", n}, {"sm1_linear", lin}, {"sm1_flow_bridged", flow}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < flow_dist.size(); ++i) decreasing = decreasing && flow_dist[i] < flow_dist[i - 1];
  const bool pass = endpoint_err < endpoint_tol && min_linear > floor && decreasing && flow_dist.back() < flow_final;
  return json::array({criterion("A5", "circle ramp", true, pass,
                                {{"endpoint_error", endpoint_err},
                                 {"x_end", point_json(x_end)},
                                 {"min_sm1_linear", min_linear},
                                 {"flow_bridged_decreasing", decreasing},
                                 {"rows", rows}},
                                {{"endpoint", endpoint_tol}, {"sm1_floor", floor}, {"flow_final", flow_final}})});
}

// A6 and A7.
json suite_marcus_gap(const Config& cfg) {
  const auto seed = cfg.get_u64("seed");
  Philox rng(seed, substream(0, kAuxiliary));
  const auto fields = cfg.get_int(t("marcus_gap", "fields"));
  double worst_ratio = 0.0;
  bool single_ok = true;
  for (std::int64_t i = 0; i < fields; ++i) {
    const VectorField f = random_trig_field(2, 2, rng);
    for (double h : cfg.get_doubles(t("marcus_gap", "hs"))) {
      Point x(2), dir(2);
      x << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
      dir << rng.normal(), rng.normal();
      const Point dw = h * dir / dir.norm();
      const double disc = (marcus_jump(f, x, dw, 256) - forward_jump(f, x, dw)).norm();
      const double bound = 0.5 * f.lip_bound() * f.sup_bound() * h * h;
      worst_ratio = std::max(worst_ratio, disc / bound);
      single_ok = single_ok && disc <= bound;
    }
  }

  // Staircase refinement of a smooth driver.
  const VectorField f = random_trig_field(2, 2, rng);
  Point xi(2);
  xi << 0.3, -0.2;
  json rows = json::array();
  std::vector<double> ratios;
  for (double nd : cfg.get_doubles(t("marcus_gap", "staircase"))) {
    const auto n = static_cast<std::int64_t>(nd);
    std::vector<double> times(static_cast<std::size_t>(n) + 1);
    Eigen::MatrixXd w(2, n + 1);
    for (std::int64_t k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(n);
      times[static_cast<std::size_t>(k)] = s;
      w(0, k) = std::sin(2.0 * std::numbers::pi * s);
      w(1, k) = 0.5 * (1.0 - std::cos(4.0 * std::numbers::pi * s));
    }
    const GapReport g = marcus_forward_gap(DriverPath(CadlagPath(times, w, 1.0)), f, xi, 1.5);
    ratios.push_back(g.pvar_gap / g.jump_sum_sq);
    rows.push_back({{"n", n},
                    {"pvar_gap", g.pvar_gap},
                    {"jump_sum_sq", g.jump_sum_sq},
                    {"ratio", ratios.back()},
                    {"sup_gap", g.sup_gap},
                    {"bound_K1", g.bound}});
  }
  const double rmin = *std::min_element(ratios.begin(), ratios.end());
  const double rmax = *std::max_element(ratios.begin(), ratios.end());
  const double drift = rmax / rmin - 1.0;
  const double drift_tol = cfg.get_double(t("marcus_gap", "ratio_drift"));
  json a6 = criterion("A6", "forward vs Marcus gap", true, single_ok && drift < drift_tol,
                      {{"single_jump_fields", fields},
                       {"single_jump_worst_ratio_to_bound", worst_ratio},
                       {"staircase", rows},
                       {"ratio_drift", drift}},
                      {{"single_jump_bound", "0.5 lip sup h^2"}, {"ratio_drift", drift_tol}});

  // Marcus chain rule for dX = X <> dW.
  const auto drivers = cfg.get_int(t("marcus_gap", "chain_drivers"));
  const double chain_tol = cfg.get_double(t("marcus_gap", "chain_tol"));
  const VectorField lin = scalar_linear_field(8.0);
  SolverOptions opts;
  opts.refine_tol = 1e-13;
  opts.max_doublings = 12;
  double worst = 0.0;
  bool in_box = true;
  for (std::int64_t i = 0; i < drivers; ++i) {
    const int jumps = 5 + static_cast<int>(rng() % 26);
    std::vector<double> times{0.0};
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(1, jumps + 1);
    for (int k = 1; k <= jumps; ++k) {
      times.push_back(static_cast<double>(k) / (jumps + 1));
      w(0, k) = std::clamp(w(0, k - 1) + 0.3 * rng.normal(), -1.0, 1.0);
    }
    Point x0(1);
    x0(0) = rng.uniform(0.5, 1.5);
    const CadlagPath sol = marcus_solve(DriverPath(CadlagPath(times, w, 1.0)), lin, x0, opts).solution;
    for (std::size_t k = 0; k < sol.size(); ++k) {
      const double exact = x0(0) * std::exp(w(0, static_cast<Eigen::Index>(k)));
      worst = std::max(worst, std::abs(sol.value(k)(0) - exact));
      in_box = in_box && std::abs(sol.value(k)(0)) <= lin.box_radius();
    }
  }
  json a7 = criterion("A7", "Marcus chain rule", true, worst < chain_tol && in_box,
                      {{"drivers", drivers}, {"max_abs_error", worst}, {"inside_box", in_box}},
                      {{"max_abs_error", chain_tol}});
  return json::array({a6, a7});
}

// A8.
json suite_pvar_oracle(const Config& cfg) {
  Philox rng(cfg.get_u64("seed"), substream(0, kAuxiliary));
  const auto paths = cfg.get_int(t("pvar_oracle", "paths"));
  const auto max_points = cfg.get_int(t("pvar_oracle", "max_points"));
  const auto ps = cfg.get_doubles(t("pvar_oracle", "ps"));
  std::int64_t equal = 0;
  json mismatches = json::array();
  for (std::int64_t i = 0; i < paths; ++i) {
    const auto n = 2 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(max_points - 1));
    const auto d = 1 + static_cast<Eigen::Index>(rng() % 3);
    Eigen::MatrixXd x(d, n);
    x.col(0).setZero();
    for (Eigen::Index k = 1; k < n; ++k) {
      for (Eigen::Index c = 0; c < d; ++c) x(c, k) = x(c, k - 1) + rng.normal();
    }
    bool all = true;
    for (double p : ps) {
      const double bf = p_variation_bruteforce(x, p);
      const double dp = p_variation(x, p);
      const double tree = p_variation_tree(x, p, 1);
      if (dp != bf || tree != bf) {
        all = false;
        mismatches.push_back({{"path", i}, {"p", p}, {"bruteforce", bf}, {"dp", dp}, {"tree", tree}});
      }
    }
    if (all) ++equal;
  }
  return json::array({criterion("A8", "p-variation oracle equivalence", true, equal == paths,
                                {{"equal", equal}, {"paths", paths}, {"ps", ps}, {"mismatches", mismatches}},
                                {{"required_equal", paths}})});
}

// A9.
json suite_homogenise(const Config& cfg) {
  Config c = cfg;
  c.set("map.kind", "PM");
  c.set("map.alpha", "1.5");
  c.set("observable.name", "circle");
  const LimitSetup setup = limit_setup(c);
  FieldSpec spec;
  spec.noise = "tanh-damped-rotation-dilation";
  spec.box_radius = cfg.get_double("fields.box");
  const VectorField field = make_field(spec);
  const auto n = cfg.get_int(t("homogenise", "n"));
  const auto replicas = cfg.get_int(t("homogenise", "replicas"));
  const auto levy_n = static_cast<int>(cfg.get_int(t("homogenise", "levy_n")));
  const auto seed = cfg.get_u64("seed");
  Point xi(2);
  xi << 1.0, 0.0;

  std::vector<Point> xn, xm;
  FastSlowConfig fc;
  fc.map = setup.map;
  fc.n = n;
  fc.xi = xi;
  fc.seed = seed;
  SolverOptions opts;
  opts.bridge_steps = static_cast<int>(cfg.get_int("rde.bridge_steps"));
  for (std::int64_t r = 0; r < replicas; ++r) {
    fc.stream = substream(static_cast<std::uint64_t>(r), kSampling);
    const FastSlowRun run = run_fast_slow(fc, setup.observable, field);
    xn.push_back(run.xn.value(run.xn.size() - 1));
    Philox rng(seed, substream(static_cast<std::uint64_t>(r), kLevy));
    const CadlagPath l = sample_levy_path(setup.limit.law, levy_n, rng).path;
    const CadlagPath sol = marcus_solve(DriverPath(l, DriftClock::Stepped), field, xi, opts).solution;
    xm.push_back(sol.value(sol.size() - 1));
  }
  Philox perm(seed, substream(0, kAuxiliary));
  const PermutationTest pt =
      energy_permutation_test(xn, xm, static_cast<int>(cfg.get_int(t("homogenise", "permutations"))), perm);
  const double level = cfg.get_double(t("homogenise", "quantile"));
  const double cutoff = quantile(pt.null_distribution, level);
  auto mean_of = [](const std::vector<Point>& v) {
    Point m = Point::Zero(v.front().size());
    for (const auto& x : v) m += x;
    return Point(m / static_cast<double>(v.size()));
  };
  return json::array({criterion("A9", "end-to-end homogenisation", false, pt.statistic <= cutoff,
                                {{"n", n},
                                 {"replicas", replicas},
                                 {"levy_n", levy_n},
                                 {"field", field.name()},
                                 {"energy_distance", pt.statistic},
                                 {"null_quantile", cutoff},
                                 {"null_q95", pt.quantile95},
                                 {"null_q99", pt.quantile99},
                                 {"p_value", pt.p_value},
                                 {"mean_fastslow", point_json(mean_of(xn))},
                                 {"mean_marcus", point_json(mean_of(xm))}},
                                {{"quantile", level}, {"permutations", pt.null_distribution.size()}})});
}

}  // namespace

json run_suite(const std::string& suite, const Config& cfg) {
  json criteria;
  if (suite == "branch-points") {
    criteria = suite_branch_points(cfg);
  } else if (suite == "tail-index") {
    criteria = suite_tail_index(cfg);
  } else if (suite == "stable-law") {
    criteria = suite_stable_law(cfg);
  } else if (suite == "pvar-tight") {
    criteria = suite_pvar_tight(cfg);
  } else if (suite == "circle") {
    criteria = suite_circle(cfg);
  } else if (suite == "marcus-gap") {
    criteria = suite_marcus_gap(cfg);
  } else if (suite == "pvar-oracle") {
    criteria = suite_pvar_oracle(cfg);
  } else if (suite == "homogenise") {
    criteria = suite_homogenise(cfg);
  } else {
    throw UnknownSuite("unknown suite: " + suite);
  }
  bool pass = true;
  for (const auto& c : criteria) pass = pass && (!c["gating"].get<bool>() || c["pass"].get<bool>());
  return {{"suite", suite}, {"seed", cfg.get_u64("seed")}, {"pass", pass}, {"criteria", criteria}};
}

}  // namespace marcuslab
