#include "marcuslab/fastslow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "marcuslab/errors.hpp"
#include "marcuslab/pvariation.hpp"
#include "marcuslab/rng.hpp"

namespace marcuslab {

Observable::Observable(std::string name, std::function<Point(double)> raw, Point centering, MapKind kind,
                       double sup_bound, std::string holder_note)
    : name_(std::move(name)),
      raw_(std::move(raw)),
      centering_(std::move(centering)),
      sup_bound_(sup_bound),
      holder_note_(std::move(holder_note)) {
  if (!raw_) throw std::invalid_argument("Observable: empty function");
  if (centering_.size() == 0) throw std::invalid_argument("Observable: zero-dimensional");
  if ((*this)(0.0).norm() == 0.0) throw DegenerateObservable("observable " + name_ + ": v(0) = 0");
  if (kind == MapKind::PM && (*this)(1.0).norm() == 0.0) {
    throw DegenerateObservable("observable " + name_ + ": v(1) = 0");
  }
}

std::function<Point(double)> catalog_raw(const std::string& name) {
  if (name == "cos") {
    return [](double y) {
      Point p(1);
      p(0) = std::cos(2.0 * std::numbers::pi * y);
      return p;
    };
  }
  if (name == "circle") {
    return [](double y) {
      Point p(2);
      p(0) = std::cos(2.0 * std::numbers::pi * y);
      p(1) = std::sin(2.0 * std::numbers::pi * y);
      return p;
    };
  }
  throw ConfigError("unknown observable: " + name);
}

int catalog_dimension(const std::string& name) {
  if (name == "cos") return 1;
  if (name == "circle") return 2;
  throw ConfigError("unknown observable: " + name);
}

Point calibrate_centering(const IntermittentMap& map, const std::string& name, std::int64_t orbit_length,
                          std::uint64_t seed, std::uint64_t stream) {
  if (orbit_length < 1) throw std::invalid_argument("calibrate_centering: orbit length must be >= 1");
  const auto raw = catalog_raw(name);
  Philox rng(seed, stream);
  double q = map.encode(rng.uniform());
  // Kahan-compensated running sums; the orbit is long enough for plain sums to drift.
  const int d = catalog_dimension(name);
  Point sum = Point::Zero(d), comp = Point::Zero(d);
  for (std::int64_t k = 0; k < orbit_length; ++k) {
    const Point term = raw(map.decode(q)) - comp;
    const Point t = sum + term;
    comp = (t - sum) - term;
    sum = t;
    q = map.step_encoded(q);
  }
  return sum / static_cast<double>(orbit_length);
}

Observable catalog_observable(const std::string& name, const IntermittentMap& map, const Point& centering) {
  if (centering.size() != catalog_dimension(name)) throw ConfigError("centering dimension mismatch for " + name);
  // |raw| = 1 for both catalog entries.
  return Observable(name, catalog_raw(name), centering, map.kind(), 1.0 + centering.norm(), "smooth (Lipschitz)");
}

namespace {

// Orbit coordinate of y_0 after burn-in.
double initial_point(const IntermittentMap& map, std::int64_t burn_in, Philox& rng) {
  double q = map.encode(rng.uniform());
  for (std::int64_t k = 0; k < burn_in; ++k) q = map.step_encoded(q);
  return q;
}

std::vector<double> unit_grid(std::int64_t n) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k) t[static_cast<std::size_t>(k)] = static_cast<double>(k) / static_cast<double>(n);
  return t;
}

}  // namespace

FastSlowRun run_fast_slow(const FastSlowConfig& cfg, const Observable& v, const VectorField& field) {
  if (cfg.n < 1) throw std::invalid_argument("run_fast_slow: n must be >= 1");
  if (cfg.xi.size() != field.state_dim()) throw std::invalid_argument("run_fast_slow: xi has the wrong dimension");
  if (v.dimension() != field.noise_dim()) throw std::invalid_argument("run_fast_slow: observable/noise dimension mismatch");
  if (!cfg.xi.allFinite()) throw NonFinite("run_fast_slow: xi is not finite");
  const auto n = cfg.n;
  const double scale = std::pow(1.0 / static_cast<double>(n), 1.0 / cfg.map.alpha());
  Philox rng(cfg.seed, cfg.stream);

  FastSlowRun run;
  run.n = n;
  run.alpha = cfg.map.alpha();
  run.map = cfg.map.kind();
  run.observable = v.name();
  run.field = field.name();
  run.xi = cfg.xi;
  double q = initial_point(cfg.map, cfg.burn_in, rng);
  run.y0 = cfg.map.decode(q);

  const int d = v.dimension();
  const int m = field.state_dim();
  Eigen::MatrixXd w(d, n + 1), x(m, n + 1);
  w.col(0).setZero();
  x.col(0) = cfg.xi;
  Point xk = cfg.xi, dw(d), noise(m), drift(m);
  auto times = unit_grid(n);
  for (std::int64_t k = 0; k < n; ++k) {
    const double dt_k = times[static_cast<std::size_t>(k + 1)] - times[static_cast<std::size_t>(k)];
    dw = scale * v(cfg.map.decode(q));
    w.col(k + 1) = w.col(k) + dw;
    // Same arithmetic as the stepped forward solver (grid differences), so both agree bitwise.
    const Point dw_path = w.col(k + 1) - w.col(k);
    field.noise_apply(xk, dw_path, noise);
    field.drift(xk, drift);
    noise += dt_k * drift;
    xk += noise;
    if (!xk.allFinite()) throw NonFinite("run_fast_slow: slow state escaped at step " + std::to_string(k + 1));
    x.col(k + 1) = xk;
    q = cfg.map.step_encoded(q);
  }
  run.wn = CadlagPath(times, std::move(w), 1.0);
  run.xn = CadlagPath(std::move(times), std::move(x), 1.0);
  return run;
}

Point driver_endpoint(const IntermittentMap& map, const Observable& v, std::int64_t n, Philox& rng) {
  if (n < 1) throw std::invalid_argument("driver_endpoint: n must be >= 1");
  double q = map.encode(rng.uniform());
  Point sum = Point::Zero(v.dimension());
  for (std::int64_t k = 0; k < n; ++k) {
    sum += v(map.decode(q));
    q = map.step_encoded(q);
  }
  return std::pow(1.0 / static_cast<double>(n), 1.0 / map.alpha()) * sum;
}

CadlagPath driver_path(const IntermittentMap& map, const Observable& v, std::int64_t n, Philox& rng) {
  if (n < 1) throw std::invalid_argument("driver_path: n must be >= 1");
  const double scale = std::pow(1.0 / static_cast<double>(n), 1.0 / map.alpha());
  double q = map.encode(rng.uniform());
  Eigen::MatrixXd w(v.dimension(), n + 1);
  w.col(0).setZero();
  for (std::int64_t k = 0; k < n; ++k) {
    w.col(k + 1) = w.col(k) + scale * v(map.decode(q));
    q = map.step_encoded(q);
  }
  return CadlagPath(unit_grid(n), std::move(w), 1.0);
}

double vstar_for_direction(const Eigen::MatrixXd& s, const Point& c) {
  double running_max = -std::numeric_limits<double>::infinity();
  double backtrack = 0.0;  // max_{k <= l} c.(s_k - s_l)
  double transverse = 0.0; // max_k |s_k - (c.s_k) c|
  for (Eigen::Index k = 0; k < s.cols(); ++k) {
    const double proj = c.dot(s.col(k));
    running_max = std::max(running_max, proj);
    backtrack = std::max(backtrack, running_max - proj);
    transverse = std::max(transverse, (s.col(k) - proj * c).norm());
  }
  return backtrack + transverse;
}

double vstar_of_partial_sums(const Eigen::MatrixXd& s) {
  const auto d = s.rows();
  std::vector<Point> candidates;
  const Point total = s.col(s.cols() - 1);
  if (total.norm() > 0.0) candidates.push_back(total / total.norm());
  if (d == 1) {
    candidates.assign({Point::Constant(1, 1.0), Point::Constant(1, -1.0)});
  } else if (d == 2) {
    for (int j = 0; j < 64; ++j) {
      const double th = 2.0 * std::numbers::pi * j / 64.0;
      Point c(2);
      c << std::cos(th), std::sin(th);
      candidates.push_back(c);
    }
  } else {
    for (Eigen::Index i = 0; i < d; ++i) {
      candidates.push_back(Point::Unit(d, i));
      candidates.push_back(-Point::Unit(d, i));
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, vstar_for_direction(s, c));
  return best;
}

InducedSample induced_sample(const IntermittentMap& map, const Observable& v, double z, std::int64_t max_iter) {
  const ReturnSample ret = first_return(map, z, max_iter);
  const auto tau = ret.return_time;
  Eigen::MatrixXd s(v.dimension(), tau + 1);
  s.col(0).setZero();
  for (std::int64_t j = 0; j < tau; ++j) s.col(j + 1) = s.col(j) + v(ret.excursion_orbit[static_cast<std::size_t>(j)]);
  return {s.col(tau), vstar_of_partial_sums(s), tau};
}

std::vector<double> vstar_max_diagnostic(const IntermittentMap& map, const Observable& v, std::int64_t n, int replicas,
                                         std::uint64_t seed) {
  if (replicas < 1) throw std::invalid_argument("vstar_max_diagnostic: replicas must be >= 1");
  if (n < 1) throw std::invalid_argument("vstar_max_diagnostic: n must be >= 1");
  const Interval zset = map.return_set();
  const double scale = std::pow(static_cast<double>(n), -1.0 / map.alpha());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(replicas));
  for (int r = 0; r < replicas; ++r) {
    Philox rng(seed, static_cast<std::uint64_t>(r));
    double z = rng.uniform(zset.lo, zset.hi);
    double worst = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
      const ReturnSample ret = first_return(map, z);
      Eigen::MatrixXd s(v.dimension(), ret.return_time + 1);
      s.col(0).setZero();
      for (std::int64_t j = 0; j < ret.return_time; ++j) {
        s.col(j + 1) = s.col(j) + v(ret.excursion_orbit[static_cast<std::size_t>(j)]);
      }
      worst = std::max(worst, vstar_of_partial_sums(s));
      z = ret.landing;
    }
    out.push_back(scale * worst);
  }
  return out;
}

DriverStats driver_statistics(const CadlagPath& wn, double p) {
  return {p_variation(wn, p), jump_sum_sq(wn), wn.value(wn.size() - 1)};
}

}  // namespace marcuslab
