#include "marcuslab/intermittent_maps.hpp"

#include <cmath>
#include <stdexcept>

#include "marcuslab/errors.hpp"
#include "marcuslab/rng.hpp"

namespace marcuslab {

std::string to_string(MapKind kind) { return kind == MapKind::LSV ? "LSV" : "PM"; }

MapKind parse_map_kind(const std::string& name) {
  if (name == "LSV" || name == "lsv") return MapKind::LSV;
  if (name == "PM" || name == "pm") return MapKind::PM;
  throw std::invalid_argument("unknown map kind '" + name + "' (expected LSV or PM)");
}

IntermittentMap::IntermittentMap(MapKind kind, double alpha)
    : kind_(kind), alpha_(alpha), inv_alpha_(1.0 / alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw std::invalid_argument("alpha must lie strictly inside (1, 2), got " + std::to_string(alpha));
  }
  coef_ = std::pow(branch_base(), inv_alpha_);
}

Interval IntermittentMap::return_set() const {
  if (kind_ == MapKind::LSV) return {0.5, 1.0};
  return {1.0 / 3.0, 2.0 / 3.0};
}

double IntermittentMap::boundary() const { return kind_ == MapKind::LSV ? 0.5 : 1.0 / 3.0; }

double IntermittentMap::step(double y) const {
  if (kind_ == MapKind::LSV) {
    if (y < 0.5) return neutral_branch(y);
    return 2.0 * y - 1.0;
  }
  if (y < 1.0 / 3.0) return neutral_branch(y);
  if (y < 2.0 / 3.0) return 3.0 * y - 1.0;
  return 1.0 - neutral_branch(1.0 - y);
}

double IntermittentMap::encode(double y) const {
  if (kind_ == MapKind::LSV || y < 0.5) return y;
  return -(1.0 - y);
}

double IntermittentMap::decode(double q) const {
  if (kind_ == MapKind::LSV || !std::signbit(q)) return q;
  return 1.0 + q;
}

double IntermittentMap::step_encoded(double q) const {
  if (kind_ == MapKind::LSV) return step(q);
  if (!std::signbit(q)) {
    const double y = q < 1.0 / 3.0 ? neutral_branch(q) : 3.0 * q - 1.0;
    return y < 0.5 ? y : -(1.0 - y);
  }
  // y = 1 - u; the map sends 1 - y to 1 - f(y).
  const double u = -q;
  const double v = u <= 1.0 / 3.0 ? neutral_branch(u) : 3.0 * u - 1.0;
  return v <= 0.5 ? -v : 1.0 - v;
}

ReturnSample first_return(const IntermittentMap& map, double z, std::int64_t max_iter) {
  if (!map.in_return_set(z)) throw std::invalid_argument("first_return: start point outside Z");
  ReturnSample out;
  out.start_point = z;
  double q = map.encode(z);
  for (std::int64_t k = 1; k <= max_iter; ++k) {
    out.excursion_orbit.push_back(map.decode(q));
    q = map.step_encoded(q);
    const double y = map.decode(q);
    if (map.in_return_set(y)) {
      out.return_time = k;
      out.landing = y;
      return out;
    }
  }
  throw NonReturning("no return to Z within " + std::to_string(max_iter) + " iterates");
}

std::int64_t return_time(const IntermittentMap& map, double z, std::int64_t max_iter, double* landing) {
  if (!map.in_return_set(z)) throw std::invalid_argument("return_time: start point outside Z");
  const Interval zset = map.return_set();
  double q = map.encode(z);
  for (std::int64_t k = 1; k <= max_iter; ++k) {
    q = map.step_encoded(q);
    const double y = map.decode(q);
    if (zset.contains(y)) {
      if (landing) *landing = y;
      return k;
    }
  }
  throw NonReturning("no return to Z within " + std::to_string(max_iter) + " iterates");
}

BranchPoints branch_points(const IntermittentMap& map, int K, double tol, int max_bisections) {
  if (K < 1) throw std::invalid_argument("branch_points: K must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("branch_points: tol must be positive");
  const double base = map.branch_base();
  const double inv_alpha = 1.0 / map.alpha();
  auto lift = [&](double x) { return x * (1.0 + std::pow(base * x, inv_alpha)); };

  BranchPoints out;
  out.alpha = map.alpha();
  out.a.reserve(static_cast<std::size_t>(K));
  out.a.push_back(1.0 / base);
  for (int k = 1; k < K; ++k) {
    const double target = out.a.back();
    double lo = 0.0;
    double hi = target;
    for (int it = 0; it < max_bisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (lift(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double rlo = std::abs(lift(lo) - target);
    const double rhi = std::abs(lift(hi) - target);
    const double root = rlo <= rhi ? lo : hi;
    const double residual = std::min(rlo, rhi);
    if (!(residual < tol)) {
      throw ToleranceNotReached("branch_points: residual " + std::to_string(residual) + " at k=" +
                                std::to_string(k + 1) + " exceeds tol");
    }
    out.a.push_back(root);
    out.residuals.push_back(residual);
  }
  return out;
}

double branch_point_asymptote(const IntermittentMap& map, int k) {
  const double a = map.alpha();
  return std::pow(a, a) * std::pow(static_cast<double>(k), -a) / map.branch_base();
}

double InvariantStats::tail(std::int64_t k) const {
  if (returns == 0) return 0.0;
  std::int64_t above = 0;
  for (auto it = tau_histogram.upper_bound(k); it != tau_histogram.end(); ++it) above += it->second;
  return static_cast<double>(above) / static_cast<double>(returns);
}

InvariantStats invariant_stats(const IntermittentMap& map, std::int64_t orbit_length, std::uint64_t seed,
                               const InvariantStatsOptions& opts, std::uint64_t stream) {
  if (!(opts.bin_width > 0.0)) throw std::invalid_argument("invariant_stats: bin width must be positive");
  Philox rng(seed, stream);
  const Interval zset = map.return_set();
  const double bin_lo = map.boundary();
  const double bin_hi = bin_lo + opts.bin_width;

  InvariantStats st;
  st.orbit_length = orbit_length;
  st.bin_width = opts.bin_width;

  double q = map.encode(rng.uniform());
  std::int64_t in_bin = 0;
  std::int64_t in_z = 0;
  std::int64_t last_visit = -1;
  std::int64_t tau_sum = 0;
  for (std::int64_t j = 0; j < orbit_length; ++j) {
    const double y = map.decode(q);
    if (y >= bin_lo && y < bin_hi) ++in_bin;
    if (zset.contains(y)) {
      ++in_z;
      if (last_visit >= 0) {
        const std::int64_t tau = j - last_visit;
        ++st.tau_histogram[tau];
        tau_sum += tau;
        ++st.returns;
        if (opts.keep_return_times) st.return_times.push_back(tau);
      }
      last_visit = j;
    }
    q = map.step_encoded(q);
  }
  if (st.returns < opts.min_returns) {
    throw InsufficientReturns("invariant_stats: only " + std::to_string(st.returns) + " returns observed");
  }
  const double n = static_cast<double>(orbit_length);
  st.h_at_boundary = static_cast<double>(in_bin) / (n * opts.bin_width);
  st.tau_bar = static_cast<double>(tau_sum) / static_cast<double>(st.returns);
  st.time_fraction_in_z = static_cast<double>(in_z) / n;
  return st;
}

}  // namespace marcuslab
