#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace marcuslab {

enum class MapKind { LSV, PM };

std::string to_string(MapKind kind);
MapKind parse_map_kind(const std::string& name);

/// Closed interval [lo, hi].
struct Interval {
  double lo;
  double hi;
  bool contains(double y) const { return y >= lo && y <= hi; }
  double width() const { return hi - lo; }
};

/// Intermittent interval map with neutral fixed point(s).
///
/// LSV (one neutral fixed point at 0):
///   f(y) = y (1 + 2^{1/a} y^{1/a})  on [0, 1/2),   2y - 1  on [1/2, 1].
/// PM (symmetric neutral fixed points at 0 and 1):
///   f(y) = y (1 + 3^{1/a} y^{1/a})                on [0, 1/3),
///          3y - 1                                 on [1/3, 2/3),
///          1 - (1-y)(1 + 3^{1/a} (1-y)^{1/a})     on [2/3, 1].
/// Branches are assigned on the half-open intervals above, verbatim.
class IntermittentMap {
 public:
  /// Throws std::invalid_argument unless 1 < alpha < 2.
  IntermittentMap(MapKind kind, double alpha);

  MapKind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  /// Z = [1/2, 1] for LSV, [1/3, 2/3] for PM.
  Interval return_set() const;
  bool in_return_set(double y) const { return return_set().contains(y); }

  /// Left end of Z, where the return-time tail concentrates (1/2 or 1/3).
  double boundary() const;

  /// Number of branches of the uniformly expanding part (2 or 3).
  double branch_base() const { return kind_ == MapKind::LSV ? 2.0 : 3.0; }

  double step(double y) const;

  /// Orbit coordinate. PM points y >= 1/2 are stored as -(1 - y) so the
  /// neutral fixed point at 1 has the same resolution as the one at 0; with
  /// plain doubles every y within ~1e-10 of 1 is a numerical fixed point of
  /// the right branch. LSV points are stored unchanged.
  double encode(double y) const;
  double decode(double q) const;
  /// step() in the orbit coordinate.
  double step_encoded(double q) const;

 private:
  double neutral_branch(double y) const { return y * (1.0 + coef_ * std::pow(y, inv_alpha_)); }

  MapKind kind_;
  double alpha_;
  double inv_alpha_;
  double coef_;
};

struct ReturnSample {
  double start_point = 0.0;
  std::int64_t return_time = 0;
  /// y, f y, ..., f^{tau-1} y.
  std::vector<double> excursion_orbit;
  /// F(z) = f^tau(z).
  double landing = 0.0;
};

constexpr std::int64_t kDefaultMaxIter = 100'000'000;

/// First return to Z from z in Z, recording the excursion.
/// Throws NonReturning past max_iter, std::invalid_argument if z is outside Z.
ReturnSample first_return(const IntermittentMap& map, double z, std::int64_t max_iter = kDefaultMaxIter);

/// Same return time as first_return without storing the orbit; `landing`
/// receives F(z) = f^tau(z) when non-null.
std::int64_t return_time(const IntermittentMap& map, double z, std::int64_t max_iter = kDefaultMaxIter,
                         double* landing = nullptr);

/// Preimages of the boundary point along the neutral branch:
/// a_1 = 1/2 (LSV) or 1/3 (PM) and a_k = a_{k+1} (1 + (base a_{k+1})^{1/alpha}).
struct BranchPoints {
  double alpha = 0.0;
  std::vector<double> a;           // a[0] = a_1
  std::vector<double> residuals;   // |g(a_{k+1})| for each solved step
};

/// Solves K-1 bisection problems. Throws ToleranceNotReached if a residual
/// stays above tol once the bisection budget is spent.
BranchPoints branch_points(const IntermittentMap& map, int K, double tol, int max_bisections = 2000);

/// Leading-order asymptote a_k ~ a_1 alpha^alpha k^{-alpha}.
double branch_point_asymptote(const IntermittentMap& map, int k);

struct InvariantStats {
  std::int64_t orbit_length = 0;
  std::int64_t returns = 0;            // completed excursions
  double bin_width = 0.0;
  double h_at_boundary = 0.0;          // density of mu on [boundary, boundary + bin_width)
  double tau_bar = 0.0;                // mean return time over completed excursions
  double time_fraction_in_z = 0.0;     // empirical mu(Z)
  std::map<std::int64_t, std::int64_t> tau_histogram;

  /// Empirical mu_Z(tau > k).
  double tail(std::int64_t k) const;
  /// Every observed return time, in order (kept only when requested).
  std::vector<std::int64_t> return_times;
};

struct InvariantStatsOptions {
  double bin_width = 1e-3;
  std::int64_t min_returns = 1000;
  bool keep_return_times = false;
};

/// Birkhoff statistics along one orbit started from a uniform point drawn from
/// Philox(seed, stream). Throws InsufficientReturns below opts.min_returns.
InvariantStats invariant_stats(const IntermittentMap& map, std::int64_t orbit_length, std::uint64_t seed,
                               const InvariantStatsOptions& opts = {}, std::uint64_t stream = 0);

}  // namespace marcuslab
