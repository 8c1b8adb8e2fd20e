#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/intermittent_maps.hpp"
#include "marcuslab/vector_field.hpp"

namespace marcuslab {

class Philox;

/// Fast observable v = raw - centering on [0, 1].
class Observable {
 public:
  /// sup_bound must dominate sup |v|. Throws DegenerateObservable when v(0) = 0,
  /// or v(1) = 0 for PM.
  Observable(std::string name, std::function<Point(double)> raw, Point centering, MapKind kind, double sup_bound,
             std::string holder_note = "smooth");

  const std::string& name() const { return name_; }
  int dimension() const { return static_cast<int>(centering_.size()); }
  const Point& centering() const { return centering_; }
  double sup_bound() const { return sup_bound_; }
  const std::string& holder_note() const { return holder_note_; }

  Point raw(double y) const { return raw_(y); }
  Point operator()(double y) const { return raw_(y) - centering_; }

 private:
  std::string name_;
  std::function<Point(double)> raw_;
  Point centering_;
  double sup_bound_;
  std::string holder_note_;
};

/// Catalog: "cos" (d = 1, cos 2 pi y) and "circle" (d = 2, (cos 2 pi y, sin 2 pi y)).
std::function<Point(double)> catalog_raw(const std::string& name);
int catalog_dimension(const std::string& name);

/// Birkhoff average of the raw catalog observable along one orbit of the given
/// length from a uniform start drawn from Philox(seed, stream).
Point calibrate_centering(const IntermittentMap& map, const std::string& name, std::int64_t orbit_length,
                          std::uint64_t seed, std::uint64_t stream = 0);

Observable catalog_observable(const std::string& name, const IntermittentMap& map, const Point& centering);

struct FastSlowConfig {
  IntermittentMap map{MapKind::PM, 1.5};
  std::int64_t n = 10000;
  Point xi;               // slow initial condition
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::int64_t burn_in = 0;
};

struct FastSlowRun {
  std::int64_t n = 0;
  double alpha = 0.0;
  MapKind map = MapKind::PM;
  std::string observable;
  std::string field;
  Point xi;
  double y0 = 0.0;
  CadlagPath wn;  // d-dimensional, grid k/n
  CadlagPath xn;  // m-dimensional, grid k/n
};

/// Iterates
///   x_{k+1} = x_k + a(x_k)/n + n^{-1/alpha} b(x_k) v(y_k),   y_{k+1} = f(y_k),
/// and W_n(k/n) = n^{-1/alpha} sum_{j<k} v(y_j), with y_0 uniform on [0, 1].
/// Throws NonFinite if x leaves the representable range.
FastSlowRun run_fast_slow(const FastSlowConfig& cfg, const Observable& v, const VectorField& field);

/// W_n(1) only, without materialising paths.
Point driver_endpoint(const IntermittentMap& map, const Observable& v, std::int64_t n, Philox& rng);

/// W_n on the grid k/n only.
CadlagPath driver_path(const IntermittentMap& map, const Observable& v, std::int64_t n, Philox& rng);

struct InducedSample {
  Point v_sum;        // V(z)
  double vstar = 0.0; // V*(z), grid upper bound for d >= 2
  std::int64_t tau = 0;
};

/// V* for the partial sums v_0 = 0, v_1, ..., v_tau (columns), minimised over
/// c in {+1, -1} (d = 1) or {V/|V|} plus 64 equally spaced angles (d = 2).
double vstar_of_partial_sums(const Eigen::MatrixXd& partial_sums);

/// Same quantity for a single direction c.
double vstar_for_direction(const Eigen::MatrixXd& partial_sums, const Point& c);

InducedSample induced_sample(const IntermittentMap& map, const Observable& v, double z,
                             std::int64_t max_iter = kDefaultMaxIter);

/// n^{-1/alpha} max_{k<n} V*(F^k z) over `replicas` independent runs of n
/// successive excursions each, z_0 uniform on Z. Replica r uses Philox(seed, r).
std::vector<double> vstar_max_diagnostic(const IntermittentMap& map, const Observable& v, std::int64_t n, int replicas,
                                         std::uint64_t seed);

struct DriverStats {
  double pvar = 0.0;
  double jump_sum_sq = 0.0;
  Point end_value;
};

DriverStats driver_statistics(const CadlagPath& wn, double p);

}  // namespace marcuslab
