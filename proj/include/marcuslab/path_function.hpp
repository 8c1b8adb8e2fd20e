#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/vector_field.hpp"

namespace marcuslab {

/// Rule that bridges the endpoints of a jump by a continuous path.
///
/// Linear: l(x, y)(s) = x + s (y - x) on R^k.
/// FlowBridge: acts on driver-solution pairs (w, x) in R^{d+m}; the driver part
/// moves linearly and the solution part follows dPi = b(Pi) d l(w1, w2),
/// Pi(0) = x1. Its domain is the set of pairs whose solution endpoint is the
/// time-1 value of that flow.
class PathFunction {
 public:
  static PathFunction linear() { return PathFunction(); }
  static PathFunction flow_bridge(VectorField field, int ode_steps = 64, double domain_tol = 1e-8);

  bool is_linear() const { return !field_.has_value(); }
  const std::optional<VectorField>& field() const { return field_; }
  int ode_steps() const { return ode_steps_; }

  /// Bridge from `from` to `to`, sampled at `samples` + 1 equally spaced
  /// parameters in [0, 1] (columns). Linear bridges ignore `samples` and
  /// return the two endpoints. Throws DomainViolation when (from, to) is not
  /// in the domain.
  Eigen::MatrixXd bridge(const Point& from, const Point& to) const;

  /// Domain membership test.
  bool admissible(const Point& from, const Point& to) const;

 private:
  PathFunction() = default;
  std::optional<VectorField> field_;
  int ode_steps_ = 1;
  double domain_tol_ = 1e-8;
};

/// Summable weights r_1, r_2, ... for the fictitious intervals.
enum class RWeights { Geometric, InverseSquare };

struct EmbedOptions {
  double delta = 1.0;
  int max_jumps = 128;
  RWeights weights = RWeights::Geometric;
};

/// Continuous version X^{phi, delta} of a step path: the k-th largest jump
/// (ties broken by earlier time) is traversed by phi on a fictitious interval of
/// length delta r_k, then the time axis [0, T + delta sum r] is rescaled to
/// [0, T]. Jumps beyond max_jumps are kept as zero-width linear segments.
struct EmbeddedPath {
  CadlagPath base;
  double delta = 1.0;
  double total_r = 0.0;
  std::vector<double> times;     // rescaled embedded times, nondecreasing
  Eigen::MatrixXd values;        // polyline vertices, one column per time
  std::vector<double> clock;     // original time t of every vertex
  std::vector<std::size_t> anchors;  // vertex index of each base sample (post-jump)
  std::vector<std::size_t> jump_order;  // base indices of jumps, largest first
  std::vector<double> widths;    // fictitious width delta r_k opened at each base sample (0 if none)

  /// Inverse of the fictitious-time map: base samples read back from the polyline.
  CadlagPath remove_fictitious_time() const;
};

double r_weight(RWeights rule, int k);

/// Throws DomainViolation when a jump is outside phi's domain.
EmbeddedPath embed(const CadlagPath& path, const PathFunction& phi, const EmbedOptions& opts = {});

}  // namespace marcuslab
