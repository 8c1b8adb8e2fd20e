#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace marcuslab {

using Point = Eigen::VectorXd;

/// Finite-sample right-continuous step path t -> values[last i with times[i] <= t]
/// on [0, horizon]. times[0] = 0 and times are strictly increasing.
class CadlagPath {
 public:
  CadlagPath() = default;
  /// values has one column per sample time. Throws std::invalid_argument on bad grids.
  CadlagPath(std::vector<double> times, Eigen::MatrixXd values, double horizon = 1.0);

  /// Constant path at `value` on [0, horizon].
  static CadlagPath constant(const Point& value, double horizon = 1.0);

  int dimension() const { return static_cast<int>(values_.rows()); }
  std::size_t size() const { return times_.size(); }
  double horizon() const { return horizon_; }

  const std::vector<double>& times() const { return times_; }
  double time(std::size_t i) const { return times_[i]; }
  const Eigen::MatrixXd& values() const { return values_; }
  auto value(std::size_t i) const { return values_.col(static_cast<Eigen::Index>(i)); }

  /// Value at t (right-continuous).
  Point at(double t) const;
  /// X(t-), with X(0-) = X(0).
  Point left_limit(double t) const;

  /// |values[i] - values[i-1]|, zero for i = 0.
  double jump_size(std::size_t i) const;

  CadlagPath scaled(double c) const;
  /// Samples with index in [first, last], re-based so the first time is 0.
  CadlagPath restricted(std::size_t first, std::size_t last) const;

  /// Side-by-side pair (A, B) in R^{dimA + dimB}; both must share the same grid.
  static CadlagPath stack(const CadlagPath& a, const CadlagPath& b);
  /// Rows [row, row + count) as a path on the same grid.
  CadlagPath components(int row, int count) const;

 private:
  std::vector<double> times_;
  Eigen::MatrixXd values_;
  double horizon_ = 1.0;
};

/// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

/// CSV with header `t,<names...>`, one row per sample time, post-jump values.
/// Column names default to x1..xk.
void write_csv(std::ostream& os, const CadlagPath& path, const std::vector<std::string>& names = {});
void write_csv_file(const std::string& file, const CadlagPath& path, const std::vector<std::string>& names = {});

/// Parses the CSV format above; horizon defaults to the last sample time when
/// it is at least 1, otherwise 1.
CadlagPath read_csv(std::istream& is, double horizon = -1.0);
CadlagPath read_csv_file(const std::string& file, double horizon = -1.0);

std::vector<std::string> numbered_names(const std::string& prefix, int count);

}  // namespace marcuslab
