#include "marcuslab/cadlag_path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace marcuslab {

CadlagPath::CadlagPath(std::vector<double> times, Eigen::MatrixXd values, double horizon)
    : times_(std::move(times)), values_(std::move(values)), horizon_(horizon) {
  if (times_.empty()) throw std::invalid_argument("CadlagPath: empty time grid");
  if (static_cast<std::size_t>(values_.cols()) != times_.size()) {
    throw std::invalid_argument("CadlagPath: one value column per time required");
  }
  if (times_.front() != 0.0) throw std::invalid_argument("CadlagPath: first time must be 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("CadlagPath: times must be strictly increasing");
  }
  if (times_.back() > horizon_) throw std::invalid_argument("CadlagPath: sample time beyond horizon");
}

CadlagPath CadlagPath::constant(const Point& value, double horizon) {
  return CadlagPath({0.0}, Eigen::MatrixXd(value), horizon);
}

Point CadlagPath::at(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto idx = it == times_.begin() ? 0 : static_cast<Eigen::Index>(it - times_.begin() - 1);
  return values_.col(idx);
}

Point CadlagPath::left_limit(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto idx = it == times_.begin() ? 0 : static_cast<Eigen::Index>(it - times_.begin() - 1);
  return values_.col(idx);
}

double CadlagPath::jump_size(std::size_t i) const {
  if (i == 0) return 0.0;
  const auto j = static_cast<Eigen::Index>(i);
  return (values_.col(j) - values_.col(j - 1)).norm();
}

CadlagPath CadlagPath::scaled(double c) const { return CadlagPath(times_, c * values_, horizon_); }

CadlagPath CadlagPath::restricted(std::size_t first, std::size_t last) const {
  if (first > last || last >= times_.size()) throw std::invalid_argument("CadlagPath::restricted: bad range");
  std::vector<double> t(times_.begin() + static_cast<std::ptrdiff_t>(first),
                        times_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  const double t0 = t.front();
  for (double& s : t) s -= t0;
  const double h = (last + 1 < times_.size() ? times_[last + 1] : horizon_) - t0;
  return CadlagPath(std::move(t),
                    values_.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(last - first + 1)),
                    h);
}

CadlagPath CadlagPath::stack(const CadlagPath& a, const CadlagPath& b) {
  if (a.times_ != b.times_) throw std::invalid_argument("CadlagPath::stack: grids differ");
  Eigen::MatrixXd v(a.values_.rows() + b.values_.rows(), a.values_.cols());
  v << a.values_, b.values_;
  return CadlagPath(a.times_, std::move(v), std::max(a.horizon_, b.horizon_));
}

CadlagPath CadlagPath::components(int row, int count) const {
  return CadlagPath(times_, values_.middleRows(row, count), horizon_);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<std::string> numbered_names(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void write_csv(std::ostream& os, const CadlagPath& path, const std::vector<std::string>& names) {
  const auto cols = names.empty() ? numbered_names("x", path.dimension()) : names;
  if (static_cast<int>(cols.size()) != path.dimension()) {
    throw std::invalid_argument("write_csv: column name count does not match dimension");
  }
  os << 't';
  for (const auto& c : cols) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < path.size(); ++i) {
    os << format_double(path.time(i));
    for (int r = 0; r < path.dimension(); ++r) os << ',' << format_double(path.values()(r, static_cast<Eigen::Index>(i)));
    os << '\n';
  }
}

void write_csv_file(const std::string& file, const CadlagPath& path, const std::vector<std::string>& names) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  write_csv(os, path, names);
}

namespace {

double parse_field(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("read_csv: bad number '" + s + "'");
  }
  return x;
}

}  // namespace

CadlagPath read_csv(std::istream& is, double horizon) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_csv: missing header");
  const auto ncols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if (ncols < 2 || line.rfind("t,", 0) != 0) throw std::invalid_argument("read_csv: header must start with 't,'");
  std::vector<double> times;
  std::vector<double> flat;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    int c = 0;
    while (std::getline(ss, field, ',')) {
      const double x = parse_field(field);
      if (c == 0) {
        times.push_back(x);
      } else {
        flat.push_back(x);
      }
      ++c;
    }
    if (c != ncols) throw std::invalid_argument("read_csv: ragged row");
  }
  const int dim = ncols - 1;
  Eigen::MatrixXd values = Eigen::Map<Eigen::MatrixXd>(flat.data(), dim, static_cast<Eigen::Index>(times.size()));
  if (horizon < 0.0) horizon = times.empty() ? 1.0 : std::max(1.0, times.back());
  return CadlagPath(std::move(times), std::move(values), horizon);
}

CadlagPath read_csv_file(const std::string& file, double horizon) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file);
  return read_csv(is, horizon);
}

}  // namespace marcuslab
