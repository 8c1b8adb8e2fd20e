#include "marcuslab/path_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "marcuslab/errors.hpp"
#include "marcuslab/rde.hpp"

namespace marcuslab {

PathFunction PathFunction::flow_bridge(VectorField field, int ode_steps, double domain_tol) {
  if (ode_steps < 1) throw std::invalid_argument("flow bridge needs at least one ODE step");
  PathFunction phi;
  phi.field_ = std::move(field);
  phi.ode_steps_ = ode_steps;
  phi.domain_tol_ = domain_tol;
  return phi;
}

Eigen::MatrixXd PathFunction::bridge(const Point& from, const Point& to) const {
  if (from.size() != to.size()) throw std::invalid_argument("bridge: endpoint dimensions differ");
  if (is_linear()) {
    Eigen::MatrixXd out(from.size(), 2);
    out << from, to;
    return out;
  }
  const int d = field_->noise_dim();
  const int m = field_->state_dim();
  if (from.size() != d + m) throw std::invalid_argument("flow bridge acts on driver-solution pairs in R^{d+m}");
  const Point w1 = from.head(d), w2 = to.head(d);
  const Eigen::MatrixXd x = marcuslab::flow_bridge(*field_, from.tail(m), w1, w2, ode_steps_);
  const Point end = x.col(x.cols() - 1);
  if ((end - to.tail(m)).norm() > domain_tol_ * (1.0 + to.tail(m).norm())) {
    throw DomainViolation("jump endpoint is not the flow-bridge image of its start");
  }
  Eigen::MatrixXd out(d + m, x.cols());
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    const double u = static_cast<double>(s) / static_cast<double>(x.cols() - 1);
    out.col(s) << w1 + u * (w2 - w1), x.col(s);
  }
  // The sampled endpoint is replaced by the exact one so the embedding meets the path.
  out.col(out.cols() - 1) = to;
  return out;
}

bool PathFunction::admissible(const Point& from, const Point& to) const {
  if (is_linear()) return from.size() == to.size();
  try {
    bridge(from, to);
    return true;
  } catch (const DomainViolation&) {
    return false;
  }
}

double r_weight(RWeights rule, int k) {
  if (rule == RWeights::Geometric) return std::ldexp(1.0, -k);
  return 6.0 / (std::numbers::pi * std::numbers::pi * static_cast<double>(k) * static_cast<double>(k));
}

EmbeddedPath embed(const CadlagPath& path, const PathFunction& phi, const EmbedOptions& opts) {
  if (!(opts.delta > 0.0)) throw std::invalid_argument("embed: delta must be positive");
  const std::size_t n = path.size();
  EmbeddedPath out;
  out.base = path;
  out.delta = opts.delta;

  std::vector<std::size_t> jumps;
  for (std::size_t i = 1; i < n; ++i) {
    if (path.jump_size(i) > 0.0) jumps.push_back(i);
  }
  // Indices are already in time order, so a stable sort breaks ties by earlier time.
  std::stable_sort(jumps.begin(), jumps.end(),
                   [&](std::size_t a, std::size_t b) { return path.jump_size(a) > path.jump_size(b); });
  out.jump_order = jumps;
  std::vector<double>& width = out.widths;
  width.assign(n, 0.0);
  const std::size_t ranked = std::min(jumps.size(), static_cast<std::size_t>(std::max(opts.max_jumps, 0)));
  for (std::size_t k = 0; k < ranked; ++k) {
    const double r = r_weight(opts.weights, static_cast<int>(k) + 1);
    width[jumps[k]] = opts.delta * r;
    out.total_r += r;
  }

  const int dim = path.dimension();
  std::vector<double> times;
  std::vector<Point> verts;
  double shift = 0.0;  // sum of fictitious widths so far
  auto push = [&](double t, const Point& v, double clock) {
    times.push_back(t);
    verts.push_back(v);
    out.clock.push_back(clock);
  };
  push(0.0, path.value(0), 0.0);
  out.anchors.push_back(0);
  for (std::size_t i = 1; i < n; ++i) {
    const double t = path.time(i);
    const Point prev = path.value(i - 1);
    const Point next = path.value(i);
    if (path.jump_size(i) == 0.0) {
      push(t + shift, next, t);
      out.anchors.push_back(times.size() - 1);
      continue;
    }
    const double w = width[i];
    const Eigen::MatrixXd br = width[i] > 0.0 ? phi.bridge(prev, next) : PathFunction::linear().bridge(prev, next);
    if (w == 0.0 && !phi.admissible(prev, next)) throw DomainViolation("embed: jump outside path-function domain");
    const auto cols = br.cols();
    for (Eigen::Index s = 0; s < cols; ++s) {
      const double u = static_cast<double>(s) / static_cast<double>(cols - 1);
      push(t + shift + u * w, br.col(s), t);
    }
    shift += w;
    out.anchors.push_back(times.size() - 1);
  }
  const double horizon = path.horizon();
  if (horizon > path.time(n - 1)) push(horizon + shift, path.value(n - 1), horizon);

  const double scale = horizon / (horizon + opts.delta * out.total_r);
  for (double& t : times) t *= scale;
  out.times = std::move(times);
  out.values.resize(dim, static_cast<Eigen::Index>(verts.size()));
  for (std::size_t k = 0; k < verts.size(); ++k) out.values.col(static_cast<Eigen::Index>(k)) = verts[k];
  return out;
}

CadlagPath EmbeddedPath::remove_fictitious_time() const {
  // The vertex clock already holds the original time; recomputing it from the
  // rescaled axis would only add rounding.
  const double horizon = base.horizon();
  std::vector<double> t(base.size());
  Eigen::MatrixXd v(values.rows(), static_cast<Eigen::Index>(base.size()));
  for (std::size_t i = 0; i < base.size(); ++i) {
    t[i] = clock[anchors[i]];
    v.col(static_cast<Eigen::Index>(i)) = values.col(static_cast<Eigen::Index>(anchors[i]));
  }
  return CadlagPath(std::move(t), std::move(v), horizon);
}

}  // namespace marcuslab
