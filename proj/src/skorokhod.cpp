#include "marcuslab/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace marcuslab {

Eigen::MatrixXd sampled_graph(const CadlagPath& path, double res, const PathFunction* phi) {
  if (!(res > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  const double horizon = path.horizon();
  std::vector<double> grid(path.times());
  const auto cells = static_cast<long>(std::ceil(horizon / res));
  for (long k = 0; k <= cells; ++k) grid.push_back(std::min(horizon, static_cast<double>(k) * res));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const int dim = path.dimension();
  std::vector<double> flat;
  auto push = [&](double t, const Point& x) {
    flat.push_back(t);
    flat.insert(flat.end(), x.data(), x.data() + dim);
  };
  std::size_t next_sample = 0;
  for (double t : grid) {
    while (next_sample < path.size() && path.time(next_sample) < t) ++next_sample;
    const bool is_sample = next_sample < path.size() && path.time(next_sample) == t;
    const Point post = path.at(t);
    if (is_sample && next_sample > 0 && path.jump_size(next_sample) > 0.0) {
      const Point pre = path.value(next_sample - 1);
      push(t, pre);
      if (phi) {
        const Eigen::MatrixXd br = phi->bridge(pre, post);
        for (Eigen::Index s = 1; s < br.cols(); ++s) {
          const Point a = br.col(s - 1), b = br.col(s);
          const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / res)));
          for (int q = 1; q < pieces; ++q) push(t, a + (static_cast<double>(q) / pieces) * (b - a));
          if (s + 1 < br.cols()) push(t, b);
        }
      }
    }
    push(t, post);
  }
  const auto cols = static_cast<Eigen::Index>(flat.size() / static_cast<std::size_t>(dim + 1));
  return Eigen::Map<Eigen::MatrixXd>(flat.data(), dim + 1, cols);
}

namespace {

double frechet(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index n = a.cols(), m = b.cols();
  const Eigen::Index dim = a.rows() - 1;
  auto cost = [&](Eigen::Index i, Eigen::Index j) {
    const double dt = std::abs(a(0, i) - b(0, j));
    const double dx = (a.col(i).tail(dim) - b.col(j).tail(dim)).norm();
    return std::max(dt, dx);
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(static_cast<std::size_t>(m), inf), cur(static_cast<std::size_t>(m), inf);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double reach;
      if (i == 0 && j == 0) {
        reach = 0.0;
      } else {
        reach = inf;
        if (i > 0) reach = std::min(reach, prev[j]);
        if (j > 0) reach = std::min(reach, cur[j - 1]);
        if (i > 0 && j > 0) reach = std::min(reach, prev[j - 1]);
      }
      cur[j] = std::max(reach, cost(i, j));
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

void check_pair(const CadlagPath& a, const CadlagPath& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("Skorokhod distance: dimensions differ");
  if (a.horizon() != b.horizon()) throw std::invalid_argument("Skorokhod distance: horizons differ");
}

}  // namespace

double sj1_distance(const CadlagPath& a, const CadlagPath& b, double grid_resolution) {
  check_pair(a, b);
  return frechet(sampled_graph(a, grid_resolution, nullptr), sampled_graph(b, grid_resolution, nullptr));
}

double sm1_distance(const CadlagPath& a, const CadlagPath& b, double grid_resolution, const PathFunction& phi_a,
                    const PathFunction& phi_b) {
  check_pair(a, b);
  const double graph = frechet(sampled_graph(a, grid_resolution, &phi_a), sampled_graph(b, grid_resolution, &phi_b));
  // SM1 <= SJ1, so with linear completion the J1 coupling is also an admissible witness.
  if (phi_a.is_linear() && phi_b.is_linear()) return std::min(graph, sj1_distance(a, b, grid_resolution));
  return graph;
}

}  // namespace marcuslab
