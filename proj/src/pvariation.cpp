#include "marcuslab/pvariation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "marcuslab/errors.hpp"

namespace marcuslab {

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p-variation requires p >= 1");
}

// |increment|^p from a squared norm. Shared by every variant so that
// candidate sums are bitwise comparable.
inline double power_of_sq(double d2, double half_p) { return half_p == 1.0 ? d2 : std::pow(d2, half_p); }

double finish(double total, double p) { return p == 1.0 ? total : std::pow(total, 1.0 / p); }

constexpr Eigen::Index kLeaf = 32;

}  // namespace

double p_variation_quadratic(const Eigen::MatrixXd& x, double p) {
  check_exponent(p);
  const Eigen::Index n = x.cols();
  if (n < 2) return 0.0;
  const double hp = 0.5 * p;
  std::vector<double> dp(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index j = 1; j < n; ++j) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      best = std::max(best, dp[i] + power_of_sq((x.col(j) - x.col(i)).squaredNorm(), hp));
    }
    dp[j] = best;
  }
  return finish(dp.back(), p);
}

double p_variation(const Eigen::MatrixXd& x, double p) {
  if (x.cols() <= 2 * kLeaf) return p_variation_quadratic(x, p);
  return p_variation_tree(x, p, kLeaf);
}

double p_variation_tree(const Eigen::MatrixXd& x, double p, int leaf_size) {
  check_exponent(p);
  if (leaf_size < 1) throw std::invalid_argument("p_variation_tree: leaf size must be >= 1");
  const Eigen::Index n = x.cols();
  if (n < 2) return 0.0;
  const double hp = 0.5 * p;
  const Eigen::Index dim = x.rows();

  // Perfect binary tree over leaf blocks; node k has children 2k+1, 2k+2.
  const Eigen::Index leaves = (n + leaf_size - 1) / leaf_size;
  Eigen::Index width = 1;
  while (width < leaves) width *= 2;
  const Eigen::Index nodes = 2 * width - 1;
  Eigen::MatrixXd lo = Eigen::MatrixXd::Constant(dim, nodes, std::numeric_limits<double>::infinity());
  Eigen::MatrixXd hi = Eigen::MatrixXd::Constant(dim, nodes, -std::numeric_limits<double>::infinity());
  std::vector<Eigen::Index> first(static_cast<std::size_t>(nodes), n), last(static_cast<std::size_t>(nodes), -1);
  for (Eigen::Index leaf = 0; leaf < leaves; ++leaf) {
    const Eigen::Index node = width - 1 + leaf;
    const Eigen::Index a = leaf * leaf_size;
    const Eigen::Index b = std::min(n, a + leaf_size) - 1;
    first[node] = a;
    last[node] = b;
    lo.col(node) = x.middleCols(a, b - a + 1).rowwise().minCoeff();
    hi.col(node) = x.middleCols(a, b - a + 1).rowwise().maxCoeff();
  }
  for (Eigen::Index node = width - 2; node >= 0; --node) {
    const Eigen::Index l = 2 * node + 1, r = 2 * node + 2;
    first[node] = std::min(first[l], first[r]);
    last[node] = std::max(last[l], last[r]);
    lo.col(node) = lo.col(l).cwiseMin(lo.col(r));
    hi.col(node) = hi.col(l).cwiseMax(hi.col(r));
  }

  std::vector<double> dp(static_cast<std::size_t>(n), 0.0);
  std::vector<Eigen::Index> stack;
  stack.reserve(64);
  constexpr double kSlack = 1.0 + 1e-12;
  for (Eigen::Index j = 1; j < n; ++j) {
    const auto xj = x.col(j);
    double best = dp[j - 1] + power_of_sq((xj - x.col(j - 1)).squaredNorm(), hp);
    stack.clear();
    stack.push_back(0);
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      if (first[node] > j - 2 || last[node] < 0) continue;
      const Eigen::Index top = std::min(last[node], j - 2);
      double far2 = 0.0;
      for (Eigen::Index c = 0; c < dim; ++c) {
        const double d = std::max(xj[c] - lo(c, node), hi(c, node) - xj[c]);
        far2 += d * d;
      }
      if ((dp[top] + power_of_sq(far2, hp)) * kSlack <= best) continue;
      if (node >= width - 1) {
        for (Eigen::Index i = first[node]; i <= top; ++i) {
          best = std::max(best, dp[i] + power_of_sq((xj - x.col(i)).squaredNorm(), hp));
        }
      } else {
        // Left first on the stack so the right child (recent, larger dp) is visited first.
        stack.push_back(2 * node + 1);
        stack.push_back(2 * node + 2);
      }
    }
    dp[j] = best;
  }
  return finish(dp.back(), p);
}

double p_variation(const CadlagPath& path, double p) { return p_variation(path.values(), p); }

double p_variation_bruteforce(const Eigen::MatrixXd& x, double p) {
  check_exponent(p);
  const Eigen::Index n = x.cols();
  if (n > 14) throw TooLarge("p_variation_bruteforce: at most 14 points");
  if (n < 2) return 0.0;
  const double hp = 0.5 * p;
  const unsigned interior = static_cast<unsigned>(n - 2);
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << interior); ++mask) {
    double total = 0.0;
    Eigen::Index prev = 0;
    for (Eigen::Index k = 1; k < n; ++k) {
      const bool keep = k == n - 1 || (mask >> (k - 1)) & 1u;
      if (!keep) continue;
      total += power_of_sq((x.col(k) - x.col(prev)).squaredNorm(), hp);
      prev = k;
    }
    best = std::max(best, total);
  }
  return finish(best, p);
}

double p_variation_bruteforce(const CadlagPath& path, double p) { return p_variation_bruteforce(path.values(), p); }

double jump_sum_sq(const CadlagPath& path) {
  double s = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    s += (path.values().col(j) - path.values().col(j - 1)).squaredNorm();
  }
  return s;
}

}  // namespace marcuslab
