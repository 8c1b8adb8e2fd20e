#pragma once

#include <Eigen/Dense>

#include "marcuslab/cadlag_path.hpp"

namespace marcuslab {

/// p-variation of the polyline/step skeleton whose vertices are the columns of
/// `points`, taken in order: sup over sub-partitions that keep the first and
/// last vertex of (sum |x_{i_{k+1}} - x_{i_k}|^p)^{1/p}.
///
/// Exact for step paths and for piecewise-linear paths whose breakpoints are
/// columns. Runs the O(N^2) dynamic programme with branch-and-bound pruning
/// over a bounding-box tree; the result is identical to the unpruned programme.
double p_variation(const Eigen::MatrixXd& points, double p);
double p_variation(const CadlagPath& path, double p);

/// The pruned programme with an explicit leaf size (p_variation uses 32 and
/// falls back to the unpruned one below 65 points).
double p_variation_tree(const Eigen::MatrixXd& points, double p, int leaf_size);

/// Unpruned O(N^2) dynamic programme (reference for the pruned one).
double p_variation_quadratic(const Eigen::MatrixXd& points, double p);

/// Exhaustive maximum over all 2^{N-2} sub-partitions. Throws TooLarge for N > 14.
double p_variation_bruteforce(const Eigen::MatrixXd& points, double p);
double p_variation_bruteforce(const CadlagPath& path, double p);

/// Sum of squared jump magnitudes.
double jump_sum_sq(const CadlagPath& path);

}  // namespace marcuslab
