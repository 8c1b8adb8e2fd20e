#pragma once

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/path_function.hpp"

namespace marcuslab {

/// Grid-restricted upper approximations of the strong Skorokhod metrics.
///
/// Both paths are sampled on the union of a uniform grid of spacing
/// `grid_resolution` and their own sample times; at a jump time the pre-jump
/// and post-jump values are both listed. The distance is the discrete Frechet
/// distance between the two point sequences (t, X) under the cost
/// max{|t - s|, |X - Y|}.

/// SJ1: no jump is filled in, so a jump can only be matched against a jump.
double sj1_distance(const CadlagPath& a, const CadlagPath& b, double grid_resolution);

/// SM1: the completed graphs are traversed instead, each jump filled by the
/// path function (linear by default; a flow bridge gives the generalised
/// metric on driver-solution pairs), subdivided to the grid resolution. With
/// linear completion on both sides the result never exceeds sj1_distance.
double sm1_distance(const CadlagPath& a, const CadlagPath& b, double grid_resolution,
                    const PathFunction& phi_a = PathFunction::linear(),
                    const PathFunction& phi_b = PathFunction::linear());

/// Vertices (time in row 0, value below) of the sampled graph used above.
Eigen::MatrixXd sampled_graph(const CadlagPath& path, double grid_resolution, const PathFunction* phi);

}  // namespace marcuslab
