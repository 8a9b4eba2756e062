#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vfts/basis.hpp"

namespace vfts {

struct OutlierReport {
  std::vector<bool> flags;   // true = outside the fence
  Eigen::VectorXd depths;    // normalized Tukey depth of each point
  Eigen::MatrixXd scores2d;  // n x 2 points the depths were computed on
  double fence_factor = 2.58;
  Eigen::Index median_index = 0;  // deepest point, smallest index on ties
  bool degenerate = false;        // all points coincide; nothing flagged

  [[nodiscard]] std::size_t flagged_count() const;
};

/// Normalized Tukey halfspace depth of `query` in the bivariate cloud:
/// the smallest fraction of points in a closed halfplane whose boundary
/// passes through the query. Exact, O(n log n) angular sweep.
double halfspace_depth(const Eigen::MatrixXd& points, const Eigen::Vector2d& query);

/// Bagplot on raw bivariate points: the bag is the convex hull of the
/// ceil(n/2) deepest points, the fence is the bag scaled by `fence_factor`
/// about the deepest point.
OutlierReport bagplot_flags(const Eigen::MatrixXd& points, double fence_factor = 2.58);

/// Functional bagplot: bagplot_flags on the first two univariate PC scores.
OutlierReport functional_bagplot_flags(const FunctionalSample& sample, double fence_factor = 2.58);

/// Runs the functional bagplot per process and returns the union of flagged
/// cycle indices (ascending). A cycle flagged in any process is dropped.
std::vector<std::size_t> flagged_cycles(std::span<const FunctionalSample> samples,
                                        double fence_factor, std::vector<OutlierReport>* reports = nullptr);

/// Drops the listed cycles from a sample.
FunctionalSample remove_cycles(const FunctionalSample& sample, std::span<const std::size_t> cycles);

/// Counter-clockwise convex hull (Andrew's monotone chain); collinear points dropped.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points);

}  // namespace vfts
