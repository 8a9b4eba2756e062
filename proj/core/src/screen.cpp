#include "vfts/screen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "vfts/error.hpp"
#include "vfts/fpca.hpp"

namespace vfts {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

bool lower_half(const Eigen::Vector2d& v) { return v.y() < 0.0 || (v.y() == 0.0 && v.x() < 0.0); }

bool angle_less(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const bool ha = lower_half(a), hb = lower_half(b);
  if (ha != hb) return hb;
  return cross(a, b) > 0.0;
}

bool same_direction(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return cross(a, b) == 0.0 && a.dot(b) > 0.0;
}

// b lies in the half-open arc (angle(a), angle(a) + pi].
bool in_arc(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double c = cross(a, b);
  return c > 0.0 || (c == 0.0 && a.dot(b) < 0.0);
}

bool inside_hull(const std::vector<Eigen::Vector2d>& hull, const Eigen::Vector2d& p, double tol) {
  if (hull.size() == 1) return (p - hull[0]).norm() <= tol;
  if (hull.size() == 2) {
    const Eigen::Vector2d d = hull[1] - hull[0];
    const double len = d.norm();
    const double along = (p - hull[0]).dot(d) / len;
    return std::abs(cross(d, p - hull[0])) / len <= tol && along >= -tol && along <= len + tol;
  }
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const auto& a = hull[e];
    const auto& b = hull[(e + 1) % hull.size()];
    const Eigen::Vector2d edge = b - a;
    if (cross(edge, p - a) < -tol * edge.norm()) return false;
  }
  return true;
}

}  // namespace

std::size_t OutlierReport::flagged_count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

double halfspace_depth(const Eigen::MatrixXd& points, const Eigen::Vector2d& query) {
  if (points.cols() != 2) fail(ErrorCode::InvalidArgument, "depth needs an n x 2 matrix");
  const auto n = points.rows();
  if (n < 1) fail(ErrorCode::InvalidArgument, "depth needs at least one point");

  std::vector<Eigen::Vector2d> v;
  v.reserve(static_cast<std::size_t>(n));
  Eigen::Index coincident = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d d = points.row(i).transpose() - query;
    if (d.x() == 0.0 && d.y() == 0.0)
      ++coincident;
    else
      v.push_back(d);
  }
  const auto m = v.size();
  if (m == 0) return static_cast<double>(coincident) / static_cast<double>(n);
  std::sort(v.begin(), v.end(), angle_less);

  // Open-halfplane counts only change when the boundary direction crosses a
  // point angle or its antipode; probing just past each gives the minimum.
  std::size_t best = m;
  std::size_t group_end = 0;  // one past the same-direction run of v[i]
  std::size_t arc_end = 0;    // one past the arc (angle(v[i]), angle(v[i]) + pi]
  auto at = [&](std::size_t j) -> const Eigen::Vector2d& { return v[j % m]; };
  for (std::size_t i = 0; i < m; ++i) {
    group_end = std::max(group_end, i + 1);
    while (group_end < i + m && same_direction(v[i], at(group_end))) ++group_end;
    arc_end = std::max(arc_end, group_end);
    while (arc_end < i + m && in_arc(v[i], at(arc_end))) ++arc_end;
    const std::size_t count = arc_end - group_end;
    best = std::min({best, count, m - count});
  }
  return static_cast<double>(coincident + static_cast<Eigen::Index>(best)) /
         static_cast<double>(n);
}

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points) {
  std::sort(points.begin(), points.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() <= 2) return points;
  std::vector<Eigen::Vector2d> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const auto& p = points[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

OutlierReport bagplot_flags(const Eigen::MatrixXd& points, double fence_factor) {
  if (!(fence_factor > 1.0)) fail(ErrorCode::InvalidArgument, "fence factor must exceed 1");
  if (points.cols() != 2) fail(ErrorCode::InvalidArgument, "bagplot needs an n x 2 matrix");
  const auto n = points.rows();
  if (n < 1) fail(ErrorCode::InvalidArgument, "bagplot needs at least one point");

  OutlierReport report;
  report.fence_factor = fence_factor;
  report.scores2d = points;
  report.flags.assign(static_cast<std::size_t>(n), false);
  report.depths.resize(n);

  bool all_equal = true;
  for (Eigen::Index i = 1; i < n && all_equal; ++i)
    all_equal = points.row(i) == points.row(0);
  if (all_equal) {
    report.degenerate = true;
    report.depths.setOnes();
    return report;
  }

  for (Eigen::Index i = 0; i < n; ++i)
    report.depths(i) = halfspace_depth(points, points.row(i).transpose());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return report.depths(a) > report.depths(b);
  });
  report.median_index = order.front();
  const Eigen::Vector2d center = points.row(report.median_index).transpose();

  // Smallest depth region holding at least half the points: ties with the
  // ceil(n/2)-th deepest point all enter the bag.
  const auto half = static_cast<std::size_t>((n + 1) / 2);
  const double cutoff = report.depths(order[half - 1]);
  std::vector<Eigen::Vector2d> bag;
  for (std::size_t r = 0; r < order.size() && report.depths(order[r]) >= cutoff; ++r)
    bag.push_back(points.row(order[r]).transpose());
  const auto hull = convex_hull(std::move(bag));

  double extent = 0.0;
  for (const auto& h : hull) extent = std::max(extent, (h - center).norm());
  const double tol = 1e-12 * std::max(extent, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d p = points.row(i).transpose();
    const Eigen::Vector2d shrunk = center + (p - center) / fence_factor;
    report.flags[static_cast<std::size_t>(i)] = !inside_hull(hull, shrunk, tol);
  }
  return report;
}

OutlierReport functional_bagplot_flags(const FunctionalSample& sample, double fence_factor) {
  if (sample.size() < 10)
    fail(ErrorCode::TooFewCurves, "functional bagplot needs at least 10 curves");
  const auto model = fpca_univariate(sample);
  return bagplot_flags(model.scores.leftCols(2), fence_factor);
}

std::vector<std::size_t> flagged_cycles(std::span<const FunctionalSample> samples,
                                        double fence_factor, std::vector<OutlierReport>* reports) {
  std::set<std::size_t> flagged;
  for (const auto& sample : samples) {
    auto report = functional_bagplot_flags(sample, fence_factor);
    for (std::size_t i = 0; i < report.flags.size(); ++i)
      if (report.flags[i]) flagged.insert(sample.cycle_indices[i]);
    if (reports) reports->push_back(std::move(report));
  }
  return {flagged.begin(), flagged.end()};
}

FunctionalSample remove_cycles(const FunctionalSample& sample,
                               std::span<const std::size_t> cycles) {
  const std::set<std::size_t> drop(cycles.begin(), cycles.end());
  FunctionalSample out;
  out.basis = sample.basis;
  out.process = sample.process;
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < sample.cycle_indices.size(); ++i) {
    if (!drop.count(sample.cycle_indices[i])) {
      keep.push_back(static_cast<Eigen::Index>(i));
      out.cycle_indices.push_back(sample.cycle_indices[i]);
    }
  }
  out.coefficients = sample.coefficients(keep, Eigen::all);
  return out;
}

}  // namespace vfts
