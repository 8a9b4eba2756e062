#include "vfts/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vfts/error.hpp"

namespace vfts {

namespace {

// Index i of the knot span with knots[i] <= t < knots[i + 1]; t = 1 maps to
// the last non-empty span.
int find_span(const BasisSpec& basis, double t) {
  const int last = basis.dimension - 1;
  if (t >= basis.knots[last + 1]) return last;
  const auto begin = basis.knots.begin() + basis.degree();
  const auto end = basis.knots.begin() + last + 1;
  const auto it = std::upper_bound(begin, end, t);
  return static_cast<int>(it - basis.knots.begin()) - 1;
}

// Nonzero basis values of the given degree on `span`: entries correspond to
// functions span - degree .. span.
std::vector<double> nonzero_values(const std::vector<double>& knots, int span, int degree,
                                   double t) {
  std::vector<double> n(degree + 1, 0.0), left(degree + 1), right(degree + 1);
  n[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return n;
}

void check_domain(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    fail(ErrorCode::ArgumentOutOfDomain, "basis argument must lie in [0, 1]");
}

// Golub-Welsch nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes = eig.eigenvalues();
  weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
}

}  // namespace

BasisSpec make_basis(int dimension) {
  if (dimension < 4)
    fail(ErrorCode::DimensionTooSmall, "cubic basis needs dimension >= 4");
  const int interior = dimension - 4;
  std::vector<double> knots(interior);
  for (int j = 0; j < interior; ++j) knots[j] = static_cast<double>(j + 1) / (interior + 1);
  return make_basis(dimension, 4, knots);
}

BasisSpec make_basis(int dimension, int order, std::span<const double> interior_knots) {
  if (order < 1) fail(ErrorCode::InvalidArgument, "spline order must be positive");
  if (dimension < order)
    fail(ErrorCode::DimensionTooSmall, "basis dimension must be at least the order");
  if (static_cast<int>(interior_knots.size()) != dimension - order)
    fail(ErrorCode::InvalidArgument, "need dimension - order interior knots");
  double prev = 0.0;
  for (double k : interior_knots) {
    if (!(k > prev && k < 1.0))
      fail(ErrorCode::InvalidArgument, "interior knots must increase strictly inside (0, 1)");
    prev = k;
  }
  BasisSpec spec;
  spec.dimension = dimension;
  spec.order = order;
  spec.knots.assign(order, 0.0);
  spec.knots.insert(spec.knots.end(), interior_knots.begin(), interior_knots.end());
  spec.knots.insert(spec.knots.end(), order, 1.0);
  return spec;
}

Eigen::VectorXd eval_basis(const BasisSpec& basis, double t) {
  check_domain(t);
  const int span = find_span(basis, t);
  const auto n = nonzero_values(basis.knots, span, basis.degree(), t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.dimension);
  for (int r = 0; r <= basis.degree(); ++r) out(span - basis.degree() + r) = n[r];
  return out;
}

Eigen::VectorXd eval_basis_derivative(const BasisSpec& basis, double t) {
  check_domain(t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.dimension);
  const int p = basis.degree();
  if (p == 0) return out;
  const int span = find_span(basis, t);
  // Degree p-1 values for functions span-p+1 .. span.
  const auto lower = nonzero_values(basis.knots, span, p - 1, t);
  const auto& u = basis.knots;
  for (int r = 0; r <= p; ++r) {
    const int a = span - p + r;
    double d = 0.0;
    // B_{a,p-1} is lower[r - 1] and B_{a+1,p-1} is lower[r] when in range.
    if (r >= 1) {
      const double h = u[a + p] - u[a];
      if (h > 0.0) d += p / h * lower[r - 1];
    }
    if (r <= p - 1) {
      const double h = u[a + p + 1] - u[a + 1];
      if (h > 0.0) d -= p / h * lower[r];
    }
    out(a) = d;
  }
  return out;
}

Eigen::MatrixXd design_matrix(const BasisSpec& basis, std::span<const double> grid) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(grid.size()), basis.dimension);
  for (std::size_t j = 0; j < grid.size(); ++j)
    x.row(static_cast<Eigen::Index>(j)) = eval_basis(basis, grid[j]).transpose();
  return x;
}

Eigen::MatrixXd gram_matrix(const BasisSpec& basis) {
  Eigen::VectorXd nodes, weights;
  gauss_legendre(basis.order, nodes, weights);
  const int k = basis.dimension;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, k);
  for (int span = basis.degree(); span < k; ++span) {
    const double a = basis.knots[span], b = basis.knots[span + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (Eigen::Index g = 0; g < nodes.size(); ++g) {
      const double t = mid + half * nodes(g);
      const auto n = nonzero_values(basis.knots, span, basis.degree(), t);
      const int first = span - basis.degree();
      for (int r = 0; r <= basis.degree(); ++r)
        for (int c = 0; c <= basis.degree(); ++c)
          w(first + r, first + c) += half * weights(g) * n[r] * n[c];
    }
  }
  return w;
}

Eigen::VectorXd smooth_curve(std::span<const double> grid, std::span<const double> values,
                             const BasisSpec& basis) {
  if (grid.size() != values.size())
    fail(ErrorCode::InvalidArgument, "grid and values differ in length");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct =
      std::distance(sorted.begin(), std::unique(sorted.begin(), sorted.end()));
  if (distinct < basis.dimension)
    fail(ErrorCode::RankDeficientDesign, "fewer distinct grid points than basis functions");

  const Eigen::MatrixXd x = design_matrix(basis, grid);
  const Eigen::Map<const Eigen::VectorXd> y(values.data(), static_cast<Eigen::Index>(values.size()));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < basis.dimension)
    fail(ErrorCode::RankDeficientDesign, "design matrix is rank deficient");
  return qr.solve(y);
}

Eigen::VectorXd smooth_curve(const RegisteredCurve& curve, const BasisSpec& basis) {
  return smooth_curve(curve.grid, curve.values, basis);
}

FunctionalSample smooth_curves(std::span<const RegisteredCurve> curves, const BasisSpec& basis,
                               const std::string& process) {
  std::vector<std::size_t> order(curves.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return curves[a].cycle_index < curves[b].cycle_index;
  });

  FunctionalSample sample;
  sample.basis = basis;
  sample.process = process;
  sample.coefficients.resize(static_cast<Eigen::Index>(curves.size()), basis.dimension);
  sample.cycle_indices.reserve(curves.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& curve = curves[order[r]];
    if (r > 0 && curve.cycle_index == sample.cycle_indices.back())
      fail(ErrorCode::InvalidArgument, "duplicate cycle index in one process");
    sample.coefficients.row(static_cast<Eigen::Index>(r)) = smooth_curve(curve, basis).transpose();
    sample.cycle_indices.push_back(curve.cycle_index);
  }
  return sample;
}

Eigen::MatrixXd evaluate_curves(const BasisSpec& basis, const Eigen::MatrixXd& coefficients,
                                std::span<const double> grid) {
  return coefficients * design_matrix(basis, grid).transpose();
}

std::vector<double> uniform_grid(std::size_t points) {
  if (points < 2) fail(ErrorCode::InvalidArgument, "grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t g = 0; g < points; ++g)
    grid[g] = static_cast<double>(g) / static_cast<double>(points - 1);
  return grid;
}

}  // namespace vfts
