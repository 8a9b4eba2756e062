#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vfts/ingest.hpp"

namespace vfts {

/// Clamped B-spline basis on [0, 1].
///
/// `knots` has dimension + order entries: `order` zeros, the interior
/// knots, then `order` ones.
struct BasisSpec {
  int dimension = 0;
  int order = 4;
  std::vector<double> knots;

  [[nodiscard]] int degree() const noexcept { return order - 1; }
  bool operator==(const BasisSpec&) const = default;
};

/// n smoothed curves as rows of basis coefficients, ordered by cycle index.
struct FunctionalSample {
  BasisSpec basis;
  Eigen::MatrixXd coefficients;  // n x K
  std::vector<std::size_t> cycle_indices;
  std::string process;  // "set", "reset" or any label

  [[nodiscard]] std::size_t size() const noexcept { return cycle_indices.size(); }
};

/// Cubic basis with dimension - 4 equally spaced interior knots.
BasisSpec make_basis(int dimension);

/// Builds a clamped basis of the given order from explicit interior knots.
BasisSpec make_basis(int dimension, int order, std::span<const double> interior_knots);

/// Values of all K basis functions at t, computed with the Cox-de Boor
/// triangle. Right-continuous, except that t = 1 belongs to the last span.
Eigen::VectorXd eval_basis(const BasisSpec& basis, double t);

/// First derivatives of all K basis functions at t.
Eigen::VectorXd eval_basis_derivative(const BasisSpec& basis, double t);

/// Rows are eval_basis at each grid point.
Eigen::MatrixXd design_matrix(const BasisSpec& basis, std::span<const double> grid);

/// W(a, b) = integral over [0, 1] of B_a(t) B_b(t), exact up to rounding
/// (Gauss-Legendre with order nodes per knot span).
Eigen::MatrixXd gram_matrix(const BasisSpec& basis);

/// Unweighted least-squares coefficients via column-pivoted Householder QR.
Eigen::VectorXd smooth_curve(std::span<const double> grid, std::span<const double> values,
                             const BasisSpec& basis);
Eigen::VectorXd smooth_curve(const RegisteredCurve& curve, const BasisSpec& basis);

/// Smooths a batch of curves of one process into a FunctionalSample. Curves
/// are sorted by cycle index.
FunctionalSample smooth_curves(std::span<const RegisteredCurve> curves, const BasisSpec& basis,
                               const std::string& process);

/// Evaluates spline functions with coefficient rows `coefficients` on a grid:
/// result(i, g) = B(grid_g)^T c_i.
Eigen::MatrixXd evaluate_curves(const BasisSpec& basis, const Eigen::MatrixXd& coefficients,
                                std::span<const double> grid);

/// Uniform grid of `points` values from 0 to 1 inclusive.
std::vector<double> uniform_grid(std::size_t points);

}  // namespace vfts
