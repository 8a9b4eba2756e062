#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vfts/basis.hpp"

namespace vfts {

enum class PcaKind { Univariate, Multivariate };

/// One functional variable inside the stacked coefficient layout.
struct PcaBlock {
  std::string label;
  BasisSpec basis;
  Eigen::Index offset = 0;  // first coefficient column of this block
};

/// Result of a univariate or multivariate FPCA.
///
/// Column j of `eigenfunctions` holds the basis coefficients b_j of the j-th
/// eigenfunction (stacked over blocks). Components are sorted by decreasing
/// eigenvalue; all K (or sum of K_h) components are kept.
struct PcaModel {
  PcaKind kind = PcaKind::Univariate;
  std::vector<PcaBlock> blocks;
  Eigen::VectorXd mean;            // mean coefficient vector
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;  // coefficients, one column per component
  Eigen::MatrixXd scores;          // n x components
  double total_variance = 0.0;
  std::vector<std::size_t> cycle_indices;

  [[nodiscard]] Eigen::Index components() const noexcept { return eigenvalues.size(); }
  [[nodiscard]] Eigen::Index stacked_dimension() const noexcept { return mean.size(); }
};

PcaModel fpca_univariate(const FunctionalSample& sample);

/// Joint FPCA of H processes observed on the same cycles. The L2 geometry
/// is the block-diagonal Gram matrix of the per-process bases.
PcaModel fpca_multivariate(std::span<const FunctionalSample> samples);

/// Smallest q whose cumulative share reaches `threshold`. The share is
/// relative to `total` when given (e.g. a total that includes components not
/// listed), otherwise to the sum of the eigenvalues.
int choose_q(std::span<const double> eigenvalues, double threshold,
             std::optional<double> total = std::nullopt);
int choose_q(const Eigen::VectorXd& eigenvalues, double threshold,
             std::optional<double> total = std::nullopt);

/// choose_q on a table of cumulative explained-variance percentages.
int choose_q_from_cumulative_percent(std::span<const double> cumulative_percent,
                                     double threshold);

/// Cumulative explained-variance fractions of the first `count` components.
std::vector<double> cumulative_share(const PcaModel& model, std::size_t count);

/// Truncated K-L reconstruction with q components; one sample per block.
std::vector<FunctionalSample> reconstruct(const PcaModel& model, int q);

/// Scores of new stacked coefficient rows on the model's eigenfunctions.
Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& stacked_coefficients);

/// Stacks per-process coefficient matrices column-wise after checking that
/// every sample covers the same cycles.
Eigen::MatrixXd stack_coefficients(std::span<const FunctionalSample> samples);

/// Block-diagonal Gram matrix of the model layout.
Eigen::MatrixXd model_gram(const PcaModel& model);

/// Values of the first q eigenfunctions restricted to block h, at t.
Eigen::VectorXd eigenfunction_values(const PcaModel& model, std::size_t block, double t, int q);

/// Mean function of block h at the grid points.
Eigen::VectorXd mean_values(const PcaModel& model, std::size_t block, std::span<const double> grid);

}  // namespace vfts
