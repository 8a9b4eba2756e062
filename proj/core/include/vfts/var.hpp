#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vfts {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A vector time series of principal component scores, one row per cycle.
struct ScoreSeries {
  Eigen::MatrixXd values;  // n x q
  std::vector<std::string> labels;
  std::string origin;

  [[nodiscard]] Eigen::Index length() const noexcept { return values.rows(); }
  [[nodiscard]] Eigen::Index dimension() const noexcept { return values.cols(); }
  [[nodiscard]] Eigen::Index column(const std::string& label) const;
};

/// xi_i = c + sum_k Omega_k xi_{i-k} + eps_i, with masked entries fixed at 0.
struct VarModel {
  int order = 0;
  std::vector<Eigen::MatrixXd> omega;  // order matrices, q x q
  std::vector<BoolMatrix> mask;        // true = free coefficient
  std::vector<Eigen::MatrixXd> std_errors;
  Eigen::MatrixXd sigma;               // residual covariance, divisor n - p
  Eigen::Index n_effective = 0;
  std::vector<std::string> labels;
  bool has_intercept = false;
  Eigen::VectorXd intercept;           // zero unless has_intercept

  [[nodiscard]] Eigen::Index dimension() const noexcept {
    return static_cast<Eigen::Index>(labels.size());
  }
};

struct VarOptions {
  bool intercept = false;
};

/// Equation-by-equation OLS on rows p..n-1, restricted to unmasked regressors.
VarModel fit_var(const ScoreSeries& series, int order,
                 const std::optional<std::vector<BoolMatrix>>& mask = std::nullopt,
                 const VarOptions& options = {});

/// AIC(p) = ln det Sigma(p) + 2 p q^2 / (n - p_max) with every order fitted on
/// the common rows p_max..n-1.
double var_aic(const ScoreSeries& series, int order, int max_order, const VarOptions& options = {});

/// Order in 0..max_order minimizing var_aic; ties go to the smaller order.
int select_order_aic(const ScoreSeries& series, int max_order, const VarOptions& options = {});

/// Iteratively masks coefficients with |t| < threshold and refits until the
/// mask stops changing (at most 20 rounds).
VarModel prune_coefficients(const ScoreSeries& series, const VarModel& model,
                            double threshold = 1.96);

/// Iterated forecasts from the last `order` rows of history (innovations at zero).
Eigen::MatrixXd predict_var(const VarModel& model, const Eigen::MatrixXd& history, int horizon);

/// Residuals xi_i - fitted_i for i = p..n-1.
Eigen::MatrixXd residuals(const VarModel& model, const ScoreSeries& series);

/// Companion matrix of the lag polynomial.
Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& omega);

/// Largest feasible order for n rows of dimension q (n - p > p q).
int max_feasible_order(Eigen::Index n, Eigen::Index q, bool intercept = false);

}  // namespace vfts
