#pragma once

#include <Eigen/Dense>

namespace vfts::stats {

/// Ordinary least squares fit of y on the columns of x (no implicit intercept).
struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::VectorXd std_errors;  // sqrt(diag(s^2 (X'X)^-1)), s^2 = rss / dof
  double rss = 0.0;
  Eigen::Index dof = 0;        // rows - columns
};

/// Solves by column-pivoted QR; throws CollinearRegressors when x has
/// deficient column rank. A zero-column x returns y as the residual.
OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Upper-tail probabilities of the reference distributions.
double f_survival(double statistic, double df_num, double df_den);
double chi2_survival(double statistic, double df);

/// Largest modulus among the eigenvalues of a real square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

}  // namespace vfts::stats
