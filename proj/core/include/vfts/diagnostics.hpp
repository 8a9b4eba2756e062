#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace vfts {

/// Per-lag cross-correlation statistics T_k = m * sum_ij R_k(i,j)^2 and their
/// chi-square(q^2) p-values, k = 1..max_lag.
struct CcmResult {
  std::vector<double> statistics;
  std::vector<double> p_values;
};

CcmResult ccm_test(const Eigen::MatrixXd& residuals, int max_lag);
std::vector<double> ccm_significance(const Eigen::MatrixXd& residuals, int max_lag);

/// Lag-k correlation matrix R_k(i, j) = corr(e_{t,i}, e_{t+k,j}).
Eigen::MatrixXd cross_correlation(const Eigen::MatrixXd& residuals, int lag);

/// Multivariate Ljung-Box statistics (Hosking form), k = 1..max_lag:
/// Q_k = m^2 sum_{l<=k} tr(C_l' C_0^-1 C_l C_0^-1) / (m - l).
/// p-values use q^2 (k - fitted_order) degrees of freedom; entries with
/// k <= fitted_order are NaN.
struct PortmanteauResult {
  std::vector<double> statistics;
  std::vector<double> p_values;
};

PortmanteauResult portmanteau(const Eigen::MatrixXd& residuals, int max_lag, int fitted_order);
std::vector<double> portmanteau_test(const Eigen::MatrixXd& residuals, int max_lag,
                                     int fitted_order);

struct WhitenessReport {
  int max_lag = 0;
  int fitted_order = 0;
  Eigen::Index dimension = 0;
  double alpha = 0.05;
  std::vector<double> ccm_statistics;
  std::vector<double> ccm_p_values;
  std::vector<double> portmanteau_statistics;
  std::vector<double> portmanteau_p_values;
  /// None of the first five CCMs is significant and at most
  /// ceil(max_lag / 10) CCMs are significant overall.
  bool adequate_first_5 = false;
};

WhitenessReport whiteness_report(const Eigen::MatrixXd& residuals, int max_lag, int fitted_order,
                                 double alpha = 0.05);

/// Two-panel plot data: panel,lag,p_value,reference.
void write_whiteness_csv(std::ostream& out, const WhitenessReport& report);

}  // namespace vfts
