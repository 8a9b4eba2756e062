#include "vfts/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "vfts/error.hpp"
#include "vfts/stats.hpp"

namespace vfts {

namespace {

void check_length(const Eigen::MatrixXd& residuals, int max_lag) {
  if (max_lag < 0) fail(ErrorCode::InvalidArgument, "max_lag must be nonnegative");
  if (residuals.rows() <= max_lag + residuals.cols())
    fail(ErrorCode::InsufficientData, "too few residual rows for the requested lags");
}

// C_l = (1/m) sum_{t=l}^{m-1} e_t e_{t-l}', on centered residuals.
Eigen::MatrixXd autocovariance(const Eigen::MatrixXd& centered, int lag) {
  const auto m = centered.rows();
  return centered.bottomRows(m - lag).transpose() * centered.topRows(m - lag) /
         static_cast<double>(m);
}

void append_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "NA";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out << buf;
}

}  // namespace

Eigen::MatrixXd cross_correlation(const Eigen::MatrixXd& residuals, int lag) {
  const Eigen::MatrixXd centered = residuals.rowwise() - residuals.colwise().mean();
  const auto m = centered.rows();
  const Eigen::VectorXd sd =
      (centered.colwise().squaredNorm() / static_cast<double>(m)).cwiseSqrt().transpose();
  // (i, j) pairs e_{t,i} with e_{t+lag,j}.
  const Eigen::MatrixXd cov = centered.topRows(m - lag).transpose() *
                              centered.bottomRows(m - lag) / static_cast<double>(m);
  return sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
}

CcmResult ccm_test(const Eigen::MatrixXd& residuals, int max_lag) {
  check_length(residuals, max_lag);
  const auto m = static_cast<double>(residuals.rows());
  const auto q = static_cast<double>(residuals.cols());
  CcmResult out;
  for (int k = 1; k <= max_lag; ++k) {
    const double t = m * cross_correlation(residuals, k).squaredNorm();
    out.statistics.push_back(t);
    out.p_values.push_back(stats::chi2_survival(t, q * q));
  }
  return out;
}

std::vector<double> ccm_significance(const Eigen::MatrixXd& residuals, int max_lag) {
  return ccm_test(residuals, max_lag).p_values;
}

PortmanteauResult portmanteau(const Eigen::MatrixXd& residuals, int max_lag, int fitted_order) {
  check_length(residuals, max_lag);
  if (fitted_order < 0) fail(ErrorCode::InvalidArgument, "fitted order must be nonnegative");
  if (max_lag <= fitted_order && max_lag > 0)
    fail(ErrorCode::InvalidArgument, "max_lag must exceed the fitted order");
  const Eigen::MatrixXd centered = residuals.rowwise() - residuals.colwise().mean();
  const auto m = static_cast<double>(centered.rows());
  const auto q = static_cast<double>(centered.cols());
  const Eigen::MatrixXd c0 = autocovariance(centered, 0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c0);
  if (!lu.isInvertible()) fail(ErrorCode::SingularCovariance, "residual covariance is singular");
  const Eigen::MatrixXd c0_inv = lu.inverse();

  PortmanteauResult out;
  double q_stat = 0.0;
  for (int l = 1; l <= max_lag; ++l) {
    const Eigen::MatrixXd cl = autocovariance(centered, l);
    const double term = (cl.transpose() * c0_inv * cl * c0_inv).trace();
    q_stat += m * m * term / (m - l);
    out.statistics.push_back(q_stat);
    out.p_values.push_back(l > fitted_order ? stats::chi2_survival(q_stat, q * q * (l - fitted_order))
                                            : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::vector<double> portmanteau_test(const Eigen::MatrixXd& residuals, int max_lag,
                                     int fitted_order) {
  return portmanteau(residuals, max_lag, fitted_order).p_values;
}

WhitenessReport whiteness_report(const Eigen::MatrixXd& residuals, int max_lag, int fitted_order,
                                 double alpha) {
  WhitenessReport report;
  report.max_lag = max_lag;
  report.fitted_order = fitted_order;
  report.dimension = residuals.cols();
  report.alpha = alpha;
  const auto ccm = ccm_test(residuals, max_lag);
  const auto port = portmanteau(residuals, max_lag, fitted_order);
  report.ccm_statistics = ccm.statistics;
  report.ccm_p_values = ccm.p_values;
  report.portmanteau_statistics = port.statistics;
  report.portmanteau_p_values = port.p_values;

  int significant = 0;
  bool early = false;
  for (int k = 0; k < max_lag; ++k) {
    if (ccm.p_values[static_cast<std::size_t>(k)] < alpha) {
      ++significant;
      if (k < 5) early = true;
    }
  }
  const int allowed = (max_lag + 9) / 10;
  report.adequate_first_5 = !early && significant <= allowed;
  return report;
}

void write_whiteness_csv(std::ostream& out, const WhitenessReport& report) {
  out << "panel,lag,p_value,reference\n";
  auto emit = [&](const char* panel, const std::vector<double>& p) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      out << panel << ',' << (k + 1) << ',';
      append_number(out, p[k]);
      out << ',';
      append_number(out, report.alpha);
      out << '\n';
    }
  };
  emit("ccm", report.ccm_p_values);
  emit("ljung_box", report.portmanteau_p_values);
}

}  // namespace vfts
