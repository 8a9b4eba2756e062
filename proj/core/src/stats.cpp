#include "vfts/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "vfts/error.hpp"

namespace vfts::stats {

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) fail(ErrorCode::InvalidArgument, "ols: row count mismatch");
  OlsFit fit;
  fit.dof = x.rows() - x.cols();
  if (fit.dof <= 0) fail(ErrorCode::InsufficientData, "ols: no residual degrees of freedom");
  if (x.cols() == 0) {
    fit.residuals = y;
    fit.rss = y.squaredNorm();
    return fit;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) fail(ErrorCode::CollinearRegressors, "ols: collinear regressors");
  fit.beta = qr.solve(y);
  fit.residuals = y - x * fit.beta;
  fit.rss = fit.residuals.squaredNorm();

  // (X'X)^-1 = P R^-1 R^-T P' with X P = Q R.
  const auto k = x.cols();
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd diag_pivoted = r_inv.rowwise().squaredNorm();
  const double s2 = fit.rss / static_cast<double>(fit.dof);
  fit.std_errors.resize(k);
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index j = 0; j < k; ++j) fit.std_errors(perm(j)) = std::sqrt(s2 * diag_pivoted(j));
  return fit;
}

double f_survival(double statistic, double df_num, double df_den) {
  if (!(statistic > 0.0)) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  const boost::math::fisher_f dist(df_num, df_den);
  return std::clamp(boost::math::cdf(boost::math::complement(dist, statistic)), 0.0, 1.0);
}

double chi2_survival(double statistic, double df) {
  if (!(statistic > 0.0)) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  const boost::math::chi_squared dist(df);
  return std::clamp(boost::math::cdf(boost::math::complement(dist, statistic)), 0.0, 1.0);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(m, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace vfts::stats
