#include "vfts/var.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vfts/error.hpp"
#include "vfts/stats.hpp"

namespace vfts {

namespace {

// Row r of the lag design holds (xi_{t-1}, ..., xi_{t-p}) for t = first + r.
Eigen::MatrixXd lag_design(const Eigen::MatrixXd& y, int order, Eigen::Index first) {
  const auto q = y.cols();
  const auto rows = y.rows() - first;
  Eigen::MatrixXd x(rows, q * order);
  for (int k = 1; k <= order; ++k) x.middleCols((k - 1) * q, q) = y.middleRows(first - k, rows);
  return x;
}

std::vector<BoolMatrix> full_mask(int order, Eigen::Index q) {
  return std::vector<BoolMatrix>(static_cast<std::size_t>(order), BoolMatrix::Constant(q, q, true));
}

VarModel fit_on_rows(const ScoreSeries& series, int order, const std::vector<BoolMatrix>& mask,
                     const VarOptions& options, Eigen::Index first) {
  const auto q = series.dimension();
  const auto n = series.length();
  if (order < 0) fail(ErrorCode::InvalidArgument, "VAR order must be nonnegative");
  if (static_cast<int>(mask.size()) != order)
    fail(ErrorCode::InvalidArgument, "mask must have one matrix per lag");
  const auto rows = n - first;
  const Eigen::Index regressors = order * q + (options.intercept ? 1 : 0);
  if (rows <= regressors)
    fail(ErrorCode::InsufficientData, "VAR(" + std::to_string(order) + ") needs more than " +
                                          std::to_string(regressors) + " effective rows");

  VarModel model;
  model.order = order;
  model.labels = series.labels;
  model.mask = mask;
  model.n_effective = rows;
  model.has_intercept = options.intercept;
  model.intercept = Eigen::VectorXd::Zero(q);
  model.omega.assign(static_cast<std::size_t>(order), Eigen::MatrixXd::Zero(q, q));
  model.std_errors.assign(static_cast<std::size_t>(order), Eigen::MatrixXd::Zero(q, q));

  const Eigen::MatrixXd x = lag_design(series.values, order, first);
  const Eigen::MatrixXd y = series.values.bottomRows(rows);
  Eigen::MatrixXd resid(rows, q);
  for (Eigen::Index eq = 0; eq < q; ++eq) {
    std::vector<Eigen::Index> cols;
    for (int k = 0; k < order; ++k)
      for (Eigen::Index j = 0; j < q; ++j)
        if (mask[static_cast<std::size_t>(k)](eq, j)) cols.push_back(k * q + j);
    Eigen::MatrixXd xe(rows, static_cast<Eigen::Index>(cols.size()) + (options.intercept ? 1 : 0));
    for (std::size_t c = 0; c < cols.size(); ++c) xe.col(static_cast<Eigen::Index>(c)) = x.col(cols[c]);
    if (options.intercept) xe.col(xe.cols() - 1).setOnes();
    const auto fit = stats::ols(xe, y.col(eq));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto k = static_cast<std::size_t>(cols[c] / q);
      const auto j = cols[c] % q;
      model.omega[k](eq, j) = fit.beta(static_cast<Eigen::Index>(c));
      model.std_errors[k](eq, j) = fit.std_errors(static_cast<Eigen::Index>(c));
    }
    if (options.intercept) model.intercept(eq) = fit.beta(xe.cols() - 1);
    resid.col(eq) = fit.residuals;
  }
  model.sigma = resid.transpose() * resid / static_cast<double>(rows);
  return model;
}

void check_series(const ScoreSeries& series) {
  if (static_cast<Eigen::Index>(series.labels.size()) != series.dimension())
    fail(ErrorCode::InvalidArgument, "score series needs one label per column");
  if (series.dimension() < 1) fail(ErrorCode::InvalidArgument, "score series has no columns");
}

}  // namespace

Eigen::Index ScoreSeries::column(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) fail(ErrorCode::LabelMismatch, "unknown series label " + label);
  return static_cast<Eigen::Index>(it - labels.begin());
}

VarModel fit_var(const ScoreSeries& series, int order,
                 const std::optional<std::vector<BoolMatrix>>& mask, const VarOptions& options) {
  check_series(series);
  if (order < 0) fail(ErrorCode::InvalidArgument, "VAR order must be nonnegative");
  if (order >= series.length()) fail(ErrorCode::InsufficientData, "series shorter than the order");
  return fit_on_rows(series, order, mask.value_or(full_mask(order, series.dimension())), options,
                     order);
}

double var_aic(const ScoreSeries& series, int order, int max_order, const VarOptions& options) {
  check_series(series);
  if (order > max_order) fail(ErrorCode::InvalidArgument, "order exceeds max_order");
  if (max_order >= series.length()) fail(ErrorCode::InsufficientData, "series too short");
  const auto q = static_cast<double>(series.dimension());
  const auto model =
      fit_on_rows(series, order, full_mask(order, series.dimension()), options, max_order);
  const double det = model.sigma.determinant();
  const double log_det = det > 0.0 ? std::log(det) : -std::numeric_limits<double>::infinity();
  return log_det + 2.0 * order * q * q / static_cast<double>(series.length() - max_order);
}

int select_order_aic(const ScoreSeries& series, int max_order, const VarOptions& options) {
  if (max_order < 0) fail(ErrorCode::InvalidArgument, "max_order must be nonnegative");
  if (max_order > max_feasible_order(series.length(), series.dimension(), options.intercept))
    fail(ErrorCode::InsufficientData, "max_order infeasible for the series length");
  int best = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= max_order; ++p) {
    const double aic = var_aic(series, p, max_order, options);
    if (aic < best_aic) {
      best_aic = aic;
      best = p;
    }
  }
  return best;
}

VarModel prune_coefficients(const ScoreSeries& series, const VarModel& model, double threshold) {
  if (!(threshold >= 0.0)) fail(ErrorCode::InvalidArgument, "threshold must be nonnegative");
  const VarOptions options{model.has_intercept};
  VarModel current = model;
  for (int round = 0; round < 20; ++round) {
    auto mask = current.mask;
    bool changed = false;
    for (int k = 0; k < current.order; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      for (Eigen::Index i = 0; i < mask[kk].rows(); ++i)
        for (Eigen::Index j = 0; j < mask[kk].cols(); ++j) {
          if (!mask[kk](i, j)) continue;
          const double se = current.std_errors[kk](i, j);
          const double t = se > 0.0 ? std::abs(current.omega[kk](i, j)) / se
                                    : std::numeric_limits<double>::infinity();
          if (t < threshold) {
            mask[kk](i, j) = false;
            changed = true;
          }
        }
    }
    if (!changed) break;
    current = fit_var(series, current.order, mask, options);
  }
  return current;
}

Eigen::MatrixXd predict_var(const VarModel& model, const Eigen::MatrixXd& history, int horizon) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be at least 1");
  const auto q = model.dimension();
  if (history.cols() != q) fail(ErrorCode::LabelMismatch, "history dimension differs from model");
  if (history.rows() < model.order)
    fail(ErrorCode::ShortHistory, "history shorter than the VAR order");
  const auto p = model.order;
  // Rolling window: the last p known rows followed by the forecasts.
  Eigen::MatrixXd window(p + horizon, q);
  if (p > 0) window.topRows(p) = history.bottomRows(p);
  for (int h = 0; h < horizon; ++h) {
    Eigen::VectorXd next = model.intercept;
    for (int k = 1; k <= p; ++k)
      next += model.omega[static_cast<std::size_t>(k - 1)] * window.row(p + h - k).transpose();
    window.row(p + h) = next.transpose();
  }
  return window.bottomRows(horizon);
}

Eigen::MatrixXd residuals(const VarModel& model, const ScoreSeries& series) {
  if (series.labels != model.labels)
    fail(ErrorCode::LabelMismatch, "series labels differ from the model labels");
  const auto p = model.order;
  const auto rows = series.length() - p;
  if (rows < 1) fail(ErrorCode::InsufficientData, "series shorter than the VAR order");
  Eigen::MatrixXd fitted = Eigen::MatrixXd::Zero(rows, model.dimension());
  fitted.rowwise() += model.intercept.transpose();
  for (int k = 1; k <= p; ++k)
    fitted += series.values.middleRows(p - k, rows) *
              model.omega[static_cast<std::size_t>(k - 1)].transpose();
  return series.values.bottomRows(rows) - fitted;
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& omega) {
  if (omega.empty()) return {};
  const auto q = omega.front().rows();
  const auto p = static_cast<Eigen::Index>(omega.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p * q, p * q);
  for (Eigen::Index k = 0; k < p; ++k) c.block(0, k * q, q, q) = omega[static_cast<std::size_t>(k)];
  if (p > 1) c.block(q, 0, (p - 1) * q, (p - 1) * q).setIdentity();
  return c;
}

int max_feasible_order(Eigen::Index n, Eigen::Index q, bool intercept) {
  int p = 0;
  while (n - (p + 1) > (p + 1) * q + (intercept ? 1 : 0)) ++p;
  return p;
}

}  // namespace vfts
