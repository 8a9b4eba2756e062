#include "vfts/causality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "vfts/error.hpp"
#include "vfts/stats.hpp"

namespace vfts {

namespace {

void append_lags(Eigen::MatrixXd& x, Eigen::Index& col, const Eigen::VectorXd& series, int lags,
                 Eigen::Index first) {
  const auto rows = x.rows();
  for (int l = 1; l <= lags; ++l) x.col(col++) = series.segment(first - l, rows);
}

ScoreSeries single_column(const ScoreSeries& series, Eigen::Index j) {
  return ScoreSeries{series.values.col(j), {series.labels[static_cast<std::size_t>(j)]},
                     series.origin};
}

int univariate_aic_order(const ScoreSeries& series, Eigen::Index j, int max_order) {
  const auto column = single_column(series, j);
  const int feasible = max_feasible_order(column.length(), 1);
  return select_order_aic(column, std::min(max_order, feasible));
}

}  // namespace

int CausalityReport::arrow_count() const {
  int count = 0;
  for (Eigen::Index i = 0; i < decisions.rows(); ++i)
    for (Eigen::Index j = 0; j < decisions.cols(); ++j)
      if (i != j && decisions(i, j)) ++count;
  return count;
}

TestResult partial_granger(const ScoreSeries& series, const std::string& cause,
                           const std::string& effect, const std::vector<std::string>& given,
                           int own_lags, int cause_lags, const GrangerOptions& options) {
  if (cause == effect) fail(ErrorCode::SameVariable, "cause and effect are the same series");
  for (const auto& g : given)
    if (g == cause || g == effect)
      fail(ErrorCode::OverlappingRoles, "conditioning set contains the cause or the effect");
  if (cause_lags < 1) fail(ErrorCode::InvalidArgument, "need at least one cause lag to test");
  if (own_lags < 0) fail(ErrorCode::InvalidArgument, "own lags must be nonnegative");

  const auto ci = series.column(cause);
  const auto ei = series.column(effect);
  std::vector<Eigen::Index> gi;
  for (const auto& g : given) gi.push_back(series.column(g));

  const int max_lag = std::max(own_lags, cause_lags);
  const auto n = series.length();
  const auto rows = n - max_lag;
  const Eigen::Index restricted_cols = (options.intercept ? 1 : 0) +
                                       own_lags * (1 + static_cast<Eigen::Index>(gi.size()));
  const Eigen::Index full_cols = restricted_cols + cause_lags;
  if (rows <= full_cols)
    fail(ErrorCode::InsufficientData, "too few observations for the requested lags");

  Eigen::MatrixXd x(rows, full_cols);
  Eigen::Index col = 0;
  if (options.intercept) x.col(col++).setOnes();
  append_lags(x, col, series.values.col(ei), own_lags, max_lag);
  for (auto g : gi) append_lags(x, col, series.values.col(g), own_lags, max_lag);
  append_lags(x, col, series.values.col(ci), cause_lags, max_lag);
  const Eigen::VectorXd y = series.values.col(ei).tail(rows);

  const auto unrestricted = stats::ols(x, y);
  const auto restricted = stats::ols(x.leftCols(restricted_cols), y);

  TestResult result;
  result.df_num = cause_lags;
  result.df_den = static_cast<double>(rows - full_cols);
  const double gain = std::max(restricted.rss - unrestricted.rss, 0.0);
  result.statistic = unrestricted.rss > 0.0
                         ? (gain / result.df_num) / (unrestricted.rss / result.df_den)
                         : std::numeric_limits<double>::infinity();
  result.p_value = stats::f_survival(result.statistic, result.df_num, result.df_den);
  return result;
}

TestResult granger_test(const ScoreSeries& series, const std::string& cause,
                        const std::string& effect, int own_lags, int cause_lags,
                        const GrangerOptions& options) {
  return partial_granger(series, cause, effect, {}, own_lags, cause_lags, options);
}

ScoreSeries prewhiten(const ScoreSeries& series, const std::vector<int>& orders) {
  if (static_cast<Eigen::Index>(orders.size()) != series.dimension())
    fail(ErrorCode::InvalidArgument, "need one prewhitening order per column");
  const int max_order = *std::max_element(orders.begin(), orders.end());
  const auto rows = series.length() - max_order;
  ScoreSeries out{Eigen::MatrixXd(rows, series.dimension()), series.labels,
                  series.origin + " prewhitened"};
  for (Eigen::Index j = 0; j < series.dimension(); ++j) {
    const auto column = single_column(series, j);
    const auto model = fit_var(column, orders[static_cast<std::size_t>(j)]);
    out.values.col(j) = residuals(model, column).col(0).tail(rows);
  }
  return out;
}

CausalityReport causality_matrix(const ScoreSeries& series, const LagSelector& selector,
                                 double alpha, const GrangerOptions& options) {
  const auto q = series.dimension();
  if (q < 2) fail(ErrorCode::InvalidArgument, "causality needs at least two series");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");

  CausalityReport report;
  report.labels = series.labels;
  report.alpha = alpha;
  report.cause_lags = selector.cause_lags;
  report.own_lags = selector.own_lags;
  report.p_values = Eigen::MatrixXd::Constant(q, q, std::numeric_limits<double>::quiet_NaN());
  report.decisions = BoolMatrix::Constant(q, q, false);

  const ScoreSeries* tested = &series;
  ScoreSeries whitened;
  std::vector<int> own(static_cast<std::size_t>(q), selector.own_lags);
  if (selector.mode != LagSelector::Mode::Fixed) {
    for (Eigen::Index j = 0; j < q; ++j)
      report.prewhitening_orders.push_back(univariate_aic_order(series, j, selector.max_order));
  }
  if (selector.mode == LagSelector::Mode::Residual) {
    whitened = prewhiten(series, report.prewhitening_orders);
    tested = &whitened;
  } else if (selector.mode == LagSelector::Mode::Aic) {
    own = report.prewhitening_orders;
  }

  for (Eigen::Index e = 0; e < q; ++e) {
    for (Eigen::Index c = 0; c < q; ++c) {
      if (e == c) continue;
      const auto result =
          granger_test(*tested, series.labels[static_cast<std::size_t>(c)],
                       series.labels[static_cast<std::size_t>(e)],
                       own[static_cast<std::size_t>(e)], selector.cause_lags, options);
      report.p_values(e, c) = result.p_value;
      report.decisions(e, c) = result.p_value < alpha;
    }
  }
  return report;
}

std::string render_arrow_table(const CausalityReport& report) {
  std::size_t width = 6;
  for (const auto& l : report.labels) width = std::max(width, l.size() + 2);
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  std::ostringstream out;
  out << pad("");
  for (const auto& l : report.labels) out << pad(l);
  out << '\n';
  for (std::size_t e = 0; e < report.labels.size(); ++e) {
    out << pad(report.labels[e]);
    for (std::size_t c = 0; c < report.labels.size(); ++c) {
      const bool arrow = e != c && report.decisions(static_cast<Eigen::Index>(e),
                                                    static_cast<Eigen::Index>(c));
      out << pad(arrow ? "<-" : "");
    }
    out << '\n';
  }
  return out.str();
}

Eigen::VectorXd fit_ar(std::span<const double> x, int order) {
  if (order < 0) fail(ErrorCode::InvalidArgument, "AR order must be nonnegative");
  const auto n = static_cast<Eigen::Index>(x.size());
  if (order == 0) return {};
  if (n - order <= order) fail(ErrorCode::InsufficientData, "series too short for the AR order");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), n);
  Eigen::MatrixXd design(n - order, order);
  Eigen::Index col = 0;
  append_lags(design, col, v, order, order);
  return stats::ols(design, v.tail(n - order)).beta;
}

TransferFunctionModel fit_transfer_function(const std::string& output_label,
                                            std::span<const double> output,
                                            const std::vector<TransferInput>& inputs,
                                            int noise_ar_order) {
  const auto n = static_cast<Eigen::Index>(output.size());
  if (noise_ar_order < 0) fail(ErrorCode::InvalidArgument, "noise AR order must be nonnegative");
  int max_lag = 0;
  Eigen::Index regressors = 1;
  for (const auto& in : inputs) {
    if (static_cast<Eigen::Index>(in.values.size()) != n)
      fail(ErrorCode::InvalidArgument, "input " + in.label + " differs in length from the output");
    if (in.lags.empty()) fail(ErrorCode::InvalidArgument, "input " + in.label + " has no lags");
    for (int l : in.lags) {
      if (l < 0) fail(ErrorCode::InvalidArgument, "input lags must be nonnegative");
      max_lag = std::max(max_lag, l);
    }
    regressors += static_cast<Eigen::Index>(in.lags.size());
  }
  const auto rows = n - max_lag;
  if (5 * (regressors + noise_ar_order) >= rows)
    fail(ErrorCode::InsufficientData, "transfer function model has too many parameters");

  // Design over t = max_lag..n-1: intercept, then each input at each lag.
  Eigen::MatrixXd x(rows, regressors);
  x.col(0).setOnes();
  Eigen::Index col = 1;
  for (const auto& in : inputs) {
    const Eigen::Map<const Eigen::VectorXd> v(in.values.data(), n);
    for (int l : in.lags) x.col(col++) = v.segment(max_lag - l, rows);
  }
  const Eigen::Map<const Eigen::VectorXd> y_all(output.data(), n);
  const Eigen::VectorXd y = y_all.tail(rows);

  auto fit = stats::ols(x, y);
  Eigen::VectorXd beta = fit.beta;
  Eigen::VectorXd ar;
  int iterations = 0;
  const int m = noise_ar_order;
  if (m > 0) {
    auto noise_fit = [&](const Eigen::VectorXd& b) {
      const Eigen::VectorXd u = y - x * b;
      return fit_ar(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), m);
    };
    ar = noise_fit(beta);
    for (iterations = 1; iterations <= 50; ++iterations) {
      // Cochrane-Orcutt: filter both sides with the current noise polynomial.
      const auto frows = rows - m;
      Eigen::VectorXd ys = y.tail(frows);
      Eigen::MatrixXd xs = x.bottomRows(frows);
      for (int k = 1; k <= m; ++k) {
        ys -= ar(k - 1) * y.segment(m - k, frows);
        xs -= ar(k - 1) * x.middleRows(m - k, frows);
      }
      fit = stats::ols(xs, ys);
      const Eigen::VectorXd next_ar = noise_fit(fit.beta);
      const double change = std::max((fit.beta - beta).cwiseAbs().maxCoeff(),
                                     (next_ar - ar).cwiseAbs().maxCoeff());
      beta = fit.beta;
      ar = next_ar;
      if (change < 1e-8) break;
    }
    iterations = std::min(iterations, 50);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    companion.row(0) = ar.transpose();
    if (m > 1) companion.block(1, 0, m - 1, m - 1).setIdentity();
    if (stats::spectral_radius(companion) >= 1.0)
      fail(ErrorCode::NonStationaryNoise, "estimated noise AR polynomial is not stationary");
  }

  TransferFunctionModel model;
  model.output_label = output_label;
  for (const auto& in : inputs) {
    model.input_labels.push_back(in.label);
    model.input_lags.push_back(in.lags);
  }
  model.intercept = beta(0);
  model.input_coefficients.assign(beta.data() + 1, beta.data() + beta.size());
  model.input_std_errors.assign(fit.std_errors.data() + 1,
                                fit.std_errors.data() + fit.std_errors.size());
  model.noise_ar_order = m;
  if (m > 0) model.noise_ar_coefficients.assign(ar.data(), ar.data() + ar.size());
  model.residual_variance = fit.rss / static_cast<double>(fit.dof);
  model.iterations = iterations;
  return model;
}

}  // namespace vfts
