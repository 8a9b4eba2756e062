#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vfts/var.hpp"

namespace vfts {

struct TestResult {
  double statistic = 0.0;  // F form
  double p_value = 1.0;
  double df_num = 0.0;
  double df_den = 0.0;

  /// Chi-square form of the same Wald test, df_num * F.
  [[nodiscard]] double wald() const noexcept { return df_num * statistic; }
};

struct GrangerOptions {
  bool intercept = true;
};

/// F test that r lags of `cause` add nothing to p own lags of `effect`.
TestResult granger_test(const ScoreSeries& series, const std::string& cause,
                        const std::string& effect, int own_lags, int cause_lags,
                        const GrangerOptions& options = {});

/// Same test with p lags of every conditioning variable added to both the
/// restricted and unrestricted regressions.
TestResult partial_granger(const ScoreSeries& series, const std::string& cause,
                           const std::string& effect, const std::vector<std::string>& given,
                           int own_lags, int cause_lags, const GrangerOptions& options = {});

/// How causality_matrix picks the lags of each pairwise test.
struct LagSelector {
  enum class Mode {
    Fixed,     // (own_lags, cause_lags) on the raw series
    Aic,       // own_lags chosen per effect by univariate AR AIC up to max_order
    Residual,  // prewhiten each column by an AIC-selected AR, then test residuals
  };
  Mode mode = Mode::Residual;
  int own_lags = 1;
  int cause_lags = 1;
  int max_order = 5;

  static LagSelector fixed(int own, int cause) { return {Mode::Fixed, own, cause, 0}; }
  static LagSelector aic(int max_order, int cause) { return {Mode::Aic, 0, cause, max_order}; }
  static LagSelector residual(int max_order, int cause, int own = 0) {
    return {Mode::Residual, own, cause, max_order};
  }
};

struct CausalityReport {
  std::vector<std::string> labels;
  Eigen::MatrixXd p_values;   // (effect, cause); diagonal NaN
  BoolMatrix decisions;       // (effect, cause) significant at alpha
  int own_lags = 0;
  int cause_lags = 0;
  std::vector<int> prewhitening_orders;  // per column, Residual and Aic modes
  double alpha = 0.05;

  [[nodiscard]] int arrow_count() const;
};

CausalityReport causality_matrix(const ScoreSeries& series, const LagSelector& selector = {},
                                 double alpha = 0.05, const GrangerOptions& options = {});

/// Arrow table: rows are effects, a left arrow marks each significant cause.
std::string render_arrow_table(const CausalityReport& report);

/// AR(order) residuals of each column (own-history prewhitening), aligned on
/// the rows max(order)..n-1.
ScoreSeries prewhiten(const ScoreSeries& series, const std::vector<int>& orders);

struct TransferInput {
  std::string label;
  std::vector<double> values;
  std::vector<int> lags;  // input enters as sum_l beta_l x_{t-l}
};

struct TransferFunctionModel {
  std::string output_label;
  std::vector<std::string> input_labels;
  std::vector<std::vector<int>> input_lags;
  std::vector<double> input_coefficients;  // flattened in input/lag order
  std::vector<double> input_std_errors;
  int noise_ar_order = 0;
  std::vector<double> noise_ar_coefficients;  // n_t = sum_k a_k n_{t-k} + e_t
  double intercept = 0.0;
  double residual_variance = 0.0;
  int iterations = 0;
};

/// Distributed-lag regression with AR noise, estimated by OLS followed by
/// iterated Cochrane-Orcutt GLS.
TransferFunctionModel fit_transfer_function(const std::string& output_label,
                                            std::span<const double> output,
                                            const std::vector<TransferInput>& inputs,
                                            int noise_ar_order);

/// Univariate AR(order) fit by OLS without intercept; returns the coefficients.
Eigen::VectorXd fit_ar(std::span<const double> x, int order);

}  // namespace vfts
