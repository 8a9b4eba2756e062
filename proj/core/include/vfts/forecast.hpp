#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vfts/basis.hpp"
#include "vfts/fpca.hpp"
#include "vfts/var.hpp"

namespace vfts {

/// FPCA-VAR (per-process FPCA, stacked scores) or MFPCA-VAR (joint scores).
enum class Approach { Univariate, Multivariate };

std::string_view to_string(Approach approach) noexcept;
std::optional<Approach> parse_approach(std::string_view text);

struct TrainTestSplit {
  std::vector<FunctionalSample> train;
  std::vector<FunctionalSample> test;
};

/// The last `holdout` cycles of every process form the test set.
TrainTestSplit split_train_test(std::span<const FunctionalSample> samples, std::size_t holdout);

struct FitConfig {
  double variance_threshold = 0.95;
  int max_order = 10;
  double prune_threshold = 1.96;
  bool prune = true;
  std::optional<int> fixed_order;  // skips AIC selection when set
};

struct ForecastBundle {
  Approach approach = Approach::Univariate;
  std::vector<std::string> processes;
  std::vector<PcaModel> pca;  // one per process (Univariate) or one joint
  std::vector<int> q;         // per process (Univariate) or a single entry
  ScoreSeries scores;         // training scores fed to the VAR
  VarModel var;
  int max_order_used = 0;     // p_max after clamping to what the data supports
  std::size_t train_first = 0;
  std::size_t train_last = 0;

  [[nodiscard]] Eigen::Index score_dimension() const noexcept { return scores.dimension(); }
};

/// FPCA per the approach, component selection by the variance threshold,
/// AIC order selection, VAR fit and t-threshold pruning.
ForecastBundle fit_pipeline(std::span<const FunctionalSample> train, Approach approach,
                            const FitConfig& config = {});

/// Scores of curves (aligned per process) on the bundle's retained eigenbasis.
Eigen::MatrixXd project_scores(const ForecastBundle& bundle,
                               std::span<const FunctionalSample> samples);

/// H x q matrix F(t) of retained eigenfunction values laid out against the
/// score vector.
Eigen::MatrixXd eigen_matrix(const ForecastBundle& bundle, double t);

/// Mean function of every process at t.
Eigen::VectorXd mean_vector(const ForecastBundle& bundle, double t);

/// Curves (rows) of process h for score rows, on a grid: mu_h + F_h xi.
Eigen::MatrixXd curves_from_scores(const ForecastBundle& bundle, std::size_t process,
                                   const Eigen::MatrixXd& scores, std::span<const double> grid);

enum class ForecastMode { OneStep, Iterated };

std::string_view to_string(ForecastMode mode) noexcept;
std::optional<ForecastMode> parse_forecast_mode(std::string_view text);

struct ProcessForecast {
  std::string label;
  std::vector<std::size_t> cycle_indices;
  Eigen::MatrixXd predicted;  // horizon x grid
  Eigen::MatrixXd actual;     // empty when no observed curves were given
  std::vector<double> imse;
  Eigen::VectorXd variance_band;  // diag F_h(t) Sigma F_h(t)', one-step
};

struct ForecastResult {
  std::string mode;
  std::vector<double> grid;
  std::vector<ProcessForecast> processes;
};

/// Iterated forecasts `horizon` steps past the end of training.
ForecastResult forecast_curves(const ForecastBundle& bundle, int horizon,
                               std::span<const double> grid);

/// Forecasts of the observed test cycles, scored by IMSE. OneStep feeds the
/// projected scores of earlier test cycles back into the history; Iterated
/// forecasts every test cycle from the end of training.
ForecastResult forecast_test(const ForecastBundle& bundle, std::span<const FunctionalSample> test,
                             std::span<const double> grid, ForecastMode mode = ForecastMode::OneStep);

/// Mean-function predictor for the test cycles (the no-dynamics baseline).
ForecastResult mean_baseline(const ForecastBundle& bundle, std::span<const FunctionalSample> test,
                             std::span<const double> grid);

/// Trapezoidal integral of (predicted - actual)^2 over the grid.
double imse(std::span<const double> predicted, std::span<const double> actual,
            std::span<const double> grid);

/// phi_k(t, s) = F(t) Omega_k F(s)', an H x H matrix.
Eigen::MatrixXd evaluate_operator_kernel(const ForecastBundle& bundle, int lag, double t, double s);

/// Median of all (cycle, process) IMSE values in a result.
double median_imse(const ForecastResult& result);

}  // namespace vfts
