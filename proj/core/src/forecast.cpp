#include "vfts/forecast.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "vfts/error.hpp"

namespace vfts {

namespace {

struct ScoreBlock {
  std::size_t model = 0;  // index into bundle.pca
  std::size_t block = 0;  // block inside that model
  Eigen::Index column = 0;  // first score column fed by this process
  int count = 0;            // number of score columns
};

// Where process h lives: which model/block holds its eigenfunctions and which
// score columns multiply them.
ScoreBlock locate(const ForecastBundle& bundle, std::size_t h) {
  if (h >= bundle.processes.size()) fail(ErrorCode::InvalidArgument, "process index out of range");
  if (bundle.approach == Approach::Multivariate) return {0, h, 0, bundle.q.front()};
  Eigen::Index column = 0;
  for (std::size_t j = 0; j < h; ++j) column += bundle.q[j];
  return {h, 0, column, bundle.q[h]};
}

// G x q values of the retained eigenfunctions of process h, placed in the
// columns of the score vector they multiply.
Eigen::MatrixXd eigen_on_grid(const ForecastBundle& bundle, std::size_t h,
                              std::span<const double> grid) {
  const auto loc = locate(bundle, h);
  const auto& model = bundle.pca[loc.model];
  const auto& block = model.blocks[loc.block];
  const Eigen::MatrixXd design = design_matrix(block.basis, grid);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(design.rows(), bundle.score_dimension());
  out.middleCols(loc.column, loc.count) =
      design * model.eigenfunctions.block(block.offset, 0, block.basis.dimension, loc.count);
  return out;
}

std::string score_prefix(const std::vector<std::string>& processes, std::size_t h) {
  const auto& label = processes[h];
  const char initial = label.empty() ? 'X' : static_cast<char>(std::toupper(
                                                 static_cast<unsigned char>(label.front())));
  for (std::size_t j = 0; j < processes.size(); ++j) {
    if (j != h && !processes[j].empty() &&
        std::toupper(static_cast<unsigned char>(processes[j].front())) == initial)
      return label + "_PC";
  }
  return std::string(1, initial) + "PC";
}

void check_alignment(const ForecastBundle& bundle, std::span<const FunctionalSample> samples) {
  if (samples.size() != bundle.processes.size())
    fail(ErrorCode::CycleMisalignment, "expected one sample per process");
  for (std::size_t h = 0; h < samples.size(); ++h) {
    if (samples[h].process != bundle.processes[h])
      fail(ErrorCode::LabelMismatch, "process order differs from the bundle");
    if (samples[h].cycle_indices != samples.front().cycle_indices)
      fail(ErrorCode::CycleMisalignment, "test samples do not cover the same cycles");
  }
}

ProcessForecast make_process_forecast(const ForecastBundle& bundle, std::size_t h,
                                      const Eigen::MatrixXd& predicted_scores,
                                      std::span<const double> grid) {
  ProcessForecast pf;
  pf.label = bundle.processes[h];
  pf.predicted = curves_from_scores(bundle, h, predicted_scores, grid);
  const Eigen::MatrixXd e = eigen_on_grid(bundle, h, grid);
  pf.variance_band = (e * bundle.var.sigma).cwiseProduct(e).rowwise().sum();
  return pf;
}

void score_against(ProcessForecast& pf, const FunctionalSample& observed,
                   std::span<const double> grid) {
  pf.cycle_indices = observed.cycle_indices;
  pf.actual = evaluate_curves(observed.basis, observed.coefficients, grid);
  pf.imse.clear();
  for (Eigen::Index i = 0; i < pf.predicted.rows(); ++i) {
    const Eigen::VectorXd p = pf.predicted.row(i).transpose();
    const Eigen::VectorXd a = pf.actual.row(i).transpose();
    pf.imse.push_back(imse(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                           std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                           grid));
  }
}

}  // namespace

std::string_view to_string(Approach approach) noexcept {
  return approach == Approach::Univariate ? "univariate" : "multivariate";
}

std::optional<Approach> parse_approach(std::string_view text) {
  if (text == "univariate" || text == "fpca-var") return Approach::Univariate;
  if (text == "multivariate" || text == "mfpca-var") return Approach::Multivariate;
  return std::nullopt;
}

std::string_view to_string(ForecastMode mode) noexcept {
  return mode == ForecastMode::OneStep ? "one_step" : "iterated";
}

std::optional<ForecastMode> parse_forecast_mode(std::string_view text) {
  if (text == "one_step" || text == "one-step") return ForecastMode::OneStep;
  if (text == "iterated") return ForecastMode::Iterated;
  return std::nullopt;
}

TrainTestSplit split_train_test(std::span<const FunctionalSample> samples, std::size_t holdout) {
  if (samples.empty()) fail(ErrorCode::InvalidArgument, "no samples to split");
  const auto n = samples.front().size();
  for (const auto& s : samples)
    if (s.cycle_indices != samples.front().cycle_indices)
      fail(ErrorCode::CycleMisalignment, "samples do not cover the same cycles");
  if (holdout >= n) fail(ErrorCode::HoldoutTooLarge, "holdout leaves no training cycles");
  const auto n_train = static_cast<Eigen::Index>(n - holdout);
  const auto n_test = static_cast<Eigen::Index>(holdout);
  TrainTestSplit split;
  for (const auto& s : samples) {
    FunctionalSample train{s.basis, s.coefficients.topRows(n_train),
                           {s.cycle_indices.begin(), s.cycle_indices.begin() + n_train}, s.process};
    FunctionalSample test{s.basis, s.coefficients.bottomRows(n_test),
                          {s.cycle_indices.begin() + n_train, s.cycle_indices.end()}, s.process};
    split.train.push_back(std::move(train));
    split.test.push_back(std::move(test));
  }
  return split;
}

ForecastBundle fit_pipeline(std::span<const FunctionalSample> train, Approach approach,
                            const FitConfig& config) {
  if (train.empty()) fail(ErrorCode::InvalidArgument, "no training samples");
  stack_coefficients(train);  // alignment check
  ForecastBundle bundle;
  bundle.approach = approach;
  for (const auto& s : train) bundle.processes.push_back(s.process);
  const auto n = static_cast<Eigen::Index>(train.front().size());
  if (n < 2) fail(ErrorCode::InsufficientData, "need at least two training cycles");
  bundle.train_first = train.front().cycle_indices.front();
  bundle.train_last = train.front().cycle_indices.back();

  std::vector<Eigen::MatrixXd> blocks;
  if (approach == Approach::Univariate) {
    std::string origin = "univariate FPCA, q = (";
    for (std::size_t h = 0; h < train.size(); ++h) {
      auto model = fpca_univariate(train[h]);
      const int q = choose_q(model.eigenvalues, config.variance_threshold);
      const auto prefix = score_prefix(bundle.processes, h);
      for (int j = 0; j < q; ++j) bundle.scores.labels.push_back(prefix + std::to_string(j + 1));
      blocks.push_back(model.scores.leftCols(q));
      bundle.q.push_back(q);
      bundle.pca.push_back(std::move(model));
      origin += (h ? ", " : "") + std::to_string(q);
    }
    bundle.scores.origin = origin + ")";
  } else {
    auto model = fpca_multivariate(train);
    const int q = choose_q(model.eigenvalues, config.variance_threshold);
    for (int j = 0; j < q; ++j) bundle.scores.labels.push_back("MPC" + std::to_string(j + 1));
    blocks.push_back(model.scores.leftCols(q));
    bundle.q.push_back(q);
    bundle.pca.push_back(std::move(model));
    bundle.scores.origin = "multivariate FPCA, q = " + std::to_string(q);
  }
  Eigen::Index width = 0;
  for (const auto& b : blocks) width += b.cols();
  bundle.scores.values.resize(n, width);
  Eigen::Index col = 0;
  for (const auto& b : blocks) {
    bundle.scores.values.middleCols(col, b.cols()) = b;
    col += b.cols();
  }

  int order = 0;
  if (config.fixed_order) {
    order = *config.fixed_order;
    bundle.max_order_used = order;
  } else {
    bundle.max_order_used = std::min(config.max_order, max_feasible_order(n, width));
    order = select_order_aic(bundle.scores, bundle.max_order_used);
  }
  bundle.var = fit_var(bundle.scores, order);
  if (config.prune) bundle.var = prune_coefficients(bundle.scores, bundle.var, config.prune_threshold);
  return bundle;
}

Eigen::MatrixXd project_scores(const ForecastBundle& bundle,
                               std::span<const FunctionalSample> samples) {
  check_alignment(bundle, samples);
  const auto rows = static_cast<Eigen::Index>(samples.front().size());
  Eigen::MatrixXd out(rows, bundle.score_dimension());
  if (bundle.approach == Approach::Multivariate) {
    const auto full = project(bundle.pca.front(), stack_coefficients(samples));
    out = full.leftCols(bundle.q.front());
  } else {
    Eigen::Index col = 0;
    for (std::size_t h = 0; h < samples.size(); ++h) {
      const auto full = project(bundle.pca[h], samples[h].coefficients);
      out.middleCols(col, bundle.q[h]) = full.leftCols(bundle.q[h]);
      col += bundle.q[h];
    }
  }
  return out;
}

Eigen::MatrixXd eigen_matrix(const ForecastBundle& bundle, double t) {
  const auto processes = bundle.processes.size();
  Eigen::MatrixXd f(static_cast<Eigen::Index>(processes), bundle.score_dimension());
  const double point[1] = {t};
  for (std::size_t h = 0; h < processes; ++h)
    f.row(static_cast<Eigen::Index>(h)) = eigen_on_grid(bundle, h, point).row(0);
  return f;
}

Eigen::VectorXd mean_vector(const ForecastBundle& bundle, double t) {
  Eigen::VectorXd mu(static_cast<Eigen::Index>(bundle.processes.size()));
  const double point[1] = {t};
  for (std::size_t h = 0; h < bundle.processes.size(); ++h) {
    const auto loc = locate(bundle, h);
    mu(static_cast<Eigen::Index>(h)) = mean_values(bundle.pca[loc.model], loc.block, point)(0);
  }
  return mu;
}

Eigen::MatrixXd curves_from_scores(const ForecastBundle& bundle, std::size_t process,
                                   const Eigen::MatrixXd& scores, std::span<const double> grid) {
  if (scores.cols() != bundle.score_dimension())
    fail(ErrorCode::InvalidArgument, "score width differs from the bundle");
  const auto loc = locate(bundle, process);
  const Eigen::VectorXd mu = mean_values(bundle.pca[loc.model], loc.block, grid);
  Eigen::MatrixXd curves = scores * eigen_on_grid(bundle, process, grid).transpose();
  curves.rowwise() += mu.transpose();
  return curves;
}

ForecastResult forecast_curves(const ForecastBundle& bundle, int horizon,
                               std::span<const double> grid) {
  const Eigen::MatrixXd predicted = predict_var(bundle.var, bundle.scores.values, horizon);
  ForecastResult result;
  result.mode = std::string(to_string(ForecastMode::Iterated));
  result.grid.assign(grid.begin(), grid.end());
  for (std::size_t h = 0; h < bundle.processes.size(); ++h)
    result.processes.push_back(make_process_forecast(bundle, h, predicted, grid));
  return result;
}

ForecastResult forecast_test(const ForecastBundle& bundle, std::span<const FunctionalSample> test,
                             std::span<const double> grid, ForecastMode mode) {
  check_alignment(bundle, test);
  const auto n_test = static_cast<Eigen::Index>(test.front().size());
  ForecastResult result;
  result.mode = std::string(to_string(mode));
  result.grid.assign(grid.begin(), grid.end());
  if (n_test == 0) {
    for (std::size_t h = 0; h < bundle.processes.size(); ++h)
      result.processes.push_back(ProcessForecast{bundle.processes[h], {}, {}, {}, {}, {}});
    return result;
  }

  Eigen::MatrixXd predicted(n_test, bundle.score_dimension());
  if (mode == ForecastMode::Iterated) {
    predicted = predict_var(bundle.var, bundle.scores.values, static_cast<int>(n_test));
  } else {
    const Eigen::MatrixXd observed = project_scores(bundle, test);
    const auto n_train = bundle.scores.length();
    Eigen::MatrixXd history(n_train + n_test, bundle.score_dimension());
    history << bundle.scores.values, observed;
    for (Eigen::Index i = 0; i < n_test; ++i)
      predicted.row(i) = predict_var(bundle.var, history.topRows(n_train + i), 1).row(0);
  }
  for (std::size_t h = 0; h < bundle.processes.size(); ++h) {
    auto pf = make_process_forecast(bundle, h, predicted, grid);
    score_against(pf, test[h], grid);
    result.processes.push_back(std::move(pf));
  }
  return result;
}

ForecastResult mean_baseline(const ForecastBundle& bundle, std::span<const FunctionalSample> test,
                             std::span<const double> grid) {
  check_alignment(bundle, test);
  const auto n_test = static_cast<Eigen::Index>(test.front().size());
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(n_test, bundle.score_dimension());
  ForecastResult result;
  result.mode = "mean";
  result.grid.assign(grid.begin(), grid.end());
  for (std::size_t h = 0; h < bundle.processes.size(); ++h) {
    auto pf = make_process_forecast(bundle, h, zeros, grid);
    score_against(pf, test[h], grid);
    result.processes.push_back(std::move(pf));
  }
  return result;
}

double imse(std::span<const double> predicted, std::span<const double> actual,
            std::span<const double> grid) {
  if (predicted.size() != actual.size() || predicted.size() != grid.size())
    fail(ErrorCode::GridMismatch, "predicted, actual and grid lengths differ");
  if (grid.size() < 2) fail(ErrorCode::GridMismatch, "grid needs at least two points");
  double total = 0.0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double d0 = predicted[g - 1] - actual[g - 1];
    const double d1 = predicted[g] - actual[g];
    total += 0.5 * (grid[g] - grid[g - 1]) * (d0 * d0 + d1 * d1);
  }
  return total;
}

Eigen::MatrixXd evaluate_operator_kernel(const ForecastBundle& bundle, int lag, double t,
                                         double s) {
  if (lag < 1 || lag > bundle.var.order)
    fail(ErrorCode::LagOutOfRange, "lag outside 1..p");
  return eigen_matrix(bundle, t) * bundle.var.omega[static_cast<std::size_t>(lag - 1)] *
         eigen_matrix(bundle, s).transpose();
}

double median_imse(const ForecastResult& result) {
  std::vector<double> all;
  for (const auto& p : result.processes) all.insert(all.end(), p.imse.begin(), p.imse.end());
  if (all.empty()) fail(ErrorCode::InvalidArgument, "no IMSE values");
  std::sort(all.begin(), all.end());
  const auto mid = all.size() / 2;
  return all.size() % 2 ? all[mid] : 0.5 * (all[mid - 1] + all[mid]);
}

}  // namespace vfts
