#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "vfts/forecast.hpp"

using namespace vfts;
using namespace vfts::testing;

namespace {

/// Curves mean + sum_j scores(i, offset + j) f_{first + j}, one sample per
/// entry of `dims`.
std::vector<FunctionalSample> samples_from_scores(const Eigen::MatrixXd& scores,
                                                  const std::vector<int>& dims,
                                                  const BasisSpec& basis) {
  std::vector<FunctionalSample> out;
  const char* names[] = {"reset", "set", "third"};
  Eigen::Index offset = 0;
  for (std::size_t h = 0; h < dims.size(); ++h) {
    FunctionalSample s;
    s.basis = basis;
    s.process = names[h];
    const Eigen::VectorXd mean = Eigen::VectorXd::Constant(basis.dimension, -2.0 - static_cast<double>(h)) +
                                 0.3 * fourier_coefficients(basis, 1);
    s.coefficients = mean.transpose().replicate(scores.rows(), 1);
    for (int j = 0; j < dims[h]; ++j)
      s.coefficients += scores.col(offset + j) * fourier_coefficients(basis, 1 + j + 2 * static_cast<int>(h)).transpose();
    for (Eigen::Index i = 0; i < scores.rows(); ++i) s.cycle_indices.push_back(static_cast<std::size_t>(i) + 1);
    offset += dims[h];
    out.push_back(std::move(s));
  }
  return out;
}

Eigen::MatrixXd persistent_scores(Eigen::Index n, Eigen::Index q, std::uint64_t seed) {
  Eigen::MatrixXd o = 0.6 * Eigen::MatrixXd::Identity(q, q);
  for (Eigen::Index j = 0; j + 1 < q; ++j) o(j + 1, j) = 0.2;
  Eigen::MatrixXd x = simulate_var({o}, n, seed);
  for (Eigen::Index j = 0; j < q; ++j) x.col(j) *= std::pow(0.6, static_cast<double>(j));
  return x;
}

}  // namespace

TEST(SplitTrainTest, LastCyclesHeldOut) {
  const auto samples = samples_from_scores(persistent_scores(100, 3, 1), {2, 1}, make_basis(8));
  const auto split = split_train_test(samples, 10);
  ASSERT_EQ(split.train.size(), 2u);
  for (std::size_t h = 0; h < 2; ++h) {
    EXPECT_EQ(split.train[h].size(), 90u);
    EXPECT_EQ(split.test[h].size(), 10u);
    EXPECT_EQ(split.test[h].cycle_indices.front(), 91u);
    EXPECT_EQ(split.test[h].coefficients.row(0), samples[h].coefficients.row(90));
  }
  const auto none = split_train_test(samples, 0);
  EXPECT_EQ(none.train[0].size(), 100u);
  EXPECT_EQ(none.test[0].size(), 0u);
  EXPECT_EQ(code_of([&] { split_train_test(samples, 100); }), ErrorCode::HoldoutTooLarge);
}

TEST(Imse, Quadrature) {
  const auto grid = uniform_grid(201);
  std::vector<double> zero(201, 0.0), one(201, 1.0), t = grid;
  EXPECT_EQ(imse(zero, zero, grid), 0.0);
  EXPECT_NEAR(imse(one, zero, grid), 1.0, 1e-14);
  EXPECT_NEAR(imse(t, zero, grid), 1.0 / 3.0, 1e-4);
  std::vector<double> short_v(10, 0.0);
  EXPECT_EQ(code_of([&] { imse(short_v, zero, grid); }), ErrorCode::GridMismatch);
}

TEST(FitPipeline, DesignedComponentCounts) {
  Eigen::MatrixXd scores = persistent_scores(300, 5, 2);
  scores.col(0) *= 2.0;
  const auto samples = samples_from_scores(scores, {2, 3}, make_basis(12));
  const auto b = fit_pipeline(samples, Approach::Univariate);
  ASSERT_EQ(b.q.size(), 2u);
  EXPECT_EQ(b.q[0], 2);
  EXPECT_EQ(b.q[1], 3);
  EXPECT_EQ(b.score_dimension(), 5);
  EXPECT_EQ(b.scores.labels[0], "RPC1");
  EXPECT_EQ(b.scores.labels[2], "SPC1");
  EXPECT_EQ(b.var.dimension(), 5);
  const auto m = fit_pipeline(samples, Approach::Multivariate);
  ASSERT_EQ(m.q.size(), 1u);
  EXPECT_EQ(m.scores.labels[0], "MPC1");
  EXPECT_EQ(m.var.dimension(), m.q[0]);
}

TEST(FitPipeline, HighThresholdOnNoise) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  FunctionalSample s;
  s.basis = make_basis(8);
  s.process = "reset";
  s.coefficients.resize(200, 8);
  for (Eigen::Index i = 0; i < 200; ++i) {
    for (Eigen::Index k = 0; k < 8; ++k) s.coefficients(i, k) = z(rng);
    s.cycle_indices.push_back(static_cast<std::size_t>(i));
  }
  FitConfig config;
  config.variance_threshold = 0.999;
  config.max_order = 3;
  const FunctionalSample one[] = {s};
  const auto b = fit_pipeline(one, Approach::Univariate, config);
  EXPECT_GE(b.q[0], 7);
  EXPECT_LE(b.q[0], 8);
}

TEST(FitPipeline, SingleProcessApproachesAgree) {
  const auto samples = samples_from_scores(persistent_scores(120, 3, 4), {3}, make_basis(10));
  const auto split = split_train_test(samples, 10);
  const auto u = fit_pipeline(split.train, Approach::Univariate);
  const auto m = fit_pipeline(split.train, Approach::Multivariate);
  ASSERT_EQ(u.var.order, m.var.order);
  EXPECT_LT((u.scores.values - m.scores.values).cwiseAbs().maxCoeff(), 1e-8);
  for (int k = 0; k < u.var.order; ++k)
    EXPECT_LT((u.var.omega[static_cast<std::size_t>(k)] - m.var.omega[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff(), 1e-8);
  const auto grid = uniform_grid(201);
  const auto fu = forecast_test(u, split.test, grid);
  const auto fm = forecast_test(m, split.test, grid);
  EXPECT_LT((fu.processes[0].predicted - fm.processes[0].predicted).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ForecastCurves, ZeroScoresGiveMean) {
  const auto samples = samples_from_scores(persistent_scores(80, 3, 5), {2, 1}, make_basis(8));
  auto b = fit_pipeline(samples, Approach::Univariate, {0.95, 3, 1.96, true, 1});
  for (auto& o : b.var.omega) o.setZero();
  const auto grid = uniform_grid(51);
  const auto r = forecast_curves(b, 3, grid);
  ASSERT_EQ(r.processes.size(), 2u);
  for (std::size_t h = 0; h < 2; ++h) {
    const auto mu = mean_values(b.pca[h], 0, grid);
    for (Eigen::Index i = 0; i < 3; ++i)
      EXPECT_LT((r.processes[h].predicted.row(i).transpose() - mu).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(r.mode, "iterated");
}

TEST(ForecastCurves, HorizonOneIsHandComposition) {
  const auto samples = samples_from_scores(persistent_scores(150, 2, 6), {2}, make_basis(4));
  const auto b = fit_pipeline(samples, Approach::Univariate, {0.95, 3, 1.96, false, 1});
  ASSERT_EQ(b.q[0], 2);
  const Eigen::MatrixXd xi = predict_var(b.var, b.scores.values, 1);
  const double grid[] = {0.0, 0.25, 0.6, 1.0};
  const auto r = forecast_curves(b, 1, grid);
  for (int g = 0; g < 4; ++g) {
    const Eigen::VectorXd v = eval_basis(b.pca[0].blocks[0].basis, grid[g]);
    const double by_hand = v.dot(b.pca[0].mean) + v.transpose() * b.pca[0].eigenfunctions.leftCols(2) * xi.row(0).transpose();
    EXPECT_NEAR(r.processes[0].predicted(0, g), by_hand, 1e-12);
    EXPECT_NEAR((mean_vector(b, grid[g]) + eigen_matrix(b, grid[g]) * xi.row(0).transpose())(0), by_hand, 1e-12);
  }
}

TEST(ForecastTest, NoiselessClosedLoop) {
  // Exact VAR(1): an ellipse traversed at a fixed angular step, 10 steps per turn.
  const double a = 2.0 * std::numbers::pi / 10.0;
  Eigen::MatrixXd scores(100, 2);
  for (Eigen::Index i = 0; i < 100; ++i) {
    scores(i, 0) = 2.0 * std::cos(a * static_cast<double>(i));
    scores(i, 1) = std::sin(a * static_cast<double>(i));
  }
  const auto samples = samples_from_scores(scores, {2}, make_basis(10));
  const auto split = split_train_test(samples, 10);
  FitConfig config;
  config.fixed_order = 1;
  config.prune = false;
  const auto b = fit_pipeline(split.train, Approach::Univariate, config);
  ASSERT_EQ(b.q[0], 2);
  const auto r = forecast_test(b, split.test, uniform_grid(201));
  for (double e : r.processes[0].imse) EXPECT_LT(e, 1e-6);
}

TEST(ForecastTest, ModesAndBaseline) {
  const auto samples = samples_from_scores(persistent_scores(200, 3, 7), {2, 1}, make_basis(8));
  const auto split = split_train_test(samples, 10);
  const auto b = fit_pipeline(split.train, Approach::Multivariate, {0.95, 4, 1.96, true, std::nullopt});
  const auto grid = uniform_grid(201);
  const auto one = forecast_test(b, split.test, grid, ForecastMode::OneStep);
  const auto it = forecast_test(b, split.test, grid, ForecastMode::Iterated);
  const auto base = mean_baseline(b, split.test, grid);
  EXPECT_EQ(one.mode, "one_step");
  EXPECT_EQ(it.mode, "iterated");
  EXPECT_EQ(base.mode, "mean");
  for (std::size_t h = 0; h < 2; ++h) {
    EXPECT_LT((one.processes[h].predicted.row(0) - it.processes[h].predicted.row(0)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(one.processes[h].imse.size(), 10u);
    EXPECT_EQ(one.processes[h].variance_band.size(), 201);
    EXPECT_GE(one.processes[h].variance_band.minCoeff(), 0.0);
    EXPECT_EQ(one.processes[h].cycle_indices.front(), 191u);
  }
  EXPECT_GT(median_imse(base), 0.0);
}

TEST(ProjectScores, TrainingCurvesReproduceScores) {
  const auto samples = samples_from_scores(persistent_scores(90, 3, 8), {2, 1}, make_basis(8));
  for (auto approach : {Approach::Univariate, Approach::Multivariate}) {
    const auto b = fit_pipeline(samples, approach, {0.95, 2, 1.96, true, std::nullopt});
    EXPECT_LT((project_scores(b, samples) - b.scores.values).cwiseAbs().maxCoeff(), 1e-10);
  }
  auto bad = samples;
  bad[1].cycle_indices[0] = 999;
  const auto b = fit_pipeline(samples, Approach::Univariate);
  EXPECT_EQ(code_of([&] { project_scores(b, bad); }), ErrorCode::CycleMisalignment);
}

TEST(OperatorKernel, IdentityGivesReproducingKernel) {
  const auto samples = samples_from_scores(persistent_scores(200, 3, 9), {3}, make_basis(10));
  auto b = fit_pipeline(samples, Approach::Univariate, {0.95, 2, 1.96, false, 1});
  const int q = b.q[0];
  b.var.omega[0] = Eigen::MatrixXd::Identity(q, q);
  const auto grid = uniform_grid(201);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(201, 1.0 / 200.0);
  w(0) = w(200) = 0.5 / 200.0;
  double total = 0.0;
  for (int i = 0; i < 201; ++i)
    for (int j = 0; j < 201; ++j) {
      const double k = evaluate_operator_kernel(b, 1, grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)])(0, 0);
      total += w(i) * w(j) * k * k;
    }
  EXPECT_NEAR(total, q, 1e-3);
  b.var.omega[0].setZero();
  EXPECT_EQ(evaluate_operator_kernel(b, 1, 0.3, 0.8).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(code_of([&] { evaluate_operator_kernel(b, 0, 0.1, 0.1); }), ErrorCode::LagOutOfRange);
  EXPECT_EQ(code_of([&] { evaluate_operator_kernel(b, 2, 0.1, 0.1); }), ErrorCode::LagOutOfRange);
}

TEST(OperatorKernel, QuadratureMatchesScoreMap) {
  const auto samples = samples_from_scores(persistent_scores(200, 3, 10), {2, 1}, make_basis(10));
  const auto b = fit_pipeline(samples, Approach::Univariate, {0.95, 2, 1.96, false, 1});
  const auto grid = uniform_grid(201);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(201, 1.0 / 200.0);
  w(0) = w(200) = 0.5 / 200.0;
  const std::size_t i = 17;
  Eigen::MatrixXd centered(2, 201);
  for (std::size_t h = 0; h < 2; ++h) {
    const auto c = evaluate_curves(samples[h].basis, samples[h].coefficients.row(static_cast<Eigen::Index>(i)), grid);
    centered.row(static_cast<Eigen::Index>(h)) = c.row(0) - mean_values(b.pca[h], 0, grid).transpose();
  }
  const Eigen::VectorXd xi = b.scores.values.row(static_cast<Eigen::Index>(i)).transpose();
  for (double t : {0.1, 0.5, 0.9}) {
    Eigen::VectorXd applied = Eigen::VectorXd::Zero(2);
    for (int g = 0; g < 201; ++g)
      applied += w(g) * evaluate_operator_kernel(b, 1, t, grid[static_cast<std::size_t>(g)]) * centered.col(g);
    const Eigen::VectorXd direct = eigen_matrix(b, t) * b.var.omega[0] * xi;
    EXPECT_LT((applied - direct).cwiseAbs().maxCoeff(), 1e-4) << t;
  }
}

TEST(PredictVar, Linearity) {
  const auto samples = samples_from_scores(persistent_scores(120, 3, 11), {3}, make_basis(8));
  const auto b = fit_pipeline(samples, Approach::Univariate, {0.95, 3, 1.96, true, std::nullopt});
  const Eigen::MatrixXd h1 = b.scores.values.topRows(20);
  const Eigen::MatrixXd h2 = b.scores.values.bottomRows(20);
  const auto sum = predict_var(b.var, h1 + h2, 5);
  const Eigen::MatrixXd parts = predict_var(b.var, h1, 5) + predict_var(b.var, h2, 5);
  EXPECT_LT((sum - parts).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ParseNames, ApproachAndMode) {
  EXPECT_EQ(parse_approach("univariate"), Approach::Univariate);
  EXPECT_EQ(parse_approach("mfpca-var"), Approach::Multivariate);
  EXPECT_FALSE(parse_approach("both").has_value());
  EXPECT_EQ(parse_forecast_mode("iterated"), ForecastMode::Iterated);
  EXPECT_EQ(parse_forecast_mode("one_step"), ForecastMode::OneStep);
  EXPECT_FALSE(parse_forecast_mode("sideways").has_value());
}
