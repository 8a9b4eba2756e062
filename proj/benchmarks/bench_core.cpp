#include <benchmark/benchmark.h>

#include <random>

#include <Eigen/Dense>

#include "vfts/basis.hpp"
#include "vfts/forecast.hpp"
#include "vfts/fpca.hpp"
#include "vfts/screen.hpp"
#include "vfts/var.hpp"

namespace {

vfts::FunctionalSample random_sample(Eigen::Index n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  vfts::FunctionalSample s;
  s.basis = vfts::make_basis(k);
  s.process = "reset";
  s.coefficients.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) s.coefficients(i, j) = z(rng) / (1.0 + j);
    s.cycle_indices.push_back(static_cast<std::size_t>(i) + 1);
  }
  return s;
}

Eigen::MatrixXd random_walkish(Eigen::Index n, Eigen::Index q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, q);
  for (Eigen::Index t = 1; t < n; ++t)
    for (Eigen::Index j = 0; j < q; ++j) x(t, j) = 0.5 * x(t - 1, j) + z(rng);
  return x.rowwise() - x.colwise().mean();
}

void BM_EvalBasis(benchmark::State& state) {
  const auto b = vfts::make_basis(static_cast<int>(state.range(0)));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vfts::eval_basis(b, t));
    t = t + 0.013 > 1.0 ? 0.0 : t + 0.013;
  }
}
BENCHMARK(BM_EvalBasis)->Arg(20)->Arg(60);

void BM_GramMatrix(benchmark::State& state) {
  const auto b = vfts::make_basis(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vfts::gram_matrix(b));
}
BENCHMARK(BM_GramMatrix)->Arg(20)->Arg(60);

void BM_SmoothCurve(benchmark::State& state) {
  const auto b = vfts::make_basis(20);
  const auto grid = vfts::uniform_grid(static_cast<std::size_t>(state.range(0)));
  std::vector<double> y;
  for (double t : grid) y.push_back(std::sin(6.0 * t) - t * t);
  for (auto _ : state) benchmark::DoNotOptimize(vfts::smooth_curve(grid, y, b));
}
BENCHMARK(BM_SmoothCurve)->Arg(60)->Arg(400);

void BM_FpcaUnivariate(benchmark::State& state) {
  const auto s = random_sample(state.range(0), 20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(vfts::fpca_univariate(s));
}
BENCHMARK(BM_FpcaUnivariate)->Arg(500)->Arg(2000);

void BM_FpcaMultivariate(benchmark::State& state) {
  const std::vector<vfts::FunctionalSample> s = {random_sample(state.range(0), 20, 2),
                                                 random_sample(state.range(0), 20, 3)};
  for (auto _ : state) benchmark::DoNotOptimize(vfts::fpca_multivariate(s));
}
BENCHMARK(BM_FpcaMultivariate)->Arg(500)->Arg(2000);

void BM_FitVar(benchmark::State& state) {
  const vfts::ScoreSeries s{random_walkish(1000, 6, 4), {"a", "b", "c", "d", "e", "f"}, "bench"};
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vfts::fit_var(s, p));
}
BENCHMARK(BM_FitVar)->Arg(1)->Arg(7);

void BM_SelectOrderAic(benchmark::State& state) {
  const vfts::ScoreSeries s{random_walkish(1000, 6, 5), {"a", "b", "c", "d", "e", "f"}, "bench"};
  for (auto _ : state) benchmark::DoNotOptimize(vfts::select_order_aic(s, 10));
}
BENCHMARK(BM_SelectOrderAic);

void BM_HalfspaceDepth(benchmark::State& state) {
  const Eigen::MatrixXd pts = random_walkish(state.range(0), 2, 6);
  const Eigen::Vector2d q(0.1, -0.2);
  for (auto _ : state) benchmark::DoNotOptimize(vfts::halfspace_depth(pts, q));
}
BENCHMARK(BM_HalfspaceDepth)->Arg(200)->Arg(2000);

void BM_Bagplot(benchmark::State& state) {
  const Eigen::MatrixXd pts = random_walkish(state.range(0), 2, 7);
  for (auto _ : state) benchmark::DoNotOptimize(vfts::bagplot_flags(pts));
}
BENCHMARK(BM_Bagplot)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
