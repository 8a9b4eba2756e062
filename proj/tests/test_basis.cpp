#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <algorithm>

#include "vfts/basis.hpp"
#include "vfts/error.hpp"

using namespace vfts;

TEST(MakeBasis, CubicBernsteinWhenNoInteriorKnots) {
  const auto b = make_basis(4);
  EXPECT_EQ(b.dimension, 4);
  EXPECT_EQ(b.order, 4);
  ASSERT_EQ(b.knots.size(), 8u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(b.knots[static_cast<std::size_t>(i)], 0.0);
    EXPECT_EQ(b.knots[static_cast<std::size_t>(i + 4)], 1.0);
  }
  for (double t : {0.1, 0.37, 0.5, 0.9}) {
    const auto v = eval_basis(b, t);
    const double s = 1.0 - t;
    EXPECT_NEAR(v(0), s * s * s, 1e-14);
    EXPECT_NEAR(v(1), 3 * t * s * s, 1e-14);
    EXPECT_NEAR(v(2), 3 * t * t * s, 1e-14);
    EXPECT_NEAR(v(3), t * t * t, 1e-14);
  }
}

TEST(MakeBasis, UniformInteriorKnotsForTwenty) {
  const auto b = make_basis(20);
  ASSERT_EQ(b.knots.size(), 24u);
  for (int j = 1; j <= 16; ++j)
    EXPECT_NEAR(b.knots[static_cast<std::size_t>(3 + j)], j / 17.0, 1e-15);
  EXPECT_EQ(b.knots[3], 0.0);
  EXPECT_EQ(b.knots[20], 1.0);
}

TEST(MakeBasis, TooSmall) {
  try {
    make_basis(3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionTooSmall);
  }
}

TEST(EvalBasis, BernsteinAtHalf) {
  const auto v = eval_basis(make_basis(4), 0.5);
  EXPECT_NEAR(v(0), 0.125, 1e-15);
  EXPECT_NEAR(v(1), 0.375, 1e-15);
  EXPECT_NEAR(v(2), 0.375, 1e-15);
  EXPECT_NEAR(v(3), 0.125, 1e-15);
}

TEST(EvalBasis, EndpointsAndDomain) {
  const auto b = make_basis(20);
  const auto v0 = eval_basis(b, 0.0);
  const auto v1 = eval_basis(b, 1.0);
  EXPECT_EQ(v0(0), 1.0);
  EXPECT_EQ(v1(19), 1.0);
  EXPECT_EQ(v0.tail(19).cwiseAbs().sum(), 0.0);
  EXPECT_EQ(v1.head(19).cwiseAbs().sum(), 0.0);
  for (double t : {-1e-9, 1.0 + 1e-9, -1.0, 2.0}) {
    try {
      eval_basis(b, t);
      FAIL() << t;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ArgumentOutOfDomain);
    }
  }
}

TEST(EvalBasis, PartitionOfUnityAndLocalSupport) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int K : {4, 5, 8, 20, 33}) {
    const auto b = make_basis(K);
    for (int i = 0; i < 1000; ++i) {
      const double t = u(rng);
      const auto v = eval_basis(b, t);
      EXPECT_NEAR(v.sum(), 1.0, 1e-12);
      EXPECT_LE((v.array() != 0.0).count(), 4);
      EXPECT_GE(v.minCoeff(), 0.0);
    }
  }
}

TEST(EvalBasis, DerivativeMatchesFiniteDifference) {
  const auto b = make_basis(12);
  const double h = 1e-6;
  for (double t : {0.013, 0.2, 0.51, 0.77, 0.96}) {
    const Eigen::VectorXd fd = (eval_basis(b, t + h) - eval_basis(b, t - h)) / (2 * h);
    EXPECT_LT((eval_basis_derivative(b, t) - fd).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(eval_basis_derivative(b, t).sum(), 0.0, 1e-10);
  }
}

TEST(GramMatrix, SymmetricPositiveDefiniteAndSumsToOne) {
  for (int K : {4, 7, 20}) {
    const auto w = gram_matrix(make_basis(K));
    EXPECT_LT((w - w.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    EXPECT_NEAR(w.sum(), 1.0, 1e-13);
  }
}

TEST(GramMatrix, SymbolicEntryForBernstein) {
  const auto w = gram_matrix(make_basis(4));
  EXPECT_NEAR(w(0, 0), 1.0 / 7.0, 1e-15);
  // int 3t(1-t)^2 * (1-t)^3 = 3 B(2, 6) = 3 / 42
  EXPECT_NEAR(w(0, 1), 3.0 / 42.0, 1e-15);
  EXPECT_NEAR(w(3, 3), 1.0 / 7.0, 1e-15);
}

TEST(GramMatrix, AgreesWithDenseTrapezoid) {
  const auto b = make_basis(20);
  const auto w = gram_matrix(b);
  const auto grid = uniform_grid(10001);
  const auto d = design_matrix(b, grid);
  Eigen::VectorXd tw = Eigen::VectorXd::Constant(10001, 1e-4);
  tw(0) = tw(10000) = 0.5e-4;
  const Eigen::MatrixXd brute = d.transpose() * tw.asDiagonal() * d;
  EXPECT_LT((w - brute).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GramMatrix, AgreesWithDenseSimpson) {
  const auto b = make_basis(20);
  const auto w = gram_matrix(b);
  const auto grid = uniform_grid(10001);
  const auto d = design_matrix(b, grid);
  Eigen::VectorXd sw(10001);
  for (Eigen::Index i = 0; i < 10001; ++i) sw(i) = (i == 0 || i == 10000) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  sw *= 1e-4 / 3.0;
  const Eigen::MatrixXd brute = d.transpose() * sw.asDiagonal() * d;
  EXPECT_LT((w - brute).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SmoothCurve, RecoversInSpaceCoefficients) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto b = make_basis(20);
  std::vector<double> grid(60);
  for (auto& t : grid) t = u(rng);
  std::sort(grid.begin(), grid.end());
  grid.back() = 1.0;
  Eigen::VectorXd c0(20);
  for (int i = 0; i < 20; ++i) c0(i) = z(rng);
  const Eigen::VectorXd y = design_matrix(b, grid) * c0;
  const auto c = smooth_curve(grid, {y.data(), static_cast<std::size_t>(y.size())}, b);
  EXPECT_LT((c - c0).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SmoothCurve, ConstantAndLinear) {
  const auto b = make_basis(20);
  const auto grid = uniform_grid(45);
  std::vector<double> three(grid.size(), 3.0);
  const auto c = smooth_curve(grid, three, b);
  EXPECT_LT((c.array() - 3.0).abs().maxCoeff(), 1e-12);

  const auto lin = smooth_curve(grid, grid, b);
  for (double t : {0.0, 0.123, 0.5, 0.999, 1.0})
    EXPECT_NEAR(eval_basis(b, t).dot(lin), t, 1e-10);
}

TEST(SmoothCurve, ResidualsOrthogonalToDesign) {
  const auto b = make_basis(10);
  const auto grid = uniform_grid(80);
  std::vector<double> y;
  for (double t : grid) y.push_back(std::sin(9 * t) + std::exp(t));
  const auto c = smooth_curve(grid, y, b);
  const auto d = design_matrix(b, grid);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::VectorXd r = yv - d * c;
  EXPECT_LT((d.transpose() * r).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SmoothCurve, RankDeficient) {
  const auto b = make_basis(20);
  const auto grid = uniform_grid(19);
  std::vector<double> y(grid.size(), 1.0);
  try {
    smooth_curve(grid, y, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficientDesign);
  }
  // Enough points but all inside one knot span.
  std::vector<double> clustered;
  for (int i = 0; i < 30; ++i) clustered.push_back(0.001 * i);
  std::vector<double> y2(clustered.size(), 1.0);
  try {
    smooth_curve(clustered, y2, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficientDesign);
  }
}

TEST(SmoothCurves, SortsByCycleAndEvaluates) {
  const auto b = make_basis(6);
  std::vector<RegisteredCurve> curves(2);
  curves[0].cycle_index = 9;
  curves[1].cycle_index = 4;
  for (auto& c : curves) {
    c.grid = uniform_grid(20);
    for (double t : c.grid) c.values.push_back(static_cast<double>(c.cycle_index) * t * t);
  }
  const auto s = smooth_curves(curves, b, "reset");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.cycle_indices[0], 4u);
  EXPECT_EQ(s.cycle_indices[1], 9u);
  const double grid[] = {0.5};
  const auto v = evaluate_curves(b, s.coefficients, grid);
  EXPECT_NEAR(v(0, 0), 4 * 0.25, 1e-12);
  EXPECT_NEAR(v(1, 0), 9 * 0.25, 1e-12);
}
