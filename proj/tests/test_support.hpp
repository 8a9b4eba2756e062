#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vfts/basis.hpp"
#include "vfts/error.hpp"
#include "vfts/synth.hpp"
#include "vfts/var.hpp"

namespace vfts::testing {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

/// Least-squares spline coefficients of Fourier function `index` on a dense grid.
inline Eigen::VectorXd fourier_coefficients(const BasisSpec& basis, int index) {
  const auto grid = uniform_grid(801);
  std::vector<double> y;
  for (double t : grid) y.push_back(fourier_function(index, t));
  return smooth_curve(grid, y, basis);
}

/// n curves mean + sum_j xi_ij f_j with independent N(0, lambda_j) scores,
/// represented exactly in the basis (the f_j are spline projections).
inline FunctionalSample fourier_sample(std::size_t n, const BasisSpec& basis,
                                       const std::vector<double>& lambda, std::uint64_t seed,
                                       const std::string& process = "reset",
                                       int first_function = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto k = static_cast<Eigen::Index>(lambda.size());
  Eigen::MatrixXd f(basis.dimension, k);
  for (Eigen::Index j = 0; j < k; ++j) f.col(j) = fourier_coefficients(basis, first_function + static_cast<int>(j));
  const Eigen::VectorXd mean = Eigen::VectorXd::Constant(basis.dimension, -3.0) +
                               0.5 * fourier_coefficients(basis, 1);
  FunctionalSample s;
  s.basis = basis;
  s.process = process;
  s.coefficients.resize(static_cast<Eigen::Index>(n), basis.dimension);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd c = mean;
    for (Eigen::Index j = 0; j < k; ++j) c += std::sqrt(lambda[static_cast<std::size_t>(j)]) * z(rng) * f.col(j);
    s.coefficients.row(static_cast<Eigen::Index>(i)) = c.transpose();
    s.cycle_indices.push_back(i + 1);
  }
  return s;
}

/// x_t = sum_k omega[k] x_{t-1-k} + e_t with iid N(0, sd^2) innovations.
inline Eigen::MatrixXd simulate_var(const std::vector<Eigen::MatrixXd>& omega, Eigen::Index n,
                                    std::uint64_t seed, double sd = 1.0, Eigen::Index burn = 300) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  const Eigen::Index q = omega.front().rows();
  const auto p = static_cast<Eigen::Index>(omega.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n + burn, q);
  for (Eigen::Index t = 0; t < n + burn; ++t) {
    Eigen::VectorXd v(q);
    for (Eigen::Index j = 0; j < q; ++j) v(j) = z(rng);
    for (Eigen::Index k = 0; k < p && k < t; ++k) v += omega[static_cast<std::size_t>(k)] * x.row(t - 1 - k).transpose();
    x.row(t) = v.transpose();
  }
  return x.bottomRows(n);
}

inline Eigen::MatrixXd white_noise(Eigen::Index n, Eigen::Index q, std::uint64_t seed) {
  return simulate_var({Eigen::MatrixXd::Zero(q, q)}, n, seed, 1.0, 0);
}

/// Column-centered series labelled x0, x1, ... unless labels are given.
inline ScoreSeries make_series(Eigen::MatrixXd values, std::vector<std::string> labels = {}) {
  values.rowwise() -= values.colwise().mean();
  if (labels.empty())
    for (Eigen::Index j = 0; j < values.cols(); ++j) labels.push_back("x" + std::to_string(j));
  return {std::move(values), std::move(labels), "test"};
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace vfts::testing
