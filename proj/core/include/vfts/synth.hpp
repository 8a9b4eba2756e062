#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vfts/ingest.hpp"

namespace vfts {

/// Orthonormal Fourier family on [0, 1]: index 0 is the constant 1, index
/// 2j-1 is sqrt(2) cos(2 pi j t) and index 2j is sqrt(2) sin(2 pi j t).
double fourier_function(int index, double t);

struct SynthProcess {
  Process process = Process::Reset;
  std::vector<double> eigenvalues;  // score variances, one per eigenfunction
  std::vector<int> functions;       // Fourier indices; empty means 1, 2, ...
  // mean(t) = level + amplitude (3t^2 - 2t^3), in log-current units
  double mean_level = -8.0;
  double mean_amplitude = 1.5;
  std::size_t grid_points = 60;  // samples per cycle before refinement
  double jitter = 0.3;           // interior points move by up to this fraction of the spacing
  double noise_sd = 0.0;         // i.i.d. noise in log-current space
  double switch_voltage = 1.0;
  double switch_voltage_sd = 0.0;  // log-normal spread of the per-cycle switch voltage

  [[nodiscard]] int function_index(std::size_t j) const;
  [[nodiscard]] double mean(double t) const noexcept;
};

struct SynthConfig {
  std::size_t n_cycles = 200;
  std::uint64_t seed = 1;
  std::vector<SynthProcess> processes;
  /// Dynamics of the stacked latent score vector (processes in order). Empty
  /// means independent draws. The latent process is rescaled so that every
  /// score has the configured eigenvalue as its stationary variance.
  std::vector<Eigen::MatrixXd> omega;
  Eigen::MatrixXd innovation_cov;  // empty means identity
  int burn_in = 200;
  std::size_t outliers = 0;
  double outlier_magnitude = 10.0;  // outlier scores are +-magnitude sqrt(lambda)

  [[nodiscard]] Eigen::Index score_dimension() const;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  std::vector<SynthProcess> processes;
  std::vector<std::size_t> cycle_indices;
  Eigen::MatrixXd scores;              // n x Q after outlier injection
  std::vector<Eigen::MatrixXd> omega;  // dynamics of the scores themselves
  Eigen::MatrixXd innovation_cov;      // of the scores
  std::vector<std::size_t> outlier_cycles;
  std::vector<double> switch_voltages;  // per cycle
  int burn_in = 0;

  /// First score column of process h.
  [[nodiscard]] Eigen::Index offset(std::size_t h) const;
  /// Noise-free curves of process h on a grid, n x G.
  [[nodiscard]] Eigen::MatrixXd curves(std::size_t h, std::span<const double> grid) const;
  /// Eigenfunctions of process h on a grid, G x q_h.
  [[nodiscard]] Eigen::MatrixXd eigenfunctions(std::size_t h, std::span<const double> grid) const;
};

struct SynthOutput {
  std::vector<std::vector<RawCycle>> cycles;  // per process
  GroundTruth truth;
};

SynthOutput generate(const SynthConfig& config);

/// Stationary covariance of a VAR with the given innovation covariance.
Eigen::MatrixXd stationary_covariance(const std::vector<Eigen::MatrixXd>& omega,
                                      const Eigen::MatrixXd& innovation_cov);

struct GridPca {
  Eigen::VectorXd eigenvalues;     // descending
  Eigen::MatrixXd eigenfunctions;  // G x r grid values, unit L2 norm
  Eigen::MatrixXd scores;          // n x r
};

/// Brute-force FPCA of curves sampled on a uniform grid with step `delta`,
/// using trapezoid weights.
GridPca grid_fpca_oracle(const Eigen::MatrixXd& curves, double delta);

}  // namespace vfts
