#include "vfts/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vfts/error.hpp"
#include "vfts/stats.hpp"
#include "vfts/var.hpp"

namespace vfts {

namespace {

constexpr double kSmoothMargin = 0.10;  // largest noise-free relative step allowed
constexpr std::size_t kMaxGridPoints = std::size_t{1} << 16;
constexpr int kNoiseAttempts = 1000;

// Relative step between consecutive currents in the detector's direction.
double directional_change(Process process, double prev, double next) {
  return default_direction(process) == JumpDirection::Drop ? (prev - next) / prev
                                                           : (next - prev) / prev;
}

std::vector<double> jittered_grid(std::size_t points, double jitter, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::vector<double> t(points);
  const double step = 1.0 / static_cast<double>(points - 1);
  for (std::size_t g = 0; g < points; ++g) {
    const double shift = (g == 0 || g + 1 == points) ? 0.0 : u(rng);
    t[g] = (static_cast<double>(g) + shift) * step;
  }
  t.front() = 0.0;
  t.back() = 1.0;
  return t;
}

}  // namespace

double fourier_function(int index, double t) {
  if (index < 0) fail(ErrorCode::InvalidArgument, "Fourier index must be nonnegative");
  if (index == 0) return 1.0;
  const int j = (index + 1) / 2;
  const double arg = 2.0 * std::numbers::pi * j * t;
  return std::numbers::sqrt2 * (index % 2 == 1 ? std::cos(arg) : std::sin(arg));
}

int SynthProcess::function_index(std::size_t j) const {
  if (functions.empty()) return static_cast<int>(j) + 1;
  if (j >= functions.size()) fail(ErrorCode::InvalidArgument, "fewer functions than eigenvalues");
  return functions[j];
}

double SynthProcess::mean(double t) const noexcept {
  return mean_level + mean_amplitude * t * t * (3.0 - 2.0 * t);
}

Eigen::Index SynthConfig::score_dimension() const {
  Eigen::Index q = 0;
  for (const auto& p : processes) q += static_cast<Eigen::Index>(p.eigenvalues.size());
  return q;
}

Eigen::Index GroundTruth::offset(std::size_t h) const {
  Eigen::Index q = 0;
  for (std::size_t j = 0; j < h; ++j) q += static_cast<Eigen::Index>(processes[j].eigenvalues.size());
  return q;
}

Eigen::MatrixXd GroundTruth::eigenfunctions(std::size_t h, std::span<const double> grid) const {
  const auto& p = processes.at(h);
  Eigen::MatrixXd f(static_cast<Eigen::Index>(grid.size()),
                    static_cast<Eigen::Index>(p.eigenvalues.size()));
  for (Eigen::Index g = 0; g < f.rows(); ++g)
    for (Eigen::Index j = 0; j < f.cols(); ++j)
      f(g, j) = fourier_function(p.function_index(static_cast<std::size_t>(j)),
                                 grid[static_cast<std::size_t>(g)]);
  return f;
}

Eigen::MatrixXd GroundTruth::curves(std::size_t h, std::span<const double> grid) const {
  const auto& p = processes.at(h);
  const auto f = eigenfunctions(h, grid);
  Eigen::MatrixXd x = scores.middleCols(offset(h), f.cols()) * f.transpose();
  for (Eigen::Index g = 0; g < x.cols(); ++g) x.col(g).array() += p.mean(grid[static_cast<std::size_t>(g)]);
  return x;
}

Eigen::MatrixXd stationary_covariance(const std::vector<Eigen::MatrixXd>& omega,
                                      const Eigen::MatrixXd& innovation_cov) {
  const auto q = innovation_cov.rows();
  if (omega.empty()) return innovation_cov;
  const auto p = static_cast<Eigen::Index>(omega.size());
  Eigen::MatrixXd a = companion_matrix(omega);
  if (stats::spectral_radius(a) >= 1.0)
    fail(ErrorCode::UnstableDynamics, "score VAR is not stationary");
  // Doubling: gamma = sum_k A^k Q A'^k.
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(p * q, p * q);
  gamma.topLeftCorner(q, q) = innovation_cov;
  for (int it = 0; it < 64; ++it) {
    const Eigen::MatrixXd next = gamma + a * gamma * a.transpose();
    a = a * a;
    const double change = (next - gamma).cwiseAbs().maxCoeff();
    gamma = next;
    if (change <= 1e-15 * gamma.cwiseAbs().maxCoeff()) break;
  }
  return gamma.topLeftCorner(q, q);
}

SynthOutput generate(const SynthConfig& config) {
  if (config.processes.empty()) fail(ErrorCode::InvalidArgument, "no processes configured");
  if (config.n_cycles < 2) fail(ErrorCode::InvalidArgument, "need at least two cycles");
  if (config.burn_in < 0) fail(ErrorCode::InvalidArgument, "burn-in must be nonnegative");
  if (config.outliers > config.n_cycles)
    fail(ErrorCode::InvalidArgument, "more outliers than cycles");
  for (const auto& p : config.processes) {
    if (p.grid_points < 4) fail(ErrorCode::InvalidArgument, "need at least four grid points");
    if (!(p.jitter >= 0.0 && p.jitter < 0.5)) fail(ErrorCode::InvalidArgument, "jitter must lie in [0, 0.5)");
    if (p.noise_sd < 0.0) fail(ErrorCode::InvalidArgument, "noise sd must be nonnegative");
    if (!(p.switch_voltage > 0.0)) fail(ErrorCode::InvalidArgument, "switch voltage must be positive");
    for (double l : p.eigenvalues)
      if (l < 0.0) fail(ErrorCode::InvalidArgument, "eigenvalues must be nonnegative");
    for (std::size_t j = 0; j < p.eigenvalues.size(); ++j) (void)p.function_index(j);
  }
  const Eigen::Index q = config.score_dimension();
  const auto n = static_cast<Eigen::Index>(config.n_cycles);

  Eigen::MatrixXd sigma = config.innovation_cov.size() ? config.innovation_cov
                                                       : Eigen::MatrixXd::Identity(q, q);
  if (sigma.rows() != q || sigma.cols() != q)
    fail(ErrorCode::InvalidArgument, "innovation covariance has the wrong shape");
  for (const auto& o : config.omega)
    if (o.rows() != q || o.cols() != q)
      fail(ErrorCode::InvalidArgument, "omega matrices must be Q x Q");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Latent scores.
  Eigen::MatrixXd latent = Eigen::MatrixXd::Zero(n, q);
  Eigen::VectorXd lambda(q);
  {
    Eigen::Index j = 0;
    for (const auto& p : config.processes)
      for (double l : p.eigenvalues) lambda(j++) = l;
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(q);
  Eigen::MatrixXd gamma;
  if (q > 0) {
    gamma = stationary_covariance(config.omega, sigma);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::InvalidArgument, "innovation covariance is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();
    const auto p = static_cast<Eigen::Index>(config.omega.size());
    const Eigen::Index total = n + config.burn_in;
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(total + p, q);
    Eigen::VectorXd e(q);
    for (Eigen::Index t = p; t < total + p; ++t) {
      for (Eigen::Index j = 0; j < q; ++j) e(j) = normal(rng);
      Eigen::VectorXd zt = chol * e;
      for (Eigen::Index k = 1; k <= p; ++k)
        zt += config.omega[static_cast<std::size_t>(k - 1)] * z.row(t - k).transpose();
      z.row(t) = zt.transpose();
    }
    latent = z.bottomRows(n);
    for (Eigen::Index j = 0; j < q; ++j) scale(j) = std::sqrt(lambda(j) / gamma(j, j));
  }

  GroundTruth truth;
  truth.seed = config.seed;
  truth.processes = config.processes;
  truth.burn_in = config.burn_in;
  truth.scores = latent * scale.asDiagonal();
  Eigen::VectorXd inv_scale(q);
  for (Eigen::Index j = 0; j < q; ++j) inv_scale(j) = scale(j) > 0.0 ? 1.0 / scale(j) : 0.0;
  for (const auto& o : config.omega)
    truth.omega.push_back(scale.asDiagonal() * o * inv_scale.asDiagonal());
  truth.innovation_cov = scale.asDiagonal() * sigma * scale.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) truth.cycle_indices.push_back(static_cast<std::size_t>(i) + 1);

  if (config.outliers > 0) {
    std::vector<std::size_t> rows(config.n_cycles);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    for (std::size_t k = 0; k < config.outliers; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, rows.size() - 1);
      std::swap(rows[k], rows[pick(rng)]);
    }
    std::vector<std::size_t> chosen(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(config.outliers));
    std::sort(chosen.begin(), chosen.end());
    std::bernoulli_distribution coin(0.5);
    for (auto r : chosen) {
      for (Eigen::Index j = 0; j < q; ++j)
        truth.scores(static_cast<Eigen::Index>(r), j) =
            (coin(rng) ? 1.0 : -1.0) * config.outlier_magnitude * std::sqrt(lambda(j));
      truth.outlier_cycles.push_back(truth.cycle_indices[r]);
    }
  }

  SynthOutput out;
  out.cycles.resize(config.processes.size());
  truth.switch_voltages.resize(config.n_cycles);
  for (std::size_t i = 0; i < config.n_cycles; ++i) {
    for (std::size_t h = 0; h < config.processes.size(); ++h) {
      const auto& proc = config.processes[h];
      const double v_switch = proc.switch_voltage * std::exp(proc.switch_voltage_sd * normal(rng));
      if (h == 0) truth.switch_voltages[i] = v_switch;
      const Eigen::RowVectorXd xi =
          truth.scores.row(static_cast<Eigen::Index>(i))
              .segment(truth.offset(h), static_cast<Eigen::Index>(proc.eigenvalues.size()));
      auto value = [&](double t) {
        double x = proc.mean(t);
        for (Eigen::Index j = 0; j < xi.size(); ++j)
          x += xi(j) * fourier_function(proc.function_index(static_cast<std::size_t>(j)), t);
        return x;
      };

      // Refine until the noise-free curve never trips the detector.
      std::size_t points = proc.grid_points;
      std::vector<double> t;
      std::vector<double> smooth;
      for (;;) {
        t = jittered_grid(points, proc.jitter, rng);
        smooth.resize(points);
        for (std::size_t g = 0; g < points; ++g) smooth[g] = value(t[g]);
        bool ok = true;
        for (std::size_t g = 1; g < points && ok; ++g)
          ok = directional_change(proc.process, std::exp(smooth[g - 1]), std::exp(smooth[g])) <=
               kSmoothMargin;
        if (ok) break;
        points *= 2;
        if (points > kMaxGridPoints)
          fail(ErrorCode::InvalidArgument, "curves too steep to sample below the jump fraction");
      }

      std::vector<double> current(points);
      const SwitchRule rule;
      for (int attempt = 0;; ++attempt) {
        if (attempt == kNoiseAttempts)
          fail(ErrorCode::InvalidArgument, "observation noise trips the switch detector");
        for (std::size_t g = 0; g < points; ++g)
          current[g] = std::exp(smooth[g] + proc.noise_sd * normal(rng));
        bool ok = true;
        for (std::size_t g = 1; g < points && ok; ++g)
          ok = directional_change(proc.process, current[g - 1], current[g]) <= rule.jump_fraction;
        if (ok) break;
      }

      RawCycle cycle;
      cycle.cycle_index = truth.cycle_indices[i];
      cycle.process = proc.process;
      cycle.samples.reserve(points + 1);
      for (std::size_t g = 0; g < points; ++g)
        cycle.samples.push_back({t[g] * v_switch, current[g]});
      cycle.samples.back().voltage = v_switch;
      const double jump = default_direction(proc.process) == JumpDirection::Drop ? 0.2 : 5.0;
      cycle.samples.push_back(
          {v_switch * (1.0 + 1.0 / static_cast<double>(points - 1)), current.back() * jump});
      out.cycles[h].push_back(std::move(cycle));
    }
  }
  out.truth = std::move(truth);
  return out;
}

GridPca grid_fpca_oracle(const Eigen::MatrixXd& curves, double delta) {
  const auto n = curves.rows();
  const auto g = curves.cols();
  if (n < 2 || g < 2) fail(ErrorCode::InvalidArgument, "oracle needs at least two curves and points");
  if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "grid step must be positive");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(g, delta);
  w(0) = w(g - 1) = 0.5 * delta;
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd centered = curves.rowwise() - curves.colwise().mean();
  const Eigen::MatrixXd a = centered * sw.asDiagonal();
  const double nn = static_cast<double>(n);

  Eigen::VectorXd values;
  Eigen::MatrixXd u;  // G x r orthonormal, in weighted coordinates
  if (n < g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a * a.transpose() / nn);
    const Eigen::VectorXd ev = es.eigenvalues().reverse();
    const Eigen::MatrixXd vecs = es.eigenvectors().rowwise().reverse();
    const double floor = 1e-12 * std::max(ev.maxCoeff(), 0.0);
    Eigen::Index r = 0;
    while (r < ev.size() && ev(r) > floor) ++r;
    values = ev.head(r);
    u.resize(g, r);
    for (Eigen::Index j = 0; j < r; ++j)
      u.col(j) = a.transpose() * vecs.col(j) / std::sqrt(nn * ev(j));
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a / nn);
    values = es.eigenvalues().reverse().cwiseMax(0.0);
    u = es.eigenvectors().rowwise().reverse();
  }

  GridPca out;
  out.eigenvalues = values;
  out.eigenfunctions = sw.cwiseInverse().asDiagonal() * u;
  for (Eigen::Index j = 0; j < out.eigenfunctions.cols(); ++j) {
    Eigen::Index at = 0;
    out.eigenfunctions.col(j).cwiseAbs().maxCoeff(&at);
    if (out.eigenfunctions(at, j) < 0.0) out.eigenfunctions.col(j) *= -1.0;
  }
  out.scores = centered * w.asDiagonal() * out.eigenfunctions;
  return out;
}

}  // namespace vfts
