#include "vfts/fpca.hpp"

#include <algorithm>
#include <cmath>

#include "vfts/error.hpp"

namespace vfts {

namespace {

struct GramRoots {
  Eigen::MatrixXd sqrt_w;
  Eigen::MatrixXd inv_sqrt_w;
};

GramRoots gram_roots(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
  if (eig.info() != Eigen::Success) fail(ErrorCode::SingularGram, "Gram eigensolver failed");
  const Eigen::VectorXd d = eig.eigenvalues();
  if (!(d.minCoeff() > d.maxCoeff() * 1e-14))
    fail(ErrorCode::SingularGram, "Gram matrix is not positive definite");
  const auto& v = eig.eigenvectors();
  return {v * d.cwiseSqrt().asDiagonal() * v.transpose(),
          v * d.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose()};
}

// Flip each column so that its largest-magnitude entry (lowest index on
// ties) is positive.
void fix_signs(Eigen::MatrixXd& b) {
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      if (std::abs(b(r, j)) > best) {
        best = std::abs(b(r, j));
        arg = r;
      }
    }
    if (b(arg, j) < 0.0) b.col(j) *= -1.0;
  }
}

PcaModel fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, PcaKind kind,
             std::vector<PcaBlock> blocks, std::vector<std::size_t> cycles) {
  const auto n = x.rows();
  if (n < 2) fail(ErrorCode::InsufficientData, "FPCA needs at least two curves");
  const auto roots = gram_roots(w);

  PcaModel model;
  model.kind = kind;
  model.blocks = std::move(blocks);
  model.cycle_indices = std::move(cycles);
  model.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(n);
  Eigen::MatrixXd m = roots.sqrt_w * s * roots.sqrt_w;
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) fail(ErrorCode::SingularGram, "covariance eigensolver failed");
  const auto dim = m.rows();
  model.eigenvalues.resize(dim);
  Eigen::MatrixXd u(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    model.eigenvalues(j) = std::max(0.0, eig.eigenvalues()(dim - 1 - j));
    u.col(j) = eig.eigenvectors().col(dim - 1 - j);
  }
  model.eigenfunctions = roots.inv_sqrt_w * u;
  fix_signs(model.eigenfunctions);
  model.scores = centered * w * model.eigenfunctions;
  model.total_variance = m.trace();
  return model;
}

}  // namespace

Eigen::MatrixXd stack_coefficients(std::span<const FunctionalSample> samples) {
  if (samples.empty()) fail(ErrorCode::InvalidArgument, "no samples to stack");
  const auto& ref = samples.front();
  Eigen::Index width = 0;
  for (const auto& s : samples) {
    if (s.cycle_indices != ref.cycle_indices || s.coefficients.rows() != ref.coefficients.rows())
      fail(ErrorCode::CycleMisalignment, "samples do not cover the same cycles");
    width += s.coefficients.cols();
  }
  Eigen::MatrixXd x(ref.coefficients.rows(), width);
  Eigen::Index offset = 0;
  for (const auto& s : samples) {
    x.middleCols(offset, s.coefficients.cols()) = s.coefficients;
    offset += s.coefficients.cols();
  }
  return x;
}

PcaModel fpca_univariate(const FunctionalSample& sample) {
  if (sample.coefficients.cols() != sample.basis.dimension)
    fail(ErrorCode::InvalidArgument, "coefficient width differs from the basis dimension");
  return fit(sample.coefficients, gram_matrix(sample.basis), PcaKind::Univariate,
             {PcaBlock{sample.process, sample.basis, 0}}, sample.cycle_indices);
}

PcaModel fpca_multivariate(std::span<const FunctionalSample> samples) {
  const Eigen::MatrixXd x = stack_coefficients(samples);
  std::vector<PcaBlock> blocks;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  Eigen::Index offset = 0;
  for (const auto& s : samples) {
    const auto k = s.basis.dimension;
    w.block(offset, offset, k, k) = gram_matrix(s.basis);
    blocks.push_back(PcaBlock{s.process, s.basis, offset});
    offset += k;
  }
  return fit(x, w, PcaKind::Multivariate, std::move(blocks), samples.front().cycle_indices);
}

int choose_q(std::span<const double> eigenvalues, double threshold, std::optional<double> total) {
  if (!(threshold > 0.0 && threshold < 1.0))
    fail(ErrorCode::InvalidArgument, "variance threshold must lie in (0, 1)");
  double sum = 0.0;
  for (double v : eigenvalues) sum += std::max(v, 0.0);
  const double denom = total.value_or(sum);
  if (!(sum > 0.0) || !(denom > 0.0))
    fail(ErrorCode::AllZeroVariance, "no positive eigenvalue");
  double cumulative = 0.0;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    cumulative += std::max(eigenvalues[j], 0.0);
    if (cumulative / denom >= threshold) return static_cast<int>(j + 1);
  }
  fail(ErrorCode::QOutOfRange, "listed components never reach the variance threshold");
}

int choose_q(const Eigen::VectorXd& eigenvalues, double threshold, std::optional<double> total) {
  return choose_q(std::span<const double>(eigenvalues.data(), eigenvalues.size()), threshold,
                  total);
}

int choose_q_from_cumulative_percent(std::span<const double> cumulative_percent,
                                     double threshold) {
  std::vector<double> increments(cumulative_percent.size());
  double prev = 0.0;
  for (std::size_t j = 0; j < cumulative_percent.size(); ++j) {
    if (cumulative_percent[j] < prev || cumulative_percent[j] > 100.0)
      fail(ErrorCode::InvalidArgument, "cumulative percentages must be nondecreasing in [0, 100]");
    increments[j] = cumulative_percent[j] - prev;
    prev = cumulative_percent[j];
  }
  return choose_q(increments, threshold, 100.0);
}

std::vector<double> cumulative_share(const PcaModel& model, std::size_t count) {
  std::vector<double> out;
  double cumulative = 0.0;
  const auto limit = std::min<std::size_t>(count, static_cast<std::size_t>(model.components()));
  for (std::size_t j = 0; j < limit; ++j) {
    cumulative += model.eigenvalues(static_cast<Eigen::Index>(j));
    out.push_back(model.total_variance > 0.0 ? cumulative / model.total_variance : 0.0);
  }
  return out;
}

std::vector<FunctionalSample> reconstruct(const PcaModel& model, int q) {
  if (q < 0 || q > model.components())
    fail(ErrorCode::QOutOfRange, "q outside 0..number of components");
  const Eigen::MatrixXd stacked =
      (model.scores.leftCols(q) * model.eigenfunctions.leftCols(q).transpose()).rowwise() +
      model.mean.transpose();
  std::vector<FunctionalSample> out;
  for (const auto& block : model.blocks) {
    FunctionalSample s;
    s.basis = block.basis;
    s.process = block.label;
    s.cycle_indices = model.cycle_indices;
    s.coefficients = stacked.middleCols(block.offset, block.basis.dimension);
    out.push_back(std::move(s));
  }
  return out;
}

Eigen::MatrixXd model_gram(const PcaModel& model) {
  const auto d = model.stacked_dimension();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (const auto& block : model.blocks) {
    const auto k = block.basis.dimension;
    w.block(block.offset, block.offset, k, k) = gram_matrix(block.basis);
  }
  return w;
}

Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& stacked_coefficients) {
  if (stacked_coefficients.cols() != model.stacked_dimension())
    fail(ErrorCode::InvalidArgument, "coefficient width differs from the model layout");
  return (stacked_coefficients.rowwise() - model.mean.transpose()) * model_gram(model) *
         model.eigenfunctions;
}

Eigen::VectorXd eigenfunction_values(const PcaModel& model, std::size_t block, double t, int q) {
  if (block >= model.blocks.size()) fail(ErrorCode::InvalidArgument, "block out of range");
  if (q < 0 || q > model.components()) fail(ErrorCode::QOutOfRange, "q out of range");
  const auto& b = model.blocks[block];
  return model.eigenfunctions.block(b.offset, 0, b.basis.dimension, q).transpose() *
         eval_basis(b.basis, t);
}

Eigen::VectorXd mean_values(const PcaModel& model, std::size_t block,
                            std::span<const double> grid) {
  if (block >= model.blocks.size()) fail(ErrorCode::InvalidArgument, "block out of range");
  const auto& b = model.blocks[block];
  return design_matrix(b.basis, grid) * model.mean.segment(b.offset, b.basis.dimension);
}

}  // namespace vfts
