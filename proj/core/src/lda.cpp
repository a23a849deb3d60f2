#include "cervix_cad/lda.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/error.hpp"

namespace cervix {
namespace {

// Relative eigenvalue floor below which a direction counts as absent.
constexpr double kRankTolerance = 1e-12;

void require_all_classes(const FeatureMatrix& m) {
  const auto sizes = m.class_sizes();
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (sizes[c] == 0) throw DataError("class " + std::to_string(c) + " has no samples");
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

}  // namespace

ScatterPair compute_scatter(const FeatureMatrix& m) {
  require_all_classes(m);
  const Eigen::Index d = m.d();
  const int C = m.num_classes();
  const auto sizes = m.class_sizes();

  ScatterPair s;
  s.global_mean = m.values.colwise().mean().transpose();
  s.class_means.assign(static_cast<std::size_t>(C), Eigen::VectorXd::Zero(d));
  for (Eigen::Index i = 0; i < m.n(); ++i) s.class_means[static_cast<std::size_t>(m.labels[i])] += m.values.row(i).transpose();
  for (int c = 0; c < C; ++c) s.class_means[static_cast<std::size_t>(c)] /= sizes[static_cast<std::size_t>(c)];

  s.within = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    const Eigen::VectorXd dev = m.values.row(i).transpose() - s.class_means[static_cast<std::size_t>(m.labels[i])];
    s.within.noalias() += dev * dev.transpose();
  }
  s.between = Eigen::MatrixXd::Zero(d, d);
  for (int c = 0; c < C; ++c) {
    const Eigen::VectorXd diff = s.class_means[static_cast<std::size_t>(c)] - s.global_mean;
    s.between.noalias() += sizes[static_cast<std::size_t>(c)] * diff * diff.transpose();
  }
  return s;
}

Eigen::MatrixXd shrink_within(const Eigen::MatrixXd& within, double shrinkage) {
  const auto d = within.rows();
  const double target = within.trace() / static_cast<double>(d);
  Eigen::MatrixXd out = (1.0 - shrinkage) * within;
  out.diagonal().array() += shrinkage * target;
  return out;
}

LdaModel fit_lda(const FeatureMatrix& m, double shrinkage) {
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw std::invalid_argument("shrinkage must lie in [0, 1]");
  const int C = m.num_classes();
  const Eigen::Index n = m.n();
  const Eigen::Index d = m.d();
  const Eigen::Index k = C - 1;
  if (n <= C) throw std::invalid_argument("LDA needs more samples than classes");
  require_all_classes(m);

  // Orthonormal basis of the centered data's span via the Gram matrix:
  // Xc = V L^{1/2} Q^T, so sample coordinates in that basis are V L^{1/2}.
  const Eigen::RowVectorXd mu = m.values.colwise().mean();
  const Eigen::MatrixXd centered = m.values.rowwise() - mu;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  gram = gram.selfadjointView<Eigen::Lower>();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram);
  if (gram_eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of the Gram matrix failed");
  const Eigen::VectorXd& lambda = gram_eig.eigenvalues();
  const double lambda_max = lambda(n - 1);
  if (!(lambda_max > 0.0)) throw SingularScatterError("all samples are identical; scatter is zero");
  Eigen::Index r = 0;
  while (r < n && lambda(n - 1 - r) > kRankTolerance * lambda_max) ++r;
  if (r < k) throw NumericalError("data spans " + std::to_string(r) + " dimensions, fewer than C - 1");

  // Columns in descending eigenvalue order.
  Eigen::MatrixXd basis(n, r);
  Eigen::VectorXd root(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    basis.col(j) = gram_eig.eigenvectors().col(n - 1 - j);
    root(j) = std::sqrt(lambda(n - 1 - j));
  }
  const Eigen::MatrixXd coords = basis * root.asDiagonal();  // n x r

  const auto sizes = m.class_sizes();
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(C, r);
  for (Eigen::Index i = 0; i < n; ++i) means.row(m.labels[static_cast<std::size_t>(i)]) += coords.row(i);
  for (int c = 0; c < C; ++c) means.row(c) /= sizes[static_cast<std::size_t>(c)];

  Eigen::MatrixXd within_r = Eigen::MatrixXd::Zero(r, r);
  {
    Eigen::MatrixXd dev(n, r);
    for (Eigen::Index i = 0; i < n; ++i) dev.row(i) = coords.row(i) - means.row(m.labels[static_cast<std::size_t>(i)]);
    within_r.selfadjointView<Eigen::Lower>().rankUpdate(dev.transpose());
    within_r = within_r.selfadjointView<Eigen::Lower>();
  }
  // S_b = M M^T with column c = sqrt(n_c) * mean_c (coords are centered).
  Eigen::MatrixXd mt(r, C);
  for (int c = 0; c < C; ++c) mt.col(c) = std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(c)])) * means.row(c).transpose();

  // Outside the span S_w vanishes, so tr(S_w) is tr(within_r); the identity
  // target is scaled by the full dimension d.
  const double trace_w = within_r.trace();
  const double target = trace_w / static_cast<double>(d);
  Eigen::MatrixXd shrunk = (1.0 - shrinkage) * within_r;
  shrunk.diagonal().array() += shrinkage * target;

  // Eigenvalues of shrunk lie in [shrinkage * target, (1 - shrinkage) * tr + shrinkage * target],
  // which settles the conditioning test without a decomposition in the usual case.
  const double floor = shrinkage * target;
  if (!(floor > kRankTolerance * ((1.0 - shrinkage) * trace_w + floor))) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> shrunk_eig(shrunk, Eigen::EigenvaluesOnly);
    const double s_max = shrunk_eig.eigenvalues().maxCoeff();
    const double s_min = shrunk_eig.eigenvalues().minCoeff();
    if (!(s_max > 0.0) || s_min <= kRankTolerance * s_max) {
      throw SingularScatterError("within-class scatter is singular at shrinkage " + std::to_string(shrinkage) +
                                 "; use a larger shrinkage");
    }
  }

  // S_b v = lambda S~ v with S~ = L L^T. S_b has rank C - 1, so with
  // A = L^{-1} M the problem reduces to the C x C matrix A^T A: for
  // A^T A z = lambda z, v = L^{-T} A z.
  const Eigen::LLT<Eigen::MatrixXd> llt(shrunk);
  if (llt.info() != Eigen::Success) throw SingularScatterError("within-class scatter is not positive definite");
  const Eigen::MatrixXd a = llt.matrixL().solve(mt);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(a.transpose() * a);
  if (small.info() != Eigen::Success) throw NumericalError("discriminant eigensolver failed");

  Eigen::MatrixXd reduced(r, k);
  LdaModel model;
  model.eigenvalues.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    model.eigenvalues(j) = small.eigenvalues()(C - 1 - j);
    reduced.col(j) = llt.matrixU().solve(a * small.eigenvectors().col(C - 1 - j));
  }
  // Map back to feature space: w = Xc^T V L^{-1/2} v.
  const Eigen::MatrixXd sample_weights = basis * root.cwiseInverse().asDiagonal() * reduced;  // n x k
  model.projection = centered.transpose() * sample_weights;                                 // d x k
  for (Eigen::Index j = 0; j < k; ++j) {
    const double norm = model.projection.col(j).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("degenerate discriminant direction");
    model.projection.col(j) /= norm;
    fix_sign(model.projection.col(j));
  }
  model.shrinkage = shrinkage;
  model.class_count = C;
  model.training_dim = d;
  return model;
}

LdaModel fit_lda_escalating(const FeatureMatrix& m, double shrinkage) {
  double g = shrinkage;
  while (true) {
    try {
      return fit_lda(m, g);
    } catch (const SingularScatterError&) {
      if (g >= 1.0) throw;
      g = g == 0.0 ? 1e-3 : std::min(1.0, g * 10.0);
    }
  }
}

FeatureMatrix project(const LdaModel& model, const FeatureMatrix& m) {
  if (m.d() != model.training_dim)
    throw std::invalid_argument("LDA model expects " + std::to_string(model.training_dim) + " features, got " +
                                std::to_string(m.d()));
  FeatureMatrix out;
  out.scheme = m.scheme;
  out.labels = m.labels;
  out.values = m.values * model.projection;
  return out;
}

namespace {
constexpr std::string_view kLdaMagic = "LDA1";
}

std::vector<std::uint8_t> encode_lda(const LdaModel& model) {
  io::ByteWriter w;
  w.put_bytes(kLdaMagic);
  w.put_u32(static_cast<std::uint32_t>(model.projection.rows()));
  w.put_u32(static_cast<std::uint32_t>(model.projection.cols()));
  w.put_f64(model.shrinkage);
  // Eigen's default storage is column-major.
  for (Eigen::Index i = 0; i < model.projection.size(); ++i) w.put_f64(model.projection.data()[i]);
  return w.bytes();
}

LdaModel decode_lda(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  if (r.get_bytes(4) != kLdaMagic) throw DataError("not an LDA model (bad magic)");
  const auto d = r.get_u32();
  const auto k = r.get_u32();
  LdaModel model;
  model.shrinkage = r.get_f64();
  if (static_cast<std::uint64_t>(d) * k * 8 != r.remaining()) throw DataError("LDA model size does not match header");
  model.projection.resize(d, k);
  for (Eigen::Index i = 0; i < model.projection.size(); ++i) model.projection.data()[i] = r.get_f64();
  model.class_count = static_cast<int>(k) + 1;
  model.training_dim = d;
  return model;
}

void save_lda(const std::filesystem::path& path, const LdaModel& model) { io::write_file_atomic(path, encode_lda(model)); }

LdaModel load_lda(const std::filesystem::path& path) { return decode_lda(io::read_file(path)); }

}  // namespace cervix
