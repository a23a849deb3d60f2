#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cervix_cad/feature_matrix.hpp"

namespace cervix {

/// Within-class (S_w) and between-class (S_b) scatter in the full feature
/// space. Dense d x d; meant for small d. fit_lda never forms these.
struct ScatterPair {
  Eigen::MatrixXd within;
  Eigen::MatrixXd between;
  std::vector<Eigen::VectorXd> class_means;
  Eigen::VectorXd global_mean;
};

/// S_w = sum_c sum_{i in c} (x_i - mu_c)(x_i - mu_c)^T,
/// S_b = sum_c n_c (mu_c - mu)(mu_c - mu)^T. Throws if a class has no samples.
ScatterPair compute_scatter(const FeatureMatrix& m);

/// Shrunk within-class scatter (1 - g) S_w + g (tr(S_w) / d) I.
Eigen::MatrixXd shrink_within(const Eigen::MatrixXd& within, double shrinkage);

/// Fitted discriminant projection, d x (C - 1). Columns are unit length,
/// ordered by descending generalized eigenvalue, with their largest-magnitude
/// component positive.
struct LdaModel {
  Eigen::MatrixXd projection;
  Eigen::VectorXd eigenvalues;  ///< retained, descending
  double shrinkage = 0.0;
  int class_count = 0;
  Eigen::Index training_dim = 0;

  Eigen::Index k() const { return projection.cols(); }
};

inline constexpr double kDefaultShrinkage = 0.1;

/// Solves S_b v = lambda (shrunk S_w) v inside the span of the centered data,
/// so the cost is O(n^2 d + n^3) rather than O(d^3). Requires n > C and
/// shrinkage in [0, 1]; throws SingularScatterError when the shrunk
/// within-class scatter is numerically singular.
LdaModel fit_lda(const FeatureMatrix& m, double shrinkage);

/// fit_lda, retrying with ten times the shrinkage (0 goes to 1e-3 first) up to
/// 1.0 while the scatter stays singular.
LdaModel fit_lda_escalating(const FeatureMatrix& m, double shrinkage);

/// Rows times projection; output has C - 1 columns.
FeatureMatrix project(const LdaModel& model, const FeatureMatrix& m);

/// `LDA1`, u32 d, u32 k, f64 shrinkage, d*k float64 column-major.
std::vector<std::uint8_t> encode_lda(const LdaModel& model);
LdaModel decode_lda(std::span<const std::uint8_t> bytes);
void save_lda(const std::filesystem::path& path, const LdaModel& model);
LdaModel load_lda(const std::filesystem::path& path);

}  // namespace cervix
