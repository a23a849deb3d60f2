#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cervix_cad/feature_matrix.hpp"

namespace cervix {

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-4;
  int max_iter = 2000;  ///< epochs over the training set
  std::uint64_t seed = 0;
};

struct SvmModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double c_param = 1.0;
  bool converged = false;
  int iterations_used = 0;

  Eigen::Index d() const { return weights.size(); }
};

/// Optional diagnostics from train_binary.
struct SvmTrace {
  std::vector<double> dual_objective;  ///< after each epoch
  Eigen::VectorXd alpha;               ///< final dual variables
};

struct Prediction {
  int label;  ///< -1 or +1
  double score;
};

/// L1-loss soft-margin linear SVM by randomized dual coordinate descent:
/// maximize sum(a) - 1/2 |sum a_i y_i x~_i|^2 subject to 0 <= a_i <= C, where
/// x~ appends a constant 1 so the bias is part of the (regularized) weight.
/// Stops once the largest projected-gradient magnitude in an epoch is below
/// tol. `y` holds -1/+1.
SvmModel train_binary(const RowMatrixXd& x, std::span<const int> y, const SvmOptions& options,
                      SvmTrace* trace = nullptr);

/// Trains `positive_class` against every other class of `m`.
SvmModel train_binary(const FeatureMatrix& m, int positive_class, const SvmOptions& options,
                      SvmTrace* trace = nullptr);

/// score = w.x + b; a score of exactly 0 is labeled +1.
Prediction predict(const SvmModel& model, std::span<const double> x);
Prediction predict(const SvmModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

/// One-vs-rest: one binary model per class.
struct MulticlassSvm {
  std::vector<SvmModel> models;
  std::vector<int> classes;
};

MulticlassSvm train_multiclass(const FeatureMatrix& m, const SvmOptions& options);

/// Highest one-vs-rest score wins, ties to the lowest class index. With two
/// classes the class-1 model's sign rule decides, matching train_binary.
int predict_class(const MulticlassSvm& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);
std::vector<int> predict_classes(const MulticlassSvm& model, const RowMatrixXd& x);

/// `SVM1`, u32 d, f64 bias, f64 C, d float64 weights.
std::vector<std::uint8_t> encode_svm(const SvmModel& model);
SvmModel decode_svm(std::span<const std::uint8_t> bytes);
void save_svm(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_svm(const std::filesystem::path& path);

}  // namespace cervix
