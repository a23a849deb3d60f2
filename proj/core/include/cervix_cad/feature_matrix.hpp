#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "cervix_cad/labels.hpp"

namespace cervix {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n samples x d features, with one class index per row.
struct FeatureMatrix {
  RowMatrixXd values;
  std::vector<int> labels;
  LabelScheme scheme = LabelScheme::binary;

  FeatureMatrix() = default;
  /// Validates shape agreement, finiteness, and label range.
  FeatureMatrix(RowMatrixXd values, std::vector<int> labels, LabelScheme scheme);

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index d() const { return values.cols(); }
  int num_classes() const { return class_count(scheme); }

  /// Sample counts per class index.
  std::vector<int> class_sizes() const;

  FeatureMatrix rows(std::span<const int> indices) const;
  FeatureMatrix cols(Eigen::Index begin, Eigen::Index count) const;
};

}  // namespace cervix
