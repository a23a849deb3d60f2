#include "cervix_cad/feature_matrix.hpp"

#include <stdexcept>
#include <string>

namespace cervix {

FeatureMatrix::FeatureMatrix(RowMatrixXd v, std::vector<int> l, LabelScheme s)
    : values(std::move(v)), labels(std::move(l)), scheme(s) {
  if (static_cast<Eigen::Index>(labels.size()) != values.rows())
    throw std::invalid_argument("feature matrix has " + std::to_string(values.rows()) + " rows but " +
                                std::to_string(labels.size()) + " labels");
  if (!values.allFinite()) throw std::invalid_argument("feature matrix contains non-finite values");
  for (int label : labels)
    if (label < 0 || label >= class_count(scheme)) throw std::invalid_argument("label index out of scheme range");
}

std::vector<int> FeatureMatrix::class_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(num_classes()), 0);
  for (int label : labels) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

FeatureMatrix FeatureMatrix::rows(std::span<const int> indices) const {
  FeatureMatrix out;
  out.scheme = scheme;
  out.values.resize(static_cast<Eigen::Index>(indices.size()), d());
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.values.row(static_cast<Eigen::Index>(k)) = values.row(indices[k]);
    out.labels.push_back(labels[static_cast<std::size_t>(indices[k])]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::cols(Eigen::Index begin, Eigen::Index count) const {
  if (begin < 0 || count < 0 || begin + count > d()) throw std::invalid_argument("column range out of bounds");
  FeatureMatrix out;
  out.scheme = scheme;
  out.labels = labels;
  out.values = values.middleCols(begin, count);
  return out;
}

}  // namespace cervix
