#pragma once

#include <Eigen/Core>

#include "cervix_cad/descriptors.hpp"
#include "cervix_cad/feature_matrix.hpp"
#include "cervix_cad/manifest.hpp"

namespace cervix {

/// Concatenates rn50 | rn101 | rn152 descriptors row by row. Every cache must
/// carry the manifest's id sequence; the first disagreement raises
/// AlignmentError naming the offending id.
FeatureMatrix fuse(const DescriptorCache& rn50, const DescriptorCache& rn101, const DescriptorCache& rn152,
                   const DatasetManifest& manifest);

/// Loads a single cache (any variant, including fused) as a feature matrix.
FeatureMatrix to_feature_matrix(const DescriptorCache& cache, const DatasetManifest& manifest);

/// Fused matrix in cache form (variant code 3, float32).
DescriptorCache to_fused_cache(const FeatureMatrix& fused, const DatasetManifest& manifest);

/// Per-feature training minimum and maximum.
struct MinMaxScaler {
  Eigen::VectorXd mins;
  Eigen::VectorXd maxs;

  Eigen::Index d() const { return mins.size(); }
};

MinMaxScaler fit_scaler(const FeatureMatrix& train);

/// (x - min) / (max - min) per feature, no clamping; zero-range features map to 0.
FeatureMatrix apply_scaler(const MinMaxScaler& scaler, const FeatureMatrix& m);

}  // namespace cervix
