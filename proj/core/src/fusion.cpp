#include "cervix_cad/fusion.hpp"

#include <stdexcept>

#include "cervix_cad/error.hpp"

namespace cervix {
namespace {

void check_alignment(const DescriptorCache& cache, const std::vector<std::string>& ids) {
  const std::string name(variant_name(cache.variant));
  if (cache.ids.size() != ids.size())
    throw AlignmentError(name + " cache has " + std::to_string(cache.ids.size()) + " rows, manifest has " +
                         std::to_string(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (cache.ids[i] != ids[i])
      throw AlignmentError(name + " cache row " + std::to_string(i) + " is '" + cache.ids[i] + "', manifest expects '" +
                           ids[i] + "'");
  }
}

}  // namespace

FeatureMatrix fuse(const DescriptorCache& rn50, const DescriptorCache& rn101, const DescriptorCache& rn152,
                   const DatasetManifest& manifest) {
  const auto ids = manifest.ids();
  const DescriptorCache* parts[3] = {&rn50, &rn101, &rn152};
  Eigen::Index total_d = 0;
  for (const auto* c : parts) {
    check_alignment(*c, ids);
    total_d += c->d;
  }
  RowMatrixXd values(static_cast<Eigen::Index>(ids.size()), total_d);
  Eigen::Index offset = 0;
  for (const auto* c : parts) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto row = c->row(i);
      for (std::uint32_t j = 0; j < c->d; ++j)
        values(static_cast<Eigen::Index>(i), offset + j) = static_cast<double>(row[j]);
    }
    offset += c->d;
  }
  return FeatureMatrix(std::move(values), manifest.label_indices(), manifest.scheme);
}

FeatureMatrix to_feature_matrix(const DescriptorCache& cache, const DatasetManifest& manifest) {
  check_alignment(cache, manifest.ids());
  RowMatrixXd values(cache.n, cache.d);
  for (std::uint32_t i = 0; i < cache.n; ++i)
    for (std::uint32_t j = 0; j < cache.d; ++j) values(i, j) = static_cast<double>(cache.values[static_cast<std::size_t>(i) * cache.d + j]);
  return FeatureMatrix(std::move(values), manifest.label_indices(), manifest.scheme);
}

DescriptorCache to_fused_cache(const FeatureMatrix& fused, const DatasetManifest& manifest) {
  if (static_cast<std::size_t>(fused.n()) != manifest.entries.size())
    throw AlignmentError("fused matrix and manifest differ in length");
  DescriptorCache cache;
  cache.variant = BackboneVariant::fused;
  cache.n = static_cast<std::uint32_t>(fused.n());
  cache.d = static_cast<std::uint32_t>(fused.d());
  cache.values.resize(static_cast<std::size_t>(fused.n() * fused.d()));
  for (Eigen::Index i = 0; i < fused.n(); ++i)
    for (Eigen::Index j = 0; j < fused.d(); ++j)
      cache.values[static_cast<std::size_t>(i * fused.d() + j)] = static_cast<float>(fused.values(i, j));
  cache.ids = manifest.ids();
  return cache;
}

MinMaxScaler fit_scaler(const FeatureMatrix& train) {
  if (train.n() < 1) throw std::invalid_argument("cannot fit a scaler on an empty matrix");
  return {train.values.colwise().minCoeff().transpose(), train.values.colwise().maxCoeff().transpose()};
}

FeatureMatrix apply_scaler(const MinMaxScaler& scaler, const FeatureMatrix& m) {
  if (m.d() != scaler.d())
    throw std::invalid_argument("scaler fitted on " + std::to_string(scaler.d()) + " features, matrix has " +
                                std::to_string(m.d()));
  FeatureMatrix out = m;
  for (Eigen::Index j = 0; j < m.d(); ++j) {
    const double lo = scaler.mins(j);
    const double range = scaler.maxs(j) - lo;
    if (range == 0.0) {
      out.values.col(j).setZero();
    } else {
      out.values.col(j) = (m.values.col(j).array() - lo) / range;
    }
  }
  return out;
}

}  // namespace cervix
