#pragma once

#include <cstdint>
#include <filesystem>

#include "cervix_cad/descriptors.hpp"
#include "cervix_cad/labels.hpp"
#include "cervix_cad/manifest.hpp"

namespace cervix {

/// Gaussian-blob stand-in for the three backbone descriptor sets.
struct SynthOptions {
  LabelScheme scheme = LabelScheme::ternary;
  int per_class = 300;
  int block_dim = static_cast<int>(kDescriptorLength);
  /// Dimensions whose class means differ, spread evenly over the three
  /// blocks. 0 means every dimension is informative.
  int informative_dims = 0;
  /// Smallest pairwise distance between class means, in units of noise_std.
  double separation = 10.0;
  double noise_std = 1.0;
  std::uint64_t seed = 0;
};

struct SynthDataset {
  DatasetManifest manifest;
  DescriptorCache rn50;
  DescriptorCache rn101;
  DescriptorCache rn152;

  const DescriptorCache& cache(BackboneVariant v) const;
};

SynthDataset generate_synthetic(const SynthOptions& options);

/// Conventional cache file name inside a descriptor directory, e.g. `rn50.cdc`.
std::string cache_file_name(BackboneVariant v);

/// Writes manifest.tsv and the three caches into `out_dir`.
void write_synthetic(const SynthDataset& data, const std::filesystem::path& out_dir);

}  // namespace cervix
