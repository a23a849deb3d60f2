#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "cervix_cad/error.hpp"
#include "cervix_cad/prepare.hpp"
#include "cervix_cad/rng.hpp"
#include "cervix_cad/synth.hpp"

namespace cervix {

const DescriptorCache& SynthDataset::cache(BackboneVariant v) const {
  switch (v) {
    case BackboneVariant::rn50: return rn50;
    case BackboneVariant::rn101: return rn101;
    case BackboneVariant::rn152: return rn152;
    case BackboneVariant::fused: break;
  }
  throw std::invalid_argument("synthetic data has no fused cache");
}

std::string cache_file_name(BackboneVariant v) { return std::string(variant_name(v)) + ".cdc"; }

SynthDataset generate_synthetic(const SynthOptions& o) {
  if (o.per_class < 1) throw std::invalid_argument("per_class must be positive");
  if (o.block_dim < 1) throw std::invalid_argument("block_dim must be positive");
  if (!(o.noise_std > 0.0) || !std::isfinite(o.noise_std)) throw std::invalid_argument("noise_std must be positive");
  if (!(o.separation >= 0.0) || !std::isfinite(o.separation)) throw std::invalid_argument("separation must be >= 0");
  const int total_dim = 3 * o.block_dim;
  const int informative = o.informative_dims == 0 ? total_dim : o.informative_dims;
  if (informative < 0 || informative > total_dim)
    throw std::invalid_argument("informative_dims must lie in [0, 3 * block_dim]");

  // Informative positions: spread evenly inside each block, remainder to the
  // leading blocks.
  std::vector<int> positions;
  for (int b = 0; b < 3; ++b) {
    const int count = informative / 3 + (b < informative % 3 ? 1 : 0);
    for (int j = 0; j < count; ++j)
      positions.push_back(b * o.block_dim + static_cast<int>(static_cast<long long>(j) * o.block_dim / count));
  }

  const int C = class_count(o.scheme);
  Rng rng(mix_seed(o.seed, 0x5e7));
  std::vector<std::vector<double>> means(static_cast<std::size_t>(C), std::vector<double>(positions.size()));
  for (auto& m : means)
    for (auto& v : m) v = rng.normal();

  // Rescale about the centroid so the closest pair sits exactly at the
  // requested distance.
  std::vector<double> centroid(positions.size(), 0.0);
  for (const auto& m : means)
    for (std::size_t j = 0; j < m.size(); ++j) centroid[j] += m[j] / C;
  double min_dist = std::numeric_limits<double>::infinity();
  for (int a = 0; a < C; ++a)
    for (int b = a + 1; b < C; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < positions.size(); ++j) {
        const double diff = means[a][j] - means[b][j];
        s += diff * diff;
      }
      min_dist = std::min(min_dist, std::sqrt(s));
    }
  if (!(min_dist > 0.0)) throw NumericalError("synthetic class means coincide");
  const double scale = o.separation * o.noise_std / min_dist;
  for (auto& m : means)
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = centroid[j] + (m[j] - centroid[j]) * scale;

  SynthDataset data;
  data.manifest.scheme = o.scheme;
  DescriptorCache* blocks[3] = {&data.rn50, &data.rn101, &data.rn152};
  for (int b = 0; b < 3; ++b) {
    blocks[b]->variant = kBackbones[static_cast<std::size_t>(b)];
    blocks[b]->n = static_cast<std::uint32_t>(C * o.per_class);
    blocks[b]->d = static_cast<std::uint32_t>(o.block_dim);
    blocks[b]->values.reserve(static_cast<std::size_t>(C) * o.per_class * o.block_dim);
  }

  std::vector<double> row(static_cast<std::size_t>(total_dim));
  for (int c = 0; c < C; ++c) {
    const std::string label(label_name(o.scheme, c));
    for (int i = 0; i < o.per_class; ++i) {
      for (auto& v : row) v = o.noise_std * rng.normal();
      for (std::size_t j = 0; j < positions.size(); ++j) row[static_cast<std::size_t>(positions[j])] += means[c][j];
      for (int b = 0; b < 3; ++b)
        for (int j = 0; j < o.block_dim; ++j)
          blocks[b]->values.push_back(static_cast<float>(row[static_cast<std::size_t>(b * o.block_dim + j)]));

      char name[64];
      std::snprintf(name, sizeof(name), "synthetic/%s/%s_%05d", label.c_str(), label.c_str(), i);
      data.manifest.entries.push_back({name, label, Provenance::original, o.seed});
      for (auto* cache : blocks) cache->ids.push_back(name);
    }
  }
  return data;
}

void write_synthetic(const SynthDataset& data, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_manifest(out_dir / kManifestFile, data.manifest);
  for (const auto v : kBackbones) write_cache(out_dir / cache_file_name(v), data.cache(v));
}

}  // namespace cervix
