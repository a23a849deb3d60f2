#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cervix_cad/image.hpp"
#include "cervix_cad/manifest.hpp"
#include "cervix_cad/onnx_graph.hpp"

namespace cervix {

inline constexpr std::size_t kDescriptorLength = 2048;

/// Backbone family member; the numeric values are the cache variant codes.
enum class BackboneVariant : std::uint8_t { rn50 = 0, rn101 = 1, rn152 = 2, fused = 3 };

BackboneVariant parse_variant(std::string_view text);
std::string_view variant_name(BackboneVariant v);

inline constexpr std::array<BackboneVariant, 3> kBackbones = {BackboneVariant::rn50, BackboneVariant::rn101,
                                                               BackboneVariant::rn152};

/// Metadata keys an export may use to carry input normalization constants.
inline constexpr const char* kInputMeanKey = "cervix.input_mean";
inline constexpr const char* kInputStdKey = "cervix.input_std";

/// Head-removed residual network loaded for inference. Pixels are divided by
/// 255, then normalized by the per-channel mean/std found in the graph
/// metadata (identity when the graph folds normalization into its nodes).
struct Backbone {
  BackboneVariant variant = BackboneVariant::rn50;
  onnx::Graph graph;
  std::array<float, 3> mean = {0.0f, 0.0f, 0.0f};
  std::array<float, 3> stddev = {1.0f, 1.0f, 1.0f};
};

/// Throws FileNotFoundError, DataError on parse failure, ShapeMismatchError
/// unless the graph declares a (1|batch, 3, 224, 224) input and a
/// (1|batch, 2048) output.
Backbone load_backbone(const std::filesystem::path& path, BackboneVariant variant);

struct DescriptorVector {
  std::vector<float> values;
  BackboneVariant source_variant = BackboneVariant::rn50;
  std::string image_id;
};

/// Requires a 224x224 image; throws NumericalError on non-finite output.
DescriptorVector extract(const Backbone& backbone, const ImageRgb& img, std::string image_id = {});

/// Float32 descriptor matrix with an embedded id index, row i <-> id i.
struct DescriptorCache {
  BackboneVariant variant = BackboneVariant::rn50;
  std::uint32_t n = 0;
  std::uint32_t d = kDescriptorLength;
  std::vector<float> values;  ///< n*d, row-major
  std::vector<std::string> ids;

  std::span<const float> row(std::size_t i) const { return {values.data() + i * d, d}; }

  friend bool operator==(const DescriptorCache&, const DescriptorCache&) = default;
};

/// `CDC1`, u8 variant, u32 n, u32 d, n*d float32, then n (u32 length, UTF-8 id).
std::vector<std::uint8_t> encode_cache(const DescriptorCache& cache);
DescriptorCache decode_cache(std::span<const std::uint8_t> bytes);
void write_cache(const std::filesystem::path& path, const DescriptorCache& cache);
/// Throws CacheInvalidError on a bad header or truncated body.
DescriptorCache read_cache(const std::filesystem::path& path);

/// Extracts every manifest image (paths relative to `manifest_root`) into
/// `cache_path`. An existing cache is validated against the manifest and
/// returned as-is; one that fails validation raises CacheInvalidError rather
/// than being recomputed.
DescriptorCache extract_all(const Backbone& backbone, const DatasetManifest& manifest,
                            const std::filesystem::path& manifest_root, const std::filesystem::path& cache_path);

}  // namespace cervix
