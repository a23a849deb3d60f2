#include "cervix_cad/descriptors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cervix_cad/error.hpp"
#include "cervix_cad/image_io.hpp"

namespace cervix {

BackboneVariant parse_variant(std::string_view text) {
  if (text == "rn50") return BackboneVariant::rn50;
  if (text == "rn101") return BackboneVariant::rn101;
  if (text == "rn152") return BackboneVariant::rn152;
  if (text == "fused") return BackboneVariant::fused;
  throw std::invalid_argument("unknown backbone variant '" + std::string(text) + "'");
}

std::string_view variant_name(BackboneVariant v) {
  switch (v) {
    case BackboneVariant::rn50: return "rn50";
    case BackboneVariant::rn101: return "rn101";
    case BackboneVariant::rn152: return "rn152";
    case BackboneVariant::fused: return "fused";
  }
  return "?";
}

namespace {

std::array<float, 3> parse_triplet(const std::string& text, const char* key) {
  std::array<float, 3> out{};
  std::istringstream in(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(in, item, ',')) {
    if (k == 3) throw DataError(std::string("metadata ") + key + " must hold three values");
    try {
      out[k++] = std::stof(item);
    } catch (const std::exception&) {
      throw DataError(std::string("metadata ") + key + " is not numeric: " + text);
    }
  }
  if (k != 3) throw DataError(std::string("metadata ") + key + " must hold three values");
  return out;
}

bool batch_dim_ok(std::int64_t d) { return d == 1 || d == -1; }

std::string shape_string(const std::vector<std::int64_t>& s) {
  std::string out = "(";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? ", " : "") + (s[k] < 0 ? std::string("?") : std::to_string(s[k]));
  return out + ")";
}

}  // namespace

Backbone load_backbone(const std::filesystem::path& path, BackboneVariant variant) {
  if (variant == BackboneVariant::fused) throw std::invalid_argument("fused is not a backbone variant");
  Backbone b{variant, onnx::Graph::load(path), {}, {}};
  b.mean = {0.0f, 0.0f, 0.0f};
  b.stddev = {1.0f, 1.0f, 1.0f};

  const auto& out = b.graph.output_shape();
  if (out.size() != 2 || !batch_dim_ok(out[0]) || out[1] != static_cast<std::int64_t>(kDescriptorLength)) {
    throw ShapeMismatchError(path.string() + ": graph output is " + shape_string(out) + ", expected (1, " +
                             std::to_string(kDescriptorLength) + "); was the classification head removed?");
  }
  const auto& in = b.graph.input_shape();
  if (in.size() != 4 || !batch_dim_ok(in[0]) || in[1] != 3 || in[2] != kModelInputSize || in[3] != kModelInputSize) {
    throw ShapeMismatchError(path.string() + ": graph input is " + shape_string(in) + ", expected (1, 3, 224, 224)");
  }
  const auto& meta = b.graph.metadata();
  if (const auto it = meta.find(kInputMeanKey); it != meta.end()) b.mean = parse_triplet(it->second, kInputMeanKey);
  if (const auto it = meta.find(kInputStdKey); it != meta.end()) b.stddev = parse_triplet(it->second, kInputStdKey);
  for (float s : b.stddev)
    if (!(s > 0.0f)) throw DataError(path.string() + ": input std must be positive");
  return b;
}

DescriptorVector extract(const Backbone& backbone, const ImageRgb& img, std::string image_id) {
  if (img.width() != kModelInputSize || img.height() != kModelInputSize) {
    throw std::invalid_argument("descriptor extraction needs a 224x224 image, got " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()));
  }
  constexpr std::size_t plane = static_cast<std::size_t>(kModelInputSize) * kModelInputSize;
  onnx::Tensor input = onnx::Tensor::zeros({1, 3, kModelInputSize, kModelInputSize});
  const auto px = img.data();
  for (std::size_t p = 0; p < plane; ++p)
    for (std::size_t c = 0; c < 3; ++c)
      input.f[c * plane + p] = (static_cast<float>(px[p * 3 + c]) / 255.0f - backbone.mean[c]) / backbone.stddev[c];

  const onnx::Tensor out = backbone.graph.run(input);
  if (out.numel() != kDescriptorLength)
    throw ShapeMismatchError("graph produced " + std::to_string(out.numel()) + " values, expected 2048");
  for (float v : out.f)
    if (!std::isfinite(v)) throw NumericalError("non-finite descriptor component for " + image_id);
  return {out.f, backbone.variant, std::move(image_id)};
}

DescriptorCache extract_all(const Backbone& backbone, const DatasetManifest& manifest,
                            const std::filesystem::path& manifest_root, const std::filesystem::path& cache_path) {
  const auto ids = manifest.ids();
  if (std::filesystem::exists(cache_path)) {
    DescriptorCache existing = read_cache(cache_path);
    if (existing.variant != backbone.variant)
      throw CacheInvalidError(cache_path.string() + ": cache holds " + std::string(variant_name(existing.variant)) +
                              " descriptors, expected " + std::string(variant_name(backbone.variant)));
    if (existing.ids != ids)
      throw CacheInvalidError(cache_path.string() + ": cache index does not match the manifest; delete it to re-extract");
    return existing;
  }

  DescriptorCache cache;
  cache.variant = backbone.variant;
  cache.n = static_cast<std::uint32_t>(ids.size());
  cache.d = kDescriptorLength;
  cache.values.reserve(ids.size() * kDescriptorLength);
  for (const auto& id : ids) {
    const auto desc = extract(backbone, read_image(manifest_root / id), id);
    cache.values.insert(cache.values.end(), desc.values.begin(), desc.values.end());
  }
  cache.ids = ids;
  write_cache(cache_path, cache);
  return cache;
}

}  // namespace cervix
