#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cervix_cad/balancing.hpp"
#include "cervix_cad/manifest.hpp"

namespace cervix {

/// Renders every plan entry. Kept originals are passed through by reference
/// (paths rebased onto `out_dir`), augmented images are written under
/// `out_dir/augmented/<label>/`. Output order: kept originals in source order,
/// then augmentations class by class.
///
/// When `source_ids` is given it receives, per output entry, the source
/// manifest path the entry was derived from.
DatasetManifest execute_plan(const BalancingPlan& plan, const DatasetManifest& source,
                             const std::filesystem::path& source_root, const std::filesystem::path& out_dir,
                             std::vector<std::string>* source_ids = nullptr);

struct PrepareOptions {
  std::filesystem::path input_dir;  ///< one subdirectory per label holding PNG/JPEG files
  LabelScheme scheme = LabelScheme::binary;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::optional<double> fallback_crop;  ///< centered ROI fraction for unsegmented inputs
  bool split_before_augment = false;    ///< also write groups.tsv for group-aware folds
};

struct PrepareResult {
  std::filesystem::path manifest_path;
  std::optional<std::filesystem::path> groups_path;
  DatasetManifest manifest;
  BalancingPlan plan;
};

inline constexpr const char* kManifestFile = "manifest.tsv";
inline constexpr const char* kGroupsFile = "groups.tsv";

/// Decode, crop, resize to the model input size, balance, and write the manifest.
PrepareResult prepare_dataset(const PrepareOptions& options);

/// Parses `center:<fraction>`.
double parse_fallback_crop(const std::string& text);

std::vector<std::string> read_groups(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace cervix
