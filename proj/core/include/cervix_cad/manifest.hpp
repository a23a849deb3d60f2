#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cervix_cad/labels.hpp"

namespace cervix {

enum class Provenance { original, augmented };

struct ManifestEntry {
  std::string path;  ///< relative to the manifest's directory
  std::string label;
  Provenance provenance = Provenance::original;
  std::uint64_t seed = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Ordered image list; row order is the sample order for every downstream
/// artifact (descriptor caches, feature matrices).
struct DatasetManifest {
  LabelScheme scheme = LabelScheme::binary;
  std::vector<ManifestEntry> entries;

  std::vector<int> label_indices() const;
  std::vector<std::string> ids() const;
  std::map<std::string, int> class_counts() const;

  /// Throws DataError on labels outside the scheme or duplicate paths.
  void validate() const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// One `<path>\t<label>\t<provenance>\t<seed>` record per line. The scheme is
/// inferred from the labels; an empty manifest needs it passed explicitly.
DatasetManifest parse_manifest(const std::string& text, LabelScheme empty_scheme = LabelScheme::binary);
std::string format_manifest(const DatasetManifest& manifest);

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace cervix
