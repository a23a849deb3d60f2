#include "cervix_cad/prepare.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/error.hpp"
#include "cervix_cad/image_io.hpp"

namespace fs = std::filesystem;

namespace cervix {
namespace {

std::string rebase(const std::string& path, const fs::path& source_root, const fs::path& out_dir) {
  std::error_code ec;
  if (fs::equivalent(source_root, out_dir, ec)) return path;
  const auto abs = fs::weakly_canonical(source_root / path);
  return fs::relative(abs, fs::weakly_canonical(out_dir)).generic_string();
}

std::string index_suffix(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_a%05zu", i);
  return buf;
}

}  // namespace

DatasetManifest execute_plan(const BalancingPlan& plan, const DatasetManifest& source, const fs::path& source_root,
                             const fs::path& out_dir, std::vector<std::string>* source_ids) {
  // Source entries per label, in manifest order.
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < source.entries.size(); ++i) by_label[source.entries[i].label].push_back(i);

  std::set<std::size_t> kept;
  for (const auto& cp : plan.classes) {
    const auto& members = by_label[cp.label];
    if (static_cast<int>(members.size()) != cp.source_count)
      throw DataError("plan expects " + std::to_string(cp.source_count) + " '" + cp.label + "' images, manifest has " +
                      std::to_string(members.size()));
    for (const auto& e : cp.entries) {
      if (e.source < 0 || e.source >= cp.source_count)
        throw DataError("plan entry references missing source " + std::to_string(e.source) + " of class " + cp.label);
      if (e.is_original()) kept.insert(members[static_cast<std::size_t>(e.source)]);
    }
  }

  DatasetManifest out;
  out.scheme = source.scheme;
  if (source_ids) source_ids->clear();
  for (std::size_t i = 0; i < source.entries.size(); ++i) {
    if (!kept.count(i)) continue;
    auto e = source.entries[i];
    e.path = rebase(e.path, source_root, out_dir);
    out.entries.push_back(e);
    if (source_ids) source_ids->push_back(source.entries[i].path);
  }

  for (const auto& cp : plan.classes) {
    const auto& members = by_label[cp.label];
    std::map<int, ImageRgb> decoded;
    for (std::size_t j = 0; j < cp.entries.size(); ++j) {
      const auto& pe = cp.entries[j];
      if (pe.is_original()) continue;
      const auto& src = source.entries[members[static_cast<std::size_t>(pe.source)]];
      auto it = decoded.find(pe.source);
      if (it == decoded.end()) it = decoded.emplace(pe.source, read_image(source_root / src.path)).first;
      const auto rel = fs::path("augmented") / cp.label / (fs::path(src.path).stem().string() + index_suffix(j) + ".png");
      try {
        write_png(out_dir / rel, apply_chain(it->second, pe.chain));
      } catch (const DataError& e) {
        throw DataError((out_dir / rel).string() + ": " + e.what());
      }
      out.entries.push_back({rel.generic_string(), cp.label, Provenance::augmented, pe.seed});
      if (source_ids) source_ids->push_back(src.path);
    }
  }
  out.validate();
  return out;
}

double parse_fallback_crop(const std::string& text) {
  constexpr std::string_view prefix = "center:";
  if (text.rfind(prefix, 0) != 0) throw std::invalid_argument("fallback crop must look like center:<fraction>");
  double frac = 0;
  try {
    std::size_t used = 0;
    frac = std::stod(text.substr(prefix.size()), &used);
    if (used != text.size() - prefix.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad crop fraction in '" + text + "'");
  }
  if (!(frac > 0.0 && frac <= 1.0)) throw std::invalid_argument("crop fraction must be in (0, 1]");
  return frac;
}

PrepareResult prepare_dataset(const PrepareOptions& options) {
  if (!fs::is_directory(options.input_dir)) throw FileNotFoundError("input directory not found: " + options.input_dir.string());
  fs::create_directories(options.out_dir);

  DatasetManifest source;
  source.scheme = options.scheme;
  for (const auto label_view : class_labels(options.scheme)) {
    const std::string label(label_view);
    const auto dir = options.input_dir / label;
    std::vector<fs::path> files;
    if (fs::is_directory(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(entry.path());
      }
    }
    if (files.empty()) throw DataError("class '" + label + "' has no images under " + dir.string());
    std::sort(files.begin(), files.end());
    std::set<std::string> stems;
    for (const auto& file : files) {
      const auto stem = file.stem().string();
      if (!stems.insert(stem).second) throw DataError("two inputs share the name '" + stem + "' in " + dir.string());
      ImageRgb img = read_image(file);
      if (options.fallback_crop) img = center_crop(img, *options.fallback_crop);
      img = resize_image(img, kModelInputSize, kModelInputSize);
      const auto rel = fs::path("images") / label / (stem + ".png");
      write_png(options.out_dir / rel, img);
      source.entries.push_back({rel.generic_string(), label, Provenance::original, 0});
    }
  }

  PrepareResult result;
  result.plan = plan_balancing(source.class_counts(), options.scheme, options.seed);
  std::vector<std::string> groups;
  result.manifest = execute_plan(result.plan, source, options.out_dir, options.out_dir, &groups);
  result.manifest_path = options.out_dir / kManifestFile;
  write_manifest(result.manifest_path, result.manifest);
  if (options.split_before_augment) {
    std::string text;
    for (std::size_t i = 0; i < groups.size(); ++i) text += result.manifest.entries[i].path + '\t' + groups[i] + '\n';
    result.groups_path = options.out_dir / kGroupsFile;
    io::write_file_atomic(*result.groups_path, text);
  }
  return result;
}

std::vector<std::string> read_groups(const fs::path& path, const DatasetManifest& manifest) {
  const auto bytes = io::read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::map<std::string, std::string> lookup;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path.string() + ": expected <path>\\t<group> records");
    lookup[line.substr(0, tab)] = line.substr(tab + 1);
  }
  std::vector<std::string> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    const auto it = lookup.find(e.path);
    if (it == lookup.end()) throw AlignmentError(path.string() + ": no group for " + e.path);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace cervix
