#include "cervix_cad/manifest.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/error.hpp"

namespace cervix {

std::vector<int> DatasetManifest::label_indices() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(label_index(scheme, e.label));
  return out;
}

std::vector<std::string> DatasetManifest::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.path);
  return out;
}

std::map<std::string, int> DatasetManifest::class_counts() const {
  std::map<std::string, int> counts;
  for (const auto& e : entries) ++counts[e.label];
  return counts;
}

void DatasetManifest::validate() const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    try {
      label_index(scheme, e.label);
    } catch (const std::invalid_argument& ex) {
      throw DataError(std::string("manifest: ") + ex.what());
    }
    if (!seen.insert(e.path).second) throw DataError("manifest: duplicate path " + e.path);
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

LabelScheme scheme_of(const std::string& label, int line_no) {
  if (label == "normal" || label == "abnormal") return LabelScheme::binary;
  if (label == "type1" || label == "type2" || label == "type3") return LabelScheme::ternary;
  throw DataError("manifest line " + std::to_string(line_no) + ": unknown label '" + label + "'");
}

}  // namespace

DatasetManifest parse_manifest(const std::string& text, LabelScheme empty_scheme) {
  DatasetManifest m;
  m.scheme = empty_scheme;
  bool scheme_set = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 4) throw DataError("manifest line " + std::to_string(line_no) + ": expected 4 tab-separated fields");
    ManifestEntry e;
    e.path = f[0];
    e.label = f[1];
    if (f[2] == "original") {
      e.provenance = Provenance::original;
    } else if (f[2] == "augmented") {
      e.provenance = Provenance::augmented;
    } else {
      throw DataError("manifest line " + std::to_string(line_no) + ": bad provenance '" + f[2] + "'");
    }
    const auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), e.seed);
    if (ec != std::errc{} || ptr != f[3].data() + f[3].size())
      throw DataError("manifest line " + std::to_string(line_no) + ": bad seed '" + f[3] + "'");
    const auto s = scheme_of(e.label, line_no);
    if (scheme_set && s != m.scheme)
      throw DataError("manifest line " + std::to_string(line_no) + ": label '" + e.label + "' mixes label schemes");
    m.scheme = s;
    scheme_set = true;
    m.entries.push_back(std::move(e));
  }
  m.validate();
  return m;
}

std::string format_manifest(const DatasetManifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    out += e.path;
    out += '\t';
    out += e.label;
    out += '\t';
    out += e.provenance == Provenance::original ? "original" : "augmented";
    out += '\t';
    out += std::to_string(e.seed);
    out += '\n';
  }
  return out;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  try {
    return parse_manifest(std::string(bytes.begin(), bytes.end()));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  manifest.validate();
  io::write_file_atomic(path, format_manifest(manifest));
}

}  // namespace cervix
