#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/config.hpp"
#include "cervix_cad/error.hpp"
#include "cervix_cad/prepare.hpp"

namespace cervix {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::uint64_t to_u64(const std::string& v, const std::string& key, int line) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key + " expects an unsigned integer, got '" + v + "'", line);
  return out;
}

int to_int(const std::string& v, const std::string& key, int line) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key + " expects an integer, got '" + v + "'", line);
  return out;
}

double to_double(const std::string& v, const std::string& key, int line) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out))
    throw ConfigError(key + " expects a number, got '" + v + "'", line);
  return out;
}

bool to_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key + " expects true or false, got '" + v + "'", line);
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Raw {
  std::string value;
  int line = 0;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "scheme",        "seed",          "output_dir",         "dataset_dir",       "model_rn50",
      "model_rn101",   "model_rn152",   "k",                  "variants",          "c",
      "gamma",         "fallback_crop", "split_before_augment", "per_fold_mean",   "synthetic",
      "synth_per_class", "synth_block_dim", "synth_informative_dims", "synth_separation", "synth_noise_std"};
  return keys;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  std::map<std::string, Raw> raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (!known_keys().contains(key)) throw ConfigError("unknown key '" + key + "'", line_no);
    if (value.empty()) throw ConfigError("key '" + key + "' has an empty value", line_no);
    if (raw.contains(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
    raw[key] = {value, line_no};
  }
  const int end_line = std::max(line_no, 1);

  auto has = [&](const char* key) { return raw.contains(key); };
  auto require = [&](const char* key) -> const Raw& {
    if (!has(key)) throw ConfigError(std::string("missing mandatory key '") + key + "'", end_line);
    return raw.at(key);
  };
  auto resolve_path = [&](const std::string& v) {
    const std::filesystem::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };
  auto existing_path = [&](const char* key) {
    const Raw& r = raw.at(key);
    const auto p = resolve_path(r.value);
    if (!std::filesystem::exists(p)) throw ConfigError(std::string(key) + " '" + r.value + "' does not exist", r.line);
    return p;
  };

  ExperimentConfig cfg;
  {
    const Raw& r = require("scheme");
    try {
      cfg.scheme = parse_scheme(r.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), r.line);
    }
  }
  {
    const Raw& r = require("seed");
    cfg.seed = to_u64(r.value, "seed", r.line);
  }
  cfg.output_dir = resolve_path(require("output_dir").value);
  if (has("synthetic")) cfg.synthetic = to_bool(raw["synthetic"].value, "synthetic", raw["synthetic"].line);

  if (has("k")) {
    const Raw& r = raw["k"];
    cfg.ks.clear();
    for (const auto& item : split_list(r.value)) {
      const int k = to_int(item, "k", r.line);
      if (k < 2) throw ConfigError("k values must be at least 2", r.line);
      cfg.ks.push_back(k);
    }
  }
  if (has("variants")) {
    const Raw& r = raw["variants"];
    cfg.variants.clear();
    for (const auto& item : split_list(r.value)) {
      try {
        cfg.variants.push_back(parse_pipeline_variant(item));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), r.line);
      }
    }
  }
  if (has("c")) {
    const Raw& r = raw["c"];
    cfg.c = to_double(r.value, "c", r.line);
    if (!(cfg.c > 0.0)) throw ConfigError("c must be positive, got " + r.value, r.line);
  }
  if (has("gamma")) {
    const Raw& r = raw["gamma"];
    cfg.gamma = to_double(r.value, "gamma", r.line);
    if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw ConfigError("gamma must lie in [0, 1], got " + r.value, r.line);
  }
  if (has("fallback_crop")) {
    const Raw& r = raw["fallback_crop"];
    try {
      cfg.fallback_crop = parse_fallback_crop(r.value);
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), r.line);
    }
  }
  for (const char* key : {"split_before_augment", "per_fold_mean"}) {
    if (!has(key)) continue;
    const bool v = to_bool(raw[key].value, key, raw[key].line);
    (std::string(key) == "per_fold_mean" ? cfg.per_fold_mean : cfg.split_before_augment) = v;
  }

  cfg.synth.scheme = cfg.scheme;
  cfg.synth.seed = cfg.seed;
  if (has("synth_per_class")) {
    const Raw& r = raw["synth_per_class"];
    cfg.synth.per_class = to_int(r.value, "synth_per_class", r.line);
    if (cfg.synth.per_class < 1) throw ConfigError("synth_per_class must be positive", r.line);
  }
  if (has("synth_block_dim")) {
    const Raw& r = raw["synth_block_dim"];
    cfg.synth.block_dim = to_int(r.value, "synth_block_dim", r.line);
    if (cfg.synth.block_dim < 1) throw ConfigError("synth_block_dim must be positive", r.line);
  }
  if (has("synth_informative_dims")) {
    const Raw& r = raw["synth_informative_dims"];
    cfg.synth.informative_dims = to_int(r.value, "synth_informative_dims", r.line);
    if (cfg.synth.informative_dims < 0 || cfg.synth.informative_dims > 3 * cfg.synth.block_dim)
      throw ConfigError("synth_informative_dims must lie in [0, 3 * synth_block_dim]", r.line);
  }
  if (has("synth_separation")) {
    const Raw& r = raw["synth_separation"];
    cfg.synth.separation = to_double(r.value, "synth_separation", r.line);
    if (cfg.synth.separation < 0.0) throw ConfigError("synth_separation must be non-negative", r.line);
  }
  if (has("synth_noise_std")) {
    const Raw& r = raw["synth_noise_std"];
    cfg.synth.noise_std = to_double(r.value, "synth_noise_std", r.line);
    if (!(cfg.synth.noise_std > 0.0)) throw ConfigError("synth_noise_std must be positive", r.line);
  }

  if (!cfg.synthetic) {
    require("dataset_dir");
    cfg.dataset_dir = existing_path("dataset_dir");
    for (const auto v : kBackbones) {
      const std::string key = "model_" + std::string(variant_name(v));
      require(key.c_str());
      cfg.models[v] = existing_path(key.c_str());
    }
  }

  // Canonical listing: every key in a fixed order with defaults filled in.
  auto literal = [&](const char* key, const std::string& fallback) {
    return has(key) ? raw.at(key).value : fallback;
  };
  std::ostringstream os;
  os << "scheme = " << scheme_name(cfg.scheme) << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "output_dir = " << raw.at("output_dir").value << "\n";
  os << "synthetic = " << (cfg.synthetic ? "true" : "false") << "\n";
  if (cfg.synthetic) {
    os << "synth_per_class = " << cfg.synth.per_class << "\n";
    os << "synth_block_dim = " << cfg.synth.block_dim << "\n";
    os << "synth_informative_dims = " << cfg.synth.informative_dims << "\n";
    os << "synth_separation = " << fmt_double(cfg.synth.separation) << "\n";
    os << "synth_noise_std = " << fmt_double(cfg.synth.noise_std) << "\n";
  } else {
    os << "dataset_dir = " << raw.at("dataset_dir").value << "\n";
    for (const auto v : kBackbones) {
      const std::string key = "model_" + std::string(variant_name(v));
      os << key << " = " << raw.at(key).value << "\n";
    }
    os << "fallback_crop = " << literal("fallback_crop", "none") << "\n";
    os << "split_before_augment = " << (cfg.split_before_augment ? "true" : "false") << "\n";
  }
  os << "k = ";
  for (std::size_t i = 0; i < cfg.ks.size(); ++i) os << (i ? "," : "") << cfg.ks[i];
  os << "\nvariants = ";
  for (std::size_t i = 0; i < cfg.variants.size(); ++i) os << (i ? "," : "") << pipeline_variant_name(cfg.variants[i]);
  os << "\nc = " << fmt_double(cfg.c) << "\n";
  os << "gamma = " << fmt_double(cfg.gamma) << "\n";
  os << "per_fold_mean = " << (cfg.per_fold_mean ? "true" : "false") << "\n";
  cfg.resolved = os.str();
  return cfg;
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file " + path.string() + " not found");
  const auto bytes = io::read_file(path);
  const std::string text(bytes.begin(), bytes.end());
  return parse_config(text, path.parent_path());
}

}  // namespace cervix
