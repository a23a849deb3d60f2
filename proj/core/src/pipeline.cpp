#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <sstream>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/error.hpp"
#include "cervix_cad/fusion.hpp"
#include "cervix_cad/pipeline.hpp"
#include "cervix_cad/prepare.hpp"

namespace cervix {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file_hex(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return sha256_hex(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const NumericalError&) {
    return kExitNumerical;
  } catch (const std::exception&) {
    return kExitData;
  }
}

namespace {

std::string read_text(const std::filesystem::path& p) {
  const auto bytes = io::read_file(p);
  return {bytes.begin(), bytes.end()};
}

[[noreturn]] void rethrow_in_stage(const std::string& stage) {
  const std::string prefix = "stage '" + stage + "' failed: ";
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const std::exception& e) {
    throw DataError(prefix + e.what());
  }
}

class StageRunner {
 public:
  StageRunner(PipelineResult& result, const std::function<void(std::string_view)>& log) : result_(result), log_(log) {}

  /// Returns the stage stamp for downstream hashing.
  std::string run(const std::string& name, const std::filesystem::path& dir, const std::string& inputs,
                  const std::function<bool()>& outputs_valid, const std::function<void()>& body) {
    const std::string stamp = sha256_hex(name + "\n" + inputs);
    const auto stamp_path = dir / ("." + name + ".stamp");
    const auto stale_path = dir / ("." + name + ".stale");
    bool up_to_date = false;
    if (std::filesystem::exists(stamp_path)) {
      try {
        up_to_date = read_text(stamp_path) == stamp + "\n" && outputs_valid();
      } catch (const std::exception&) {
        up_to_date = false;
      }
    }
    if (up_to_date) {
      result_.stages.push_back({name, true});
      if (log_) log_(name + ": up to date, skipped");
      return stamp;
    }
    try {
      std::filesystem::create_directories(dir);
      std::filesystem::remove(stamp_path);
      if (log_) log_(name + ": running");
      body();
      io::write_file_atomic(stamp_path, stamp + "\n");
      std::filesystem::remove(stale_path);
    } catch (...) {
      std::string why = "unknown error";
      try {
        throw;
      } catch (const std::exception& e) {
        why = e.what();
      } catch (...) {
      }
      try {
        std::filesystem::create_directories(dir);
        io::write_file_atomic(stale_path, why + "\n");
      } catch (...) {
      }
      rethrow_in_stage(name);
    }
    result_.stages.push_back({name, false});
    return stamp;
  }

 private:
  PipelineResult& result_;
  const std::function<void(std::string_view)>& log_;
};

bool cache_matches(const std::filesystem::path& path, const DatasetManifest& manifest, BackboneVariant variant) {
  const DescriptorCache cache = read_cache(path);
  return cache.variant == variant && cache.ids == manifest.ids();
}

std::string dataset_listing(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += std::filesystem::relative(f, root).generic_string() + " " + sha256_file_hex(f) + "\n";
  return out;
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg, const std::function<void(std::string_view)>& log) {
  PipelineResult result;
  StageRunner runner(result, log);
  const auto data_dir = cfg.output_dir / "data";
  const auto desc_dir = cfg.synthetic ? data_dir : cfg.output_dir / "descriptors";
  const auto fused_dir = cfg.output_dir / "fused";
  const auto report_dir = cfg.output_dir / "reports";
  const auto manifest_path = data_dir / kManifestFile;
  const auto fused_path = fused_dir / "fused.cdc";
  result.tsv = report_dir / "metrics.tsv";
  result.svg = report_dir / "metrics.svg";
  result.text = report_dir / "metrics.txt";

  auto manifest_valid = [&] {
    const DatasetManifest m = read_manifest(manifest_path);
    m.validate();
    return m.scheme == cfg.scheme && !m.entries.empty();
  };

  std::string upstream;
  if (cfg.synthetic) {
    std::ostringstream in;
    in << cfg.resolved.substr(0, cfg.resolved.find("k = "));
    upstream = runner.run(
        "synth", data_dir, in.str(),
        [&] {
          if (!manifest_valid()) return false;
          const DatasetManifest m = read_manifest(manifest_path);
          for (const auto v : kBackbones)
            if (!cache_matches(desc_dir / cache_file_name(v), m, v)) return false;
          return true;
        },
        [&] { write_synthetic(generate_synthetic(cfg.synth), data_dir); });
  } else {
    std::ostringstream in;
    in << "scheme=" << scheme_name(cfg.scheme) << "\nseed=" << cfg.seed << "\ncrop="
       << (cfg.fallback_crop ? std::to_string(*cfg.fallback_crop) : "none")
       << "\nsplit_before_augment=" << cfg.split_before_augment << "\n"
       << dataset_listing(cfg.dataset_dir);
    const std::string data_stamp = runner.run(
        "prepare", data_dir, in.str(),
        [&] {
          if (!manifest_valid()) return false;
          const DatasetManifest m = read_manifest(manifest_path);
          for (const auto& e : m.entries)
            if (!std::filesystem::exists(data_dir / e.path)) return false;
          return !cfg.split_before_augment || std::filesystem::exists(data_dir / kGroupsFile);
        },
        [&] {
          PrepareOptions opt;
          opt.input_dir = cfg.dataset_dir;
          opt.scheme = cfg.scheme;
          opt.seed = cfg.seed;
          opt.out_dir = data_dir;
          opt.fallback_crop = cfg.fallback_crop;
          opt.split_before_augment = cfg.split_before_augment;
          prepare_dataset(opt);
        });

    std::string models = data_stamp + "\n";
    for (const auto v : kBackbones) models += std::string(variant_name(v)) + " " + sha256_file_hex(cfg.models.at(v)) + "\n";
    upstream = runner.run(
        "extract", desc_dir, models,
        [&] {
          const DatasetManifest m = read_manifest(manifest_path);
          for (const auto v : kBackbones)
            if (!cache_matches(desc_dir / cache_file_name(v), m, v)) return false;
          return true;
        },
        [&] {
          const DatasetManifest m = read_manifest(manifest_path);
          for (const auto v : kBackbones) {
            const auto cache_path = desc_dir / cache_file_name(v);
            std::filesystem::remove(cache_path);  // stale inputs: never reuse
            const Backbone backbone = load_backbone(cfg.models.at(v), v);
            extract_all(backbone, m, data_dir, cache_path);
          }
        });
  }

  const std::string fused_stamp = runner.run(
      "fuse", fused_dir, upstream + "\n", [&] { return cache_matches(fused_path, read_manifest(manifest_path), BackboneVariant::fused); },
      [&] {
        const DatasetManifest m = read_manifest(manifest_path);
        const FeatureMatrix fused = fuse(read_cache(desc_dir / cache_file_name(BackboneVariant::rn50)),
                                         read_cache(desc_dir / cache_file_name(BackboneVariant::rn101)),
                                         read_cache(desc_dir / cache_file_name(BackboneVariant::rn152)), m);
        write_cache(fused_path, to_fused_cache(fused, m));
      });

  const std::string eval_inputs = fused_stamp + "\n" + cfg.resolved.substr(cfg.resolved.find("k = ")) +
                                  "seed = " + std::to_string(cfg.seed) + "\n";
  const std::string eval_stamp = runner.run(
      "evaluate", report_dir, eval_inputs,
      [&] {
        parse_tsv(read_text(result.tsv), cfg.scheme);
        return true;
      },
      [&] {
        const DatasetManifest m = read_manifest(manifest_path);
        const FeatureMatrix fused = to_feature_matrix(read_cache(fused_path), m);
        ExperimentOptions opt;
        opt.ks = cfg.ks;
        opt.variants = cfg.variants;
        opt.seed = cfg.seed;
        opt.svm.c = cfg.c;
        opt.lda_shrinkage = cfg.gamma;
        opt.per_fold_mean = cfg.per_fold_mean;
        if (!cfg.synthetic && cfg.split_before_augment) opt.groups = read_groups(data_dir / kGroupsFile, m);
        emit_report(run_experiment(fused, opt), ReportFormat::tsv, result.tsv);
      });

  runner.run(
      "report", report_dir, eval_stamp + "\n" + cfg.resolved,
      [&] { return std::filesystem::exists(result.svg) && std::filesystem::exists(result.text); },
      [&] {
        MetricsReport report = parse_tsv(read_text(result.tsv), cfg.scheme);
        report.seed = cfg.seed;
        report.per_fold_mean = cfg.per_fold_mean;
        emit_report(report, ReportFormat::svg, result.svg, cfg.resolved);
        emit_report(report, ReportFormat::text, result.text, cfg.resolved);
      });
  return result;
}

}  // namespace cervix
