#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cervix_cad/descriptors.hpp"
#include "cervix_cad/eval.hpp"
#include "cervix_cad/labels.hpp"
#include "cervix_cad/synth.hpp"

namespace cervix {

/// Typed form of a `key = value` experiment file.
///
/// Recognised keys: scheme, seed, output_dir, dataset_dir, model_rn50,
/// model_rn101, model_rn152, k, variants, c, gamma, fallback_crop,
/// split_before_augment, per_fold_mean, synthetic, synth_per_class,
/// synth_block_dim, synth_informative_dims, synth_separation,
/// synth_noise_std. Relative paths resolve against the file's directory.
struct ExperimentConfig {
  LabelScheme scheme = LabelScheme::binary;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::filesystem::path dataset_dir;
  std::map<BackboneVariant, std::filesystem::path> models;
  std::vector<int> ks = {5, 10};
  std::vector<PipelineVariant> variants = {PipelineVariant::rn50, PipelineVariant::rn101, PipelineVariant::rn152,
                                           PipelineVariant::fusion, PipelineVariant::fusion_lda};
  double c = 1.0;
  double gamma = 0.1;
  std::optional<double> fallback_crop;
  bool split_before_augment = false;
  bool per_fold_mean = false;
  bool synthetic = false;
  SynthOptions synth;  ///< used when `synthetic`; scheme and seed mirror the fields above

  /// Canonical `key = value` listing of every setting, paths as written in the
  /// file. Embedded in reports and hashed for stage skipping.
  std::string resolved;
};

/// Throws ConfigError carrying the offending line for unknown or duplicate
/// keys, malformed values, out-of-range numbers and nonexistent input paths.
/// Missing mandatory keys are reported against the last line.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// Reads and parses `path`; ConfigError if it does not exist.
ExperimentConfig validate_config(const std::filesystem::path& path);

}  // namespace cervix
