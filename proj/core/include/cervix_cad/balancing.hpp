#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cervix_cad/labels.hpp"
#include "cervix_cad/transforms.hpp"

namespace cervix {

/// Parameter ranges for the random photometric/geometric variation chains.
struct RandomVariationRanges {
  double max_rotate_degrees = 15.0;
  int max_brightness_delta = 40;
  double min_contrast = 0.8;
  double max_contrast = 1.2;
  int max_translate = 10;
};

/// Draws one contrast -> brightness -> rotate -> translate chain.
TransformChain random_variation_chain(std::uint64_t seed, const RandomVariationRanges& ranges = {});

/// Identity, rot90, rot180, rot270, flip_h: the five-fold expansion chains.
const std::vector<TransformChain>& rotate_flip_chains();

struct PlanEntry {
  int source = 0;  ///< index among the class's source images
  TransformChain chain;
  std::uint64_t seed = 0;  ///< seed the random chain was drawn from, 0 for deterministic chains

  bool is_original() const { return chain.empty(); }
};

struct ClassPlan {
  std::string label;
  int source_count = 0;
  int target_count = 0;
  std::vector<PlanEntry> entries;
};

struct BalancingPlan {
  LabelScheme scheme = LabelScheme::binary;
  std::uint64_t seed = 0;
  int target_count_per_class = 0;
  int stage1_target = 0;  ///< ternary only; 0 for binary plans
  std::vector<ClassPlan> classes;  ///< ordered by label

  std::size_t augmentation_count() const;
  const ClassPlan& for_label(const std::string& label) const;
};

/// Binary: the minority class is topped up with random variations of its own
/// images until it matches the majority count.
///
/// Ternary: stage 1 expands the smallest class five-fold with rotate/flip
/// chains and brings the other classes to that count the same way; stage 2
/// multiplies every class by five with random variation chains.
BalancingPlan plan_balancing(const std::map<std::string, int>& class_counts, LabelScheme scheme,
                             std::uint64_t rng_seed, const RandomVariationRanges& ranges = {});

}  // namespace cervix
