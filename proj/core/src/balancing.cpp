#include "cervix_cad/balancing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cervix_cad/rng.hpp"

namespace cervix {

TransformChain random_variation_chain(std::uint64_t seed, const RandomVariationRanges& r) {
  Rng rng(seed);
  const double contrast = rng.uniform(r.min_contrast, r.max_contrast);
  const auto brightness = static_cast<int>(rng.uniform_int(-r.max_brightness_delta, r.max_brightness_delta));
  const double degrees = rng.uniform(-r.max_rotate_degrees, r.max_rotate_degrees);
  const auto dx = static_cast<int>(rng.uniform_int(-r.max_translate, r.max_translate));
  const auto dy = static_cast<int>(rng.uniform_int(-r.max_translate, r.max_translate));
  return {TransformSpec::contrast(contrast), TransformSpec::brightness(brightness), TransformSpec::rotate(degrees),
          TransformSpec::translate(dx, dy)};
}

const std::vector<TransformChain>& rotate_flip_chains() {
  static const std::vector<TransformChain> chains = {
      {},
      {TransformSpec::rotate(90)},
      {TransformSpec::rotate(180)},
      {TransformSpec::rotate(270)},
      {TransformSpec::flip_h()},
  };
  return chains;
}

std::size_t BalancingPlan::augmentation_count() const {
  std::size_t n = 0;
  for (const auto& c : classes)
    for (const auto& e : c.entries) n += e.is_original() ? 0 : 1;
  return n;
}

const ClassPlan& BalancingPlan::for_label(const std::string& label) const {
  for (const auto& c : classes)
    if (c.label == label) return c;
  throw std::out_of_range("no plan for label " + label);
}

namespace {

constexpr int kExpansionFactor = 5;

std::vector<int> shuffled_indices(int n, std::uint64_t seed) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(idx));
  return idx;
}

// Entries reaching `target` using the identity chain for originals, then
// cycling sources through the non-identity chains from `chains`.
std::vector<PlanEntry> rotate_flip_fill(int count, int target, std::uint64_t seed) {
  const auto order = shuffled_indices(count, seed);
  std::vector<PlanEntry> entries;
  if (count >= target) {
    std::vector<int> keep(order.begin(), order.begin() + target);
    std::sort(keep.begin(), keep.end());
    for (int s : keep) entries.push_back({s, {}, 0});
    return entries;
  }
  for (int s = 0; s < count; ++s) entries.push_back({s, {}, 0});
  const auto& chains = rotate_flip_chains();
  for (int j = 0; j < target - count; ++j) {
    const auto chain_index = static_cast<std::size_t>(1 + j / count);
    entries.push_back({order[static_cast<std::size_t>(j % count)], chains.at(chain_index), 0});
  }
  return entries;
}

}  // namespace

BalancingPlan plan_balancing(const std::map<std::string, int>& class_counts, LabelScheme scheme,
                             std::uint64_t rng_seed, const RandomVariationRanges& ranges) {
  if (class_counts.empty()) throw std::invalid_argument("no classes to balance");
  for (const auto& [label, count] : class_counts)
    if (count < 1) throw std::invalid_argument("class '" + label + "' has no images");

  BalancingPlan plan;
  plan.scheme = scheme;
  plan.seed = rng_seed;

  const auto [min_it, max_it] = std::minmax_element(class_counts.begin(), class_counts.end(),
                                                    [](const auto& a, const auto& b) { return a.second < b.second; });

  std::uint64_t class_salt = 0;
  if (scheme == LabelScheme::binary) {
    plan.target_count_per_class = max_it->second;
    for (const auto& [label, count] : class_counts) {
      const std::uint64_t class_seed = mix_seed(rng_seed, class_salt++);
      ClassPlan cp{label, count, plan.target_count_per_class, {}};
      for (int s = 0; s < count; ++s) cp.entries.push_back({s, {}, 0});
      const auto order = shuffled_indices(count, class_seed);
      for (int j = 0; j < plan.target_count_per_class - count; ++j) {
        const std::uint64_t entry_seed = mix_seed(class_seed, static_cast<std::uint64_t>(j) + 1);
        cp.entries.push_back({order[static_cast<std::size_t>(j % count)], random_variation_chain(entry_seed, ranges),
                              entry_seed});
      }
      plan.classes.push_back(std::move(cp));
    }
    return plan;
  }

  plan.stage1_target = min_it->second * kExpansionFactor;
  plan.target_count_per_class = plan.stage1_target * kExpansionFactor;
  for (const auto& [label, count] : class_counts) {
    const std::uint64_t class_seed = mix_seed(rng_seed, class_salt++);
    ClassPlan cp{label, count, plan.target_count_per_class, {}};
    cp.entries = rotate_flip_fill(count, plan.stage1_target, class_seed);
    const std::size_t stage1_size = cp.entries.size();
    for (std::size_t i = 0; i < stage1_size; ++i) {
      for (int r = 1; r < kExpansionFactor; ++r) {
        const std::uint64_t entry_seed = mix_seed(class_seed, i * kExpansionFactor + static_cast<std::uint64_t>(r));
        PlanEntry e = cp.entries[i];
        const auto variation = random_variation_chain(entry_seed, ranges);
        e.chain.insert(e.chain.end(), variation.begin(), variation.end());
        e.seed = entry_seed;
        cp.entries.push_back(std::move(e));
      }
    }
    plan.classes.push_back(std::move(cp));
  }
  return plan;
}

}  // namespace cervix
