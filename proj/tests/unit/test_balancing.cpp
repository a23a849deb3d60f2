#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cervix_cad/balancing.hpp"

using cervix::BalancingPlan;
using cervix::LabelScheme;

namespace {

int entry_count(const BalancingPlan& plan, const std::string& label) {
  return static_cast<int>(plan.for_label(label).entries.size());
}

int original_count(const cervix::ClassPlan& cp) {
  int n = 0;
  for (const auto& e : cp.entries) n += e.is_original() ? 1 : 0;
  return n;
}

}  // namespace

TEST(Balancing, BinaryTopsUpMinority) {
  const auto plan = cervix::plan_balancing({{"abnormal", 75}, {"normal", 374}}, LabelScheme::binary, 7);
  EXPECT_EQ(plan.target_count_per_class, 374);
  EXPECT_EQ(entry_count(plan, "abnormal"), 374);
  EXPECT_EQ(entry_count(plan, "normal"), 374);
  EXPECT_EQ(entry_count(plan, "abnormal") + entry_count(plan, "normal"), 748);
  EXPECT_EQ(original_count(plan.for_label("abnormal")), 75);
  EXPECT_EQ(original_count(plan.for_label("normal")), 374);
  EXPECT_EQ(plan.augmentation_count(), 374u - 75u);
  for (const auto& e : plan.for_label("abnormal").entries)
    if (!e.is_original()) {
      EXPECT_EQ(e.chain.size(), 4u);
    }
}

TEST(Balancing, TernaryTwoStages) {
  const auto plan =
      cervix::plan_balancing({{"type1", 226}, {"type2", 63}, {"type3", 87}}, LabelScheme::ternary, 11);
  EXPECT_EQ(plan.stage1_target, 315);
  EXPECT_EQ(plan.target_count_per_class, 1575);
  int total = 0;
  for (const auto& cp : plan.classes) {
    EXPECT_EQ(static_cast<int>(cp.entries.size()), 1575) << cp.label;
    total += static_cast<int>(cp.entries.size());
    // Stage-1 entries come first and only use rotate/flip chains.
    for (std::size_t i = 0; i < 315; ++i) {
      const auto& chain = cp.entries[i].chain;
      EXPECT_LE(chain.size(), 1u);
      EXPECT_EQ(cp.entries[i].seed, 0u);
    }
  }
  EXPECT_EQ(total, 4725);
  EXPECT_EQ(original_count(plan.for_label("type2")), 63);
  EXPECT_EQ(original_count(plan.for_label("type1")), 226);
}

TEST(Balancing, AlreadyBalancedBinaryIsEmpty) {
  const auto plan = cervix::plan_balancing({{"a", 10}, {"b", 10}}, LabelScheme::binary, 3);
  EXPECT_EQ(plan.augmentation_count(), 0u);
  for (const auto& cp : plan.classes) EXPECT_EQ(original_count(cp), 10);
}

TEST(Balancing, RejectsEmptyInput) {
  EXPECT_THROW(cervix::plan_balancing({}, LabelScheme::binary, 1), std::invalid_argument);
  EXPECT_THROW(cervix::plan_balancing({{"a", 0}, {"b", 4}}, LabelScheme::binary, 1), std::invalid_argument);
}

TEST(Balancing, SameSeedSamePlan) {
  const std::map<std::string, int> counts = {{"type1", 9}, {"type2", 4}, {"type3", 6}};
  const auto a = cervix::plan_balancing(counts, LabelScheme::ternary, 42);
  const auto b = cervix::plan_balancing(counts, LabelScheme::ternary, 42);
  const auto c = cervix::plan_balancing(counts, LabelScheme::ternary, 43);
  ASSERT_EQ(a.classes.size(), b.classes.size());
  bool differs = false;
  for (std::size_t k = 0; k < a.classes.size(); ++k) {
    ASSERT_EQ(a.classes[k].entries.size(), b.classes[k].entries.size());
    for (std::size_t i = 0; i < a.classes[k].entries.size(); ++i) {
      EXPECT_EQ(a.classes[k].entries[i].source, b.classes[k].entries[i].source);
      EXPECT_EQ(a.classes[k].entries[i].chain, b.classes[k].entries[i].chain);
      differs = differs || a.classes[k].entries[i].chain != c.classes[k].entries[i].chain;
    }
  }
  EXPECT_TRUE(differs);
}

TEST(Balancing, RandomChainsStayInRange) {
  const cervix::RandomVariationRanges r;
  for (std::uint64_t seed = 1; seed < 300; ++seed) {
    const auto chain = cervix::random_variation_chain(seed, r);
    ASSERT_EQ(chain.size(), 4u);
    EXPECT_GE(chain[0].contrast_factor, r.min_contrast);
    EXPECT_LE(chain[0].contrast_factor, r.max_contrast);
    EXPECT_LE(std::abs(chain[1].brightness_delta), r.max_brightness_delta);
    EXPECT_LE(std::abs(chain[2].rotate_degrees), r.max_rotate_degrees);
    EXPECT_LE(std::abs(chain[3].translate_dx), r.max_translate);
    EXPECT_LE(std::abs(chain[3].translate_dy), r.max_translate);
  }
}

// Closure: every class reaches the target, sources are valid, originals are
// never duplicated, and binary plans keep every original.
TEST(Balancing, PlansCloseOverRandomCounts) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> count(1, 60);
  for (int trial = 0; trial < 150; ++trial) {
    const bool ternary = trial % 2 == 1;
    std::map<std::string, int> counts;
    const auto labels = ternary ? std::vector<std::string>{"type1", "type2", "type3"}
                                : std::vector<std::string>{"normal", "abnormal"};
    int min_count = 1 << 30;
    int max_count = 0;
    for (const auto& l : labels) {
      counts[l] = count(gen);
      min_count = std::min(min_count, counts[l]);
      max_count = std::max(max_count, counts[l]);
    }
    const auto scheme = ternary ? LabelScheme::ternary : LabelScheme::binary;
    const auto plan = cervix::plan_balancing(counts, scheme, gen());
    const int target = ternary ? 25 * min_count : max_count;
    EXPECT_EQ(plan.target_count_per_class, target);
    for (const auto& cp : plan.classes) {
      EXPECT_EQ(static_cast<int>(cp.entries.size()), target);
      std::set<int> originals;
      for (const auto& e : cp.entries) {
        EXPECT_GE(e.source, 0);
        EXPECT_LT(e.source, cp.source_count);
        if (e.is_original()) {
          EXPECT_TRUE(originals.insert(e.source).second);
        }
        for (const auto& t : e.chain) EXPECT_NO_THROW(t.validate());
      }
      if (!ternary) {
        EXPECT_EQ(static_cast<int>(originals.size()), cp.source_count);
      } else {
        EXPECT_EQ(static_cast<int>(originals.size()), std::min(cp.source_count, 5 * min_count));
      }
    }
  }
}
