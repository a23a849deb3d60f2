#include <map>
#include <stdexcept>
#include <string>

#include "cervix_cad/eval.hpp"
#include "cervix_cad/rng.hpp"

namespace cervix {

std::vector<int> FoldSplit::test_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldSplit::train_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != fold) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// Deals per-class member lists round-robin; each list entry is a set of sample
// indices that move together.
FoldSplit deal(const std::map<int, std::vector<std::vector<int>>>& by_class, std::size_t n, int k, std::uint64_t seed) {
  FoldSplit split;
  split.k = k;
  split.seed = seed;
  split.assignment.assign(n, -1);
  int next = 0;
  for (const auto& [label, units] : by_class) {
    if (static_cast<int>(units.size()) < k)
      throw std::invalid_argument("class " + std::to_string(label) + " has " + std::to_string(units.size()) +
                                  " samples, fewer than k = " + std::to_string(k));
    std::vector<std::size_t> order(units.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span(order));
    for (const auto u : order) {
      for (int i : units[u]) split.assignment[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % k;
    }
  }
  return split;
}

}  // namespace

FoldSplit stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  std::map<int, std::vector<std::vector<int>>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back({static_cast<int>(i)});
  return deal(by_class, labels.size(), k, seed);
}

FoldSplit stratified_group_kfold(std::span<const int> labels, std::span<const std::string> groups, int k,
                                 std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (groups.size() != labels.size()) throw std::invalid_argument("group list length differs from label count");
  std::map<std::string, std::size_t> group_slot;
  std::map<int, std::vector<std::vector<int>>> by_class;
  std::vector<std::pair<int, std::size_t>> slots;  // (label, index in by_class[label])
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = group_slot.find(groups[i]);
    if (it == group_slot.end()) {
      auto& units = by_class[labels[i]];
      units.push_back({});
      it = group_slot.emplace(groups[i], slots.size()).first;
      slots.emplace_back(labels[i], units.size() - 1);
    }
    const auto [label, idx] = slots[it->second];
    by_class[label][idx].push_back(static_cast<int>(i));
  }
  return deal(by_class, labels.size(), k, seed);
}

}  // namespace cervix
