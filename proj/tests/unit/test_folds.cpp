#include <gtest/gtest.h>

#include <map>
#include <set>

#include "cervix_cad/eval.hpp"
#include "properties.hpp"

TEST(Folds, TenSamplesFiveFolds) {
  const std::vector<int> labels = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const auto split = cervix::stratified_kfold(labels, 5, 1);
  for (int f = 0; f < 5; ++f) {
    const auto test = split.test_indices(f);
    ASSERT_EQ(test.size(), 2u);
    EXPECT_NE(labels[static_cast<std::size_t>(test[0])], labels[static_cast<std::size_t>(test[1])]);
  }
  EXPECT_TRUE(props::fold_laws_on(labels, split, 5).pass);
}

TEST(Folds, BalancedBinaryTenFold) {
  std::vector<int> labels(374, 0);
  labels.insert(labels.end(), 374, 1);
  const auto split = cervix::stratified_kfold(labels, 10, 7);
  std::map<std::size_t, int> size_histogram;
  for (int f = 0; f < 10; ++f) ++size_histogram[split.test_indices(f).size()];
  EXPECT_EQ(size_histogram[75], 8);
  EXPECT_EQ(size_histogram[74], 2);
}

TEST(Folds, ClassSmallerThanKIsRejected) {
  const std::vector<int> labels = {0, 0, 0, 0, 0, 0, 1, 1, 1};
  EXPECT_THROW(cervix::stratified_kfold(labels, 5, 1), std::invalid_argument);
  EXPECT_THROW(cervix::stratified_kfold(labels, 1, 1), std::invalid_argument);
}

TEST(Folds, SeedControlsTheSplit) {
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) labels.push_back(i % 3);
  const auto a = cervix::stratified_kfold(labels, 5, 100);
  const auto b = cervix::stratified_kfold(labels, 5, 100);
  const auto c = cervix::stratified_kfold(labels, 5, 101);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_NE(a.assignment, c.assignment);
}

TEST(Folds, LawsHoldOnRandomLabelVectors) {
  const auto r = props::fold_laws(200, 555);
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(GroupFolds, GroupsNeverStraddleFolds) {
  std::vector<int> labels;
  std::vector<std::string> groups;
  for (int g = 0; g < 24; ++g)
    for (int member = 0; member < 1 + g % 4; ++member) {
      labels.push_back(g % 2);
      groups.push_back("g" + std::to_string(g));
    }
  const auto split = cervix::stratified_group_kfold(labels, groups, 4, 3);
  std::map<std::string, std::set<int>> folds_of;
  for (std::size_t i = 0; i < labels.size(); ++i) folds_of[groups[i]].insert(split.assignment[i]);
  for (const auto& [g, folds] : folds_of) EXPECT_EQ(folds.size(), 1u) << g;
  for (int f = 0; f < 4; ++f) EXPECT_FALSE(split.test_indices(f).empty());
}

TEST(GroupFolds, NeedsKGroupsPerClass) {
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  const std::vector<std::string> groups = {"a", "a", "b", "c", "d", "e"};
  EXPECT_THROW(cervix::stratified_group_kfold(labels, groups, 3, 1), std::invalid_argument);
  EXPECT_NO_THROW(cervix::stratified_group_kfold(labels, groups, 2, 1));
  EXPECT_THROW(cervix::stratified_group_kfold(labels, std::vector<std::string>{"a"}, 2, 1), std::invalid_argument);
}
