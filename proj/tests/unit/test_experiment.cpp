#include <gtest/gtest.h>

#include "cervix_cad/eval.hpp"
#include "cervix_cad/fusion.hpp"
#include "cervix_cad/synth.hpp"
#include "test_util.hpp"

using cervix::PipelineVariant;

namespace {

cervix::FeatureMatrix synthetic(cervix::LabelScheme scheme, int per_class, std::uint64_t seed) {
  cervix::SynthOptions o;
  o.scheme = scheme;
  o.per_class = per_class;
  o.block_dim = 6;
  o.seed = seed;
  const auto data = cervix::generate_synthetic(o);
  return cervix::fuse(data.rn50, data.rn101, data.rn152, data.manifest);
}

}  // namespace

TEST(Experiment, RowsOrderedByKThenVariant) {
  const auto fm = synthetic(cervix::LabelScheme::ternary, 12, 1);
  cervix::ExperimentOptions opt;
  opt.seed = 4;
  const auto report = cervix::run_experiment(fm, opt);
  ASSERT_EQ(report.rows.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(report.rows[i].k, i < 5 ? 5 : 10);
    EXPECT_EQ(report.rows[i].variant, opt.variants[i % 5]);
    EXPECT_EQ(report.rows[i].pooled.total(), fm.n());
    EXPECT_EQ(report.rows[i].per_fold.size(), static_cast<std::size_t>(report.rows[i].k));
  }
  // Well-separated blobs: the fused variants classify everything.
  EXPECT_DOUBLE_EQ(report.rows[4].metrics.accuracy, 100.0);
  EXPECT_DOUBLE_EQ(report.rows[3].metrics.accuracy, 100.0);
}

TEST(Experiment, FourSampleToyProblem) {
  const auto fm = testutil::matrix({{0, 0, 0}, {0.1, 0, 0}, {5, 5, 5}, {5.1, 5, 5}}, {0, 0, 1, 1});
  cervix::ExperimentOptions opt;
  opt.ks = {2};
  opt.variants = {PipelineVariant::fusion};
  const auto report = cervix::run_experiment(fm, opt);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_EQ(report.rows[0].pooled.total(), 4);
  EXPECT_EQ(report.rows[0].pooled.at(0, 0) + report.rows[0].pooled.at(1, 1), 4);
  EXPECT_EQ(cervix::format_tsv(report),
            "validation\tvariant\tspecificity\tsensitivity\taccuracy\n2-fold\tfusion\t100.00\t100.00\t100.00\n");
}

TEST(Experiment, DeterministicForSeed) {
  const auto fm = synthetic(cervix::LabelScheme::binary, 15, 2);
  cervix::ExperimentOptions opt;
  opt.ks = {5};
  opt.seed = 9;
  const auto a = cervix::run_experiment(fm, opt);
  const auto b = cervix::run_experiment(fm, opt);
  EXPECT_EQ(cervix::format_tsv(a), cervix::format_tsv(b));
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].pooled, b.rows[i].pooled);
}

TEST(Experiment, PerFoldMeanAveragesFolds) {
  const auto fm = synthetic(cervix::LabelScheme::binary, 10, 3);
  cervix::ExperimentOptions opt;
  opt.ks = {5};
  opt.variants = {PipelineVariant::rn50};
  opt.per_fold_mean = true;
  const auto report = cervix::run_experiment(fm, opt);
  double sum = 0;
  for (const auto& f : report.rows[0].per_fold) sum += f.accuracy;
  EXPECT_NEAR(report.rows[0].metrics.accuracy, sum / 5.0, 1e-12);
  EXPECT_TRUE(report.per_fold_mean);
}

TEST(Experiment, GroupsMustMatchSamples) {
  const auto fm = synthetic(cervix::LabelScheme::binary, 10, 3);
  cervix::ExperimentOptions opt;
  opt.groups = std::vector<std::string>{"a", "b"};
  EXPECT_THROW(cervix::run_experiment(fm, opt), std::invalid_argument);
  opt.groups.reset();
  opt.ks.clear();
  EXPECT_THROW(cervix::run_experiment(fm, opt), std::invalid_argument);
}

TEST(Experiment, SingleBlockVariantsNeedThreeEqualBlocks) {
  const auto fm = testutil::matrix({{0, 0}, {0.1, 0}, {5, 5}, {5.1, 5}}, {0, 0, 1, 1});
  cervix::ExperimentOptions opt;
  opt.ks = {2};
  opt.variants = {PipelineVariant::rn50};
  EXPECT_THROW(cervix::run_experiment(fm, opt), std::invalid_argument);
}
