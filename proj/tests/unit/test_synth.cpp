#include <gtest/gtest.h>

#include "cervix_cad/fusion.hpp"
#include "cervix_cad/lda.hpp"
#include "cervix_cad/synth.hpp"
#include "test_util.hpp"

TEST(Synth, ShapesAndIds) {
  cervix::SynthOptions o;
  o.per_class = 7;
  o.block_dim = 5;
  const auto data = cervix::generate_synthetic(o);
  EXPECT_EQ(data.manifest.entries.size(), 21u);
  EXPECT_EQ(data.manifest.entries[7].path, "synthetic/type2/type2_00000");
  for (auto v : cervix::kBackbones) {
    const auto& c = data.cache(v);
    EXPECT_EQ(c.variant, v);
    EXPECT_EQ(c.n, 21u);
    EXPECT_EQ(c.d, 5u);
    EXPECT_EQ(c.ids, data.manifest.ids());
  }
  EXPECT_THROW(data.cache(cervix::BackboneVariant::fused), std::invalid_argument);
  EXPECT_EQ(cervix::cache_file_name(cervix::BackboneVariant::rn101), "rn101.cdc");
}

TEST(Synth, SameSeedSameData) {
  cervix::SynthOptions o;
  o.per_class = 4;
  o.block_dim = 3;
  o.seed = 12;
  const auto a = cervix::generate_synthetic(o);
  const auto b = cervix::generate_synthetic(o);
  EXPECT_EQ(a.rn152, b.rn152);
  o.seed = 13;
  EXPECT_NE(cervix::generate_synthetic(o).rn152.values, a.rn152.values);
}

TEST(Synth, ClassMeansSitAtRequestedSeparation) {
  cervix::SynthOptions o;
  o.scheme = cervix::LabelScheme::binary;
  o.per_class = 2000;
  o.block_dim = 4;
  o.separation = 6.0;
  o.noise_std = 0.5;
  const auto data = cervix::generate_synthetic(o);
  const auto fm = cervix::fuse(data.rn50, data.rn101, data.rn152, data.manifest);
  const auto s = cervix::compute_scatter(fm);
  const double dist = (s.class_means[0] - s.class_means[1]).norm();
  // Sampling noise in each mean is about noise_std * sqrt(d / n).
  EXPECT_NEAR(dist, 3.0, 0.1);
}

TEST(Synth, OnlyInformativeDimensionsCarrySignal) {
  cervix::SynthOptions o;
  o.per_class = 500;
  o.block_dim = 10;
  o.informative_dims = 3;
  o.separation = 20.0;
  const auto data = cervix::generate_synthetic(o);
  const auto fm = cervix::fuse(data.rn50, data.rn101, data.rn152, data.manifest);
  const auto s = cervix::compute_scatter(fm);
  int informative = 0;
  for (Eigen::Index j = 0; j < fm.d(); ++j) {
    double spread = 0;
    for (int c = 1; c < 3; ++c) spread = std::max(spread, std::abs(s.class_means[c](j) - s.class_means[0](j)));
    if (spread > 0.5) {
      ++informative;
      EXPECT_EQ(j % 10, 0) << j;  // one per block, at the block start
    }
  }
  EXPECT_EQ(informative, 3);
}

TEST(Synth, WriteProducesManifestAndCaches) {
  testutil::TempDir dir("synth");
  cervix::SynthOptions o;
  o.per_class = 3;
  o.block_dim = 2;
  const auto data = cervix::generate_synthetic(o);
  cervix::write_synthetic(data, dir.path());
  EXPECT_EQ(cervix::read_manifest(dir / "manifest.tsv"), data.manifest);
  EXPECT_EQ(cervix::read_cache(dir / "rn50.cdc"), data.rn50);
}

TEST(Synth, RejectsBadOptions) {
  cervix::SynthOptions o;
  o.per_class = 0;
  EXPECT_THROW(cervix::generate_synthetic(o), std::invalid_argument);
  o = {};
  o.informative_dims = 3 * o.block_dim + 1;
  EXPECT_THROW(cervix::generate_synthetic(o), std::invalid_argument);
  o = {};
  o.noise_std = 0.0;
  EXPECT_THROW(cervix::generate_synthetic(o), std::invalid_argument);
}
