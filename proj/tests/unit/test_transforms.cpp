#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cervix_cad/transforms.hpp"
#include "test_util.hpp"

using cervix::ImageRgb;
using cervix::TransformSpec;

namespace {
ImageRgb sample(int w = 9, int h = 7) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(w * 31 + h));
  return testutil::random_image(w, h, gen);
}
}  // namespace

TEST(Transforms, RotateZeroIsIdentity) {
  const ImageRgb img = sample();
  EXPECT_EQ(cervix::apply_transform(img, TransformSpec::rotate(0)), img);
}

TEST(Transforms, FlipsAreInvolutions) {
  const ImageRgb img = sample();
  for (const auto& t : {TransformSpec::flip_h(), TransformSpec::flip_v()})
    EXPECT_EQ(cervix::apply_transform(cervix::apply_transform(img, t), t), img);
  const ImageRgb flipped = cervix::apply_transform(img, TransformSpec::flip_h());
  EXPECT_EQ(flipped.at(0, 2, 1), img.at(8, 2, 1));
}

TEST(Transforms, BrightnessSaturates) {
  const ImageRgb img = sample();
  const auto t = TransformSpec::brightness(300);
  EXPECT_EQ(t.brightness_delta, 255);
  const ImageRgb bright = cervix::apply_transform(img, t);
  for (auto v : bright.data()) EXPECT_EQ(v, 255);
  const ImageRgb dark = cervix::apply_transform(img, TransformSpec::brightness(-999));
  for (auto v : dark.data()) EXPECT_EQ(v, 0);
}

TEST(Transforms, BrightnessAddsWithClamp) {
  ImageRgb img(1, 1, {10, 200, 250});
  const ImageRgb out = cervix::apply_transform(img, TransformSpec::brightness(10));
  EXPECT_EQ(out.at(0, 0, 0), 20);
  EXPECT_EQ(out.at(0, 0, 1), 210);
  EXPECT_EQ(out.at(0, 0, 2), 255);
}

TEST(Transforms, ContrastScalesAroundMidpoint) {
  ImageRgb img(1, 1, {128, 138, 0});
  const ImageRgb out = cervix::apply_transform(img, TransformSpec::contrast(2.0));
  EXPECT_EQ(out.at(0, 0, 0), 128);
  EXPECT_EQ(out.at(0, 0, 1), 148);
  EXPECT_EQ(out.at(0, 0, 2), 0);
  EXPECT_THROW(TransformSpec::contrast(0.0), std::invalid_argument);
  EXPECT_THROW(TransformSpec::contrast(-1.0), std::invalid_argument);
}

TEST(Transforms, QuarterTurnsMatchIndexPermutations) {
  const ImageRgb img = sample(5, 5);
  const ImageRgb r90 = cervix::apply_transform(img, TransformSpec::rotate(90));
  const ImageRgb r180 = cervix::apply_transform(img, TransformSpec::rotate(180));
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x)
      for (int c = 0; c < 3; ++c) {
        // Counter-clockwise on screen (y down): destination (x, y) reads source (4 - y, x).
        EXPECT_EQ(r90.at(x, y, c), img.at(4 - y, x, c));
        EXPECT_EQ(r180.at(x, y, c), img.at(4 - x, 4 - y, c));
      }
  ImageRgb four = img;
  for (int i = 0; i < 4; ++i) four = cervix::apply_transform(four, TransformSpec::rotate(90));
  EXPECT_EQ(four, img);
}

TEST(Transforms, TranslateShiftsAndFillsBlack) {
  const ImageRgb img = sample();
  const ImageRgb out = cervix::apply_transform(img, TransformSpec::translate(2, -1));
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const int sx = x - 2, sy = y + 1;
      const bool inside = sx >= 0 && sy < img.height();
      EXPECT_EQ(out.at(x, y, 0), inside ? img.at(sx, sy, 0) : 0);
    }
}

TEST(Transforms, RotationFillsCornersBlack) {
  ImageRgb img(21, 21, std::vector<std::uint8_t>(21 * 21 * 3, 200));
  const ImageRgb out = cervix::apply_transform(img, TransformSpec::rotate(45));
  EXPECT_EQ(out.at(0, 0, 0), 0);
  EXPECT_EQ(out.at(10, 10, 0), 200);
}

TEST(Transforms, RejectsNonFiniteRotation) {
  EXPECT_THROW(TransformSpec::rotate(std::nan("")), std::invalid_argument);
}

// Property: every transform keeps the raster size; determinism for equal specs.
TEST(Transforms, PreserveDimensionsAndAreDeterministic) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> angle(-180, 180), factor(0.1, 3.0);
  std::uniform_int_distribution<int> delta(-300, 300), shift(-20, 20), dim(1, 24);
  for (int trial = 0; trial < 200; ++trial) {
    const ImageRgb img = testutil::random_image(dim(gen), dim(gen), gen);
    const std::vector<TransformSpec> specs = {TransformSpec::rotate(angle(gen)), TransformSpec::flip_h(),
                                              TransformSpec::flip_v(), TransformSpec::brightness(delta(gen)),
                                              TransformSpec::contrast(factor(gen)),
                                              TransformSpec::translate(shift(gen), shift(gen))};
    for (const auto& t : specs) {
      const ImageRgb a = cervix::apply_transform(img, t);
      EXPECT_EQ(a.width(), img.width());
      EXPECT_EQ(a.height(), img.height());
      EXPECT_EQ(a, cervix::apply_transform(img, t));
    }
    EXPECT_EQ(cervix::apply_chain(img, specs).width(), img.width());
  }
}

TEST(Transforms, DescribeNamesTheKind) {
  EXPECT_NE(TransformSpec::rotate(90).describe().find("rotate"), std::string::npos);
  EXPECT_NE(TransformSpec::contrast(1.1).describe().find("contrast"), std::string::npos);
}
