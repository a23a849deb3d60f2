#include <gtest/gtest.h>

#include "cervix_cad/eval.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using cervix::ConfusionMatrix;

namespace {

ConfusionMatrix from(const std::vector<std::vector<std::int64_t>>& rows) {
  ConfusionMatrix cm(static_cast<int>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t p = 0; p < rows.size(); ++p) cm.add(static_cast<int>(t), static_cast<int>(p), rows[t][p]);
  return cm;
}

}  // namespace

TEST(Metrics, BinaryWorkedExample) {
  // TN 8, FP 2 / FN 5, TP 5.
  const auto m = cervix::compute_metrics(from({{8, 2}, {5, 5}}));
  EXPECT_DOUBLE_EQ(m.sensitivity, 50.0);
  EXPECT_DOUBLE_EQ(m.specificity, 80.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 65.0);
  EXPECT_FALSE(m.zero_denominator);
}

TEST(Metrics, PerfectDiagonal) {
  const auto m = cervix::compute_metrics(from({{4, 0, 0}, {0, 7, 0}, {0, 0, 2}}));
  EXPECT_DOUBLE_EQ(m.sensitivity, 100.0);
  EXPECT_DOUBLE_EQ(m.specificity, 100.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 100.0);
}

TEST(Metrics, ThreeClassAgainstOracle) {
  const std::vector<std::vector<std::int64_t>> rows = {{8, 1, 1}, {0, 9, 1}, {2, 0, 8}};
  const auto m = cervix::compute_metrics(from(rows));
  const auto ref = oracle::metrics(rows);
  EXPECT_NEAR(m.sensitivity, oracle::to_double(ref.sensitivity), 1e-12);
  EXPECT_NEAR(m.specificity, oracle::to_double(ref.specificity), 1e-12);
  EXPECT_NEAR(m.accuracy, oracle::to_double(ref.accuracy), 1e-12);
  EXPECT_NEAR(m.accuracy, 250.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.sensitivity, 250.0 / 3.0, 1e-12);
}

TEST(Metrics, RandomMatricesAgainstOracle) {
  const auto r = props::metric_formulas(200, 17);
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Metrics, EmptyAndDegenerateMatrices) {
  EXPECT_THROW(cervix::compute_metrics(ConfusionMatrix(2)), std::invalid_argument);
  const auto m = cervix::compute_metrics(from({{3, 1}, {0, 0}}));
  EXPECT_TRUE(m.zero_denominator);
  EXPECT_DOUBLE_EQ(m.sensitivity, 0.0);
  EXPECT_DOUBLE_EQ(m.specificity, 75.0);
}

TEST(ConfusionMatrixTest, AccumulatesAndValidates) {
  ConfusionMatrix a(2), b(2);
  a.add(0, 1);
  b.add(0, 1, 3);
  a += b;
  EXPECT_EQ(a.at(0, 1), 4);
  EXPECT_EQ(a.total(), 4);
  EXPECT_THROW(a.add(2, 0), std::out_of_range);
  EXPECT_THROW(a.add(0, 0, -1), std::invalid_argument);
  ConfusionMatrix three(3);
  EXPECT_THROW(a += three, std::invalid_argument);
  EXPECT_THROW(ConfusionMatrix(1), std::invalid_argument);
}
