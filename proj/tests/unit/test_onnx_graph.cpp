#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cervix_cad/error.hpp"
#include "cervix_cad/onnx_graph.hpp"
#include "test_util.hpp"

using cervix::onnx::Graph;
using cervix::onnx::Tensor;

namespace {

std::vector<std::int64_t> read_shape(const std::filesystem::path& p) {
  std::istringstream in(testutil::read_text(p));
  std::vector<std::int64_t> shape;
  for (std::int64_t v; in >> v;) shape.push_back(v);
  return shape;
}

// Goldens were produced by onnxruntime on the same inputs.
void check_golden(const std::string& name) {
  SCOPED_TRACE(name);
  const auto dir = testutil::data_dir();
  const Graph g = Graph::load(dir / (name + ".onnx"));
  Tensor in = Tensor::zeros(g.input_shape());
  in.f = testutil::read_f32(dir / (name + "_input.f32"));
  ASSERT_EQ(in.f.size(), in.numel());
  const Tensor out = g.run(in);
  const auto expected = testutil::read_f32(dir / (name + "_output.f32"));
  EXPECT_EQ(out.shape, read_shape(dir / (name + "_output.shape")));
  ASSERT_EQ(out.f.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    EXPECT_NEAR(out.f[i], expected[i], 1e-4 * (1.0 + std::abs(expected[i]))) << "element " << i;
}

}  // namespace

TEST(OnnxGraph, MaxPoolCeilMode) { check_golden("ops_maxpool_ceil"); }
TEST(OnnxGraph, AveragePoolExcludingPad) { check_golden("ops_avgpool_pad0"); }
TEST(OnnxGraph, AveragePoolIncludingPad) { check_golden("ops_avgpool_pad1"); }
TEST(OnnxGraph, GroupedDilatedConv) { check_golden("ops_conv_group"); }
TEST(OnnxGraph, SameUpperConv) { check_golden("ops_conv_same"); }
TEST(OnnxGraph, DenseAndBroadcastOps) { check_golden("ops_dense"); }
TEST(OnnxGraph, BatchNormalization) { check_golden("ops_batchnorm"); }

TEST(OnnxGraph, ReportsDeclaredShapesAndMetadata) {
  const Graph head = Graph::load(testutil::data_dir() / "tiny_head.onnx");
  EXPECT_EQ(head.input_shape(), (std::vector<std::int64_t>{-1, 3, 224, 224}));
  EXPECT_EQ(head.output_shape(), (std::vector<std::int64_t>{-1, 10}));
  const Graph meta = Graph::load(testutil::data_dir() / "tiny_backbone_meta.onnx");
  EXPECT_EQ(meta.metadata().at("cervix.input_mean"), "0.485,0.456,0.406");
  EXPECT_EQ(meta.output_name(), "descriptor");
  EXPECT_GT(meta.node_count(), 5u);
}

TEST(OnnxGraph, RunIsRepeatable) {
  const Graph g = Graph::load(testutil::data_dir() / "ops_conv_group.onnx");
  Tensor in = Tensor::zeros(g.input_shape());
  for (std::size_t i = 0; i < in.f.size(); ++i) in.f[i] = static_cast<float>(std::sin(0.1 * static_cast<double>(i)));
  EXPECT_EQ(g.run(in).f, g.run(in).f);
}

TEST(OnnxGraph, LoadErrors) {
  EXPECT_THROW(Graph::load(testutil::data_dir() / "absent.onnx"), cervix::FileNotFoundError);
  const std::vector<std::uint8_t> junk = {0xff, 0xff, 0xff, 0x01, 0x02};
  EXPECT_THROW(Graph::parse(junk), cervix::DataError);
}

TEST(OnnxGraph, WrongInputShapeIsRejected) {
  const Graph g = Graph::load(testutil::data_dir() / "ops_batchnorm.onnx");
  EXPECT_ANY_THROW(g.run(Tensor::zeros({2, 4, 4, 4})));
}
