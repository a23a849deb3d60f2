#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cervix::onnx {

enum class DType { f32, i64 };

/// Dense row-major tensor; float or int64 payload depending on dtype.
struct Tensor {
  DType dtype = DType::f32;
  std::vector<std::int64_t> shape;
  std::vector<float> f;
  std::vector<std::int64_t> i;

  std::size_t numel() const;
  static Tensor zeros(std::vector<std::int64_t> shape);
};

/// Inference over ONNX graphs built from the operator subset that residual
/// network exports use: Conv, BatchNormalization, Relu, MaxPool, AveragePool,
/// GlobalAveragePool, Add/Sub/Mul/Div (numpy broadcasting), Flatten, Reshape,
/// Gemm, MatMul, Constant, Identity. Single input, single output, batch of one
/// or more.
///
/// Immutable after load; run() is safe to call concurrently.
class Graph {
 public:
  static Graph load(const std::filesystem::path& path);
  static Graph parse(std::span<const std::uint8_t> bytes);

  const std::string& input_name() const;
  const std::string& output_name() const;
  /// Declared shapes; symbolic dimensions are reported as -1.
  const std::vector<std::int64_t>& input_shape() const;
  const std::vector<std::int64_t>& output_shape() const;
  const std::map<std::string, std::string>& metadata() const;
  std::size_t node_count() const;

  Tensor run(const Tensor& input) const;

  struct Impl;

 private:
  explicit Graph(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace cervix::onnx
