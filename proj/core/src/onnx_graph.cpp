#include "cervix_cad/onnx_graph.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/error.hpp"
#include "onnx.pb.h"

namespace cervix::onnx {

std::size_t Tensor::numel() const {
  return static_cast<std::size_t>(
      std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>()));
}

Tensor Tensor::zeros(std::vector<std::int64_t> shape) {
  Tensor t;
  t.shape = std::move(shape);
  t.f.assign(t.numel(), 0.0f);
  return t;
}

namespace {

using TensorPtr = std::shared_ptr<const Tensor>;
using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Attribute {
  std::int64_t i = 0;
  float f = 0;
  std::string s;
  std::vector<std::int64_t> ints;
  std::vector<float> floats;
  TensorPtr t;
};

struct Node {
  std::string op;
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, Attribute> attrs;

  std::int64_t get_i(const std::string& key, std::int64_t fallback) const {
    const auto it = attrs.find(key);
    return it == attrs.end() ? fallback : it->second.i;
  }
  float get_f(const std::string& key, float fallback) const {
    const auto it = attrs.find(key);
    return it == attrs.end() ? fallback : it->second.f;
  }
  std::string get_s(const std::string& key, const std::string& fallback) const {
    const auto it = attrs.find(key);
    return it == attrs.end() ? fallback : it->second.s;
  }
  std::vector<std::int64_t> get_ints(const std::string& key, std::vector<std::int64_t> fallback) const {
    const auto it = attrs.find(key);
    return it == attrs.end() ? fallback : it->second.ints;
  }
};

[[noreturn]] void fail(const Node& n, const std::string& what) {
  throw DataError("ONNX node " + (n.name.empty() ? n.op : n.name) + " (" + n.op + "): " + what);
}

Tensor convert_tensor(const ::onnx::TensorProto& tp) {
  if (tp.data_location() == ::onnx::TensorProto::EXTERNAL)
    throw DataError("tensor '" + tp.name() + "' uses external data; graphs must be self-contained");
  Tensor t;
  t.shape.assign(tp.dims().begin(), tp.dims().end());
  const std::size_t n = t.numel();
  const std::string& raw = tp.raw_data();
  switch (tp.data_type()) {
    case ::onnx::TensorProto::FLOAT:
      t.dtype = DType::f32;
      if (!raw.empty()) {
        if (raw.size() != n * sizeof(float)) throw DataError("tensor '" + tp.name() + "' raw size mismatch");
        t.f.resize(n);
        std::memcpy(t.f.data(), raw.data(), raw.size());
      } else {
        t.f.assign(tp.float_data().begin(), tp.float_data().end());
      }
      if (t.f.size() != n) throw DataError("tensor '" + tp.name() + "' element count mismatch");
      break;
    case ::onnx::TensorProto::INT64:
      t.dtype = DType::i64;
      if (!raw.empty()) {
        if (raw.size() != n * sizeof(std::int64_t)) throw DataError("tensor '" + tp.name() + "' raw size mismatch");
        t.i.resize(n);
        std::memcpy(t.i.data(), raw.data(), raw.size());
      } else {
        t.i.assign(tp.int64_data().begin(), tp.int64_data().end());
      }
      if (t.i.size() != n) throw DataError("tensor '" + tp.name() + "' element count mismatch");
      break;
    default:
      throw DataError("tensor '" + tp.name() + "' has unsupported element type " + std::to_string(tp.data_type()));
  }
  return t;
}

std::vector<std::int64_t> declared_shape(const ::onnx::ValueInfoProto& vi) {
  std::vector<std::int64_t> dims;
  if (!vi.type().has_tensor_type() || !vi.type().tensor_type().has_shape()) return dims;
  for (const auto& d : vi.type().tensor_type().shape().dim()) dims.push_back(d.has_dim_value() ? d.dim_value() : -1);
  return dims;
}

const std::set<std::string>& supported_ops() {
  static const std::set<std::string> ops = {"Conv",   "BatchNormalization", "Relu",    "MaxPool",  "AveragePool",
                                            "GlobalAveragePool", "Add", "Sub", "Mul", "Div", "Flatten", "Reshape",
                                            "Gemm",   "MatMul", "Constant", "Identity"};
  return ops;
}

// ---- kernels --------------------------------------------------------------

const Tensor& require_f32(const Node& n, const Tensor& t) {
  if (t.dtype != DType::f32) fail(n, "expected a float tensor");
  return t;
}

std::vector<std::int64_t> broadcast_shape(const Node& n, const std::vector<std::int64_t>& a,
                                          const std::vector<std::int64_t>& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  std::vector<std::int64_t> out(rank, 1);
  for (std::size_t k = 0; k < rank; ++k) {
    const std::int64_t da = k < rank - a.size() ? 1 : a[k - (rank - a.size())];
    const std::int64_t db = k < rank - b.size() ? 1 : b[k - (rank - b.size())];
    if (da != db && da != 1 && db != 1) fail(n, "shapes are not broadcast compatible");
    out[k] = std::max(da, db);
  }
  return out;
}

std::vector<std::int64_t> broadcast_strides(const std::vector<std::int64_t>& shape, std::size_t rank,
                                            const std::vector<std::int64_t>& out_shape) {
  std::vector<std::int64_t> strides(rank, 0);
  std::int64_t s = 1;
  for (std::size_t k = shape.size(); k-- > 0;) {
    const std::size_t ok = k + (rank - shape.size());
    strides[ok] = (shape[k] == 1 && out_shape[ok] != 1) ? 0 : s;
    s *= shape[k];
  }
  return strides;
}

template <typename Op>
Tensor binary_op(const Node& n, const Tensor& a, const Tensor& b, Op op) {
  require_f32(n, a);
  require_f32(n, b);
  Tensor out;
  out.shape = broadcast_shape(n, a.shape, b.shape);
  const std::size_t total = out.numel();
  out.f.resize(total);
  if (a.shape == b.shape) {
    for (std::size_t k = 0; k < total; ++k) out.f[k] = op(a.f[k], b.f[k]);
    return out;
  }
  if (b.numel() == 1) {
    const float bv = b.f[0];
    if (a.shape == out.shape) {
      for (std::size_t k = 0; k < total; ++k) out.f[k] = op(a.f[k], bv);
      return out;
    }
  }
  const std::size_t rank = out.shape.size();
  const auto sa = broadcast_strides(a.shape, rank, out.shape);
  const auto sb = broadcast_strides(b.shape, rank, out.shape);
  std::vector<std::int64_t> idx(rank, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::int64_t ia = 0;
    std::int64_t ib = 0;
    for (std::size_t r = 0; r < rank; ++r) {
      ia += idx[r] * sa[r];
      ib += idx[r] * sb[r];
    }
    out.f[k] = op(a.f[static_cast<std::size_t>(ia)], b.f[static_cast<std::size_t>(ib)]);
    for (std::size_t r = rank; r-- > 0;) {
      if (++idx[r] < out.shape[r]) break;
      idx[r] = 0;
    }
  }
  return out;
}

struct Window {
  std::vector<std::int64_t> kernel, strides, dilations, pads;  // pads: begins then ends
};

Window window_attrs(const Node& n, const std::vector<std::int64_t>& kernel, std::int64_t in_h, std::int64_t in_w) {
  Window w;
  w.kernel = kernel;
  w.strides = n.get_ints("strides", {1, 1});
  w.dilations = n.get_ints("dilations", {1, 1});
  w.pads = n.get_ints("pads", {0, 0, 0, 0});
  if (w.kernel.size() != 2 || w.strides.size() != 2 || w.dilations.size() != 2 || w.pads.size() != 4)
    fail(n, "only 2-D spatial windows are supported");
  const auto auto_pad = n.get_s("auto_pad", "NOTSET");
  if (auto_pad == "SAME_UPPER" || auto_pad == "SAME_LOWER") {
    const std::int64_t in[2] = {in_h, in_w};
    for (int k = 0; k < 2; ++k) {
      const std::int64_t out = (in[k] + w.strides[k] - 1) / w.strides[k];
      const std::int64_t extent = (w.kernel[k] - 1) * w.dilations[k] + 1;
      const std::int64_t total = std::max<std::int64_t>((out - 1) * w.strides[k] + extent - in[k], 0);
      const std::int64_t small = total / 2;
      w.pads[k] = auto_pad == "SAME_UPPER" ? small : total - small;
      w.pads[k + 2] = total - w.pads[k];
    }
  } else if (auto_pad == "VALID") {
    std::fill(w.pads.begin(), w.pads.end(), 0);
  } else if (auto_pad != "NOTSET" && !auto_pad.empty()) {
    fail(n, "unsupported auto_pad " + auto_pad);
  }
  return w;
}

std::int64_t out_extent(std::int64_t in, std::int64_t k, std::int64_t s, std::int64_t d, std::int64_t pb, std::int64_t pe,
                        bool ceil_mode) {
  const std::int64_t span = in + pb + pe - ((k - 1) * d + 1);
  if (span < 0) return 0;
  return (ceil_mode ? (span + s - 1) / s : span / s) + 1;
}

Tensor conv(const Node& n, const Tensor& x, const Tensor& w, const Tensor* bias) {
  require_f32(n, x);
  require_f32(n, w);
  if (x.shape.size() != 4 || w.shape.size() != 4) fail(n, "only NCHW 2-D convolution is supported");
  const std::int64_t N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3];
  const std::int64_t M = w.shape[0], Cg = w.shape[1], kh = w.shape[2], kw = w.shape[3];
  const std::int64_t group = n.get_i("group", 1);
  if (group < 1 || C != Cg * group || M % group != 0) fail(n, "channel/group mismatch");
  const auto win = window_attrs(n, n.get_ints("kernel_shape", {kh, kw}), H, W);
  const std::int64_t oh = out_extent(H, kh, win.strides[0], win.dilations[0], win.pads[0], win.pads[2], false);
  const std::int64_t ow = out_extent(W, kw, win.strides[1], win.dilations[1], win.pads[1], win.pads[3], false);
  const std::int64_t Mg = M / group;
  const std::int64_t K = Cg * kh * kw;
  const std::int64_t P = oh * ow;
  if (bias && static_cast<std::int64_t>(bias->numel()) != M) fail(n, "bias length mismatch");

  Tensor out = Tensor::zeros({N, M, oh, ow});
  const bool pointwise = kh == 1 && kw == 1 && win.strides[0] == 1 && win.strides[1] == 1 &&
                         std::all_of(win.pads.begin(), win.pads.end(), [](auto p) { return p == 0; });
  RowMatrix col;
  for (std::int64_t b = 0; b < N; ++b) {
    for (std::int64_t g = 0; g < group; ++g) {
      const float* src = x.f.data() + (b * C + g * Cg) * H * W;
      Eigen::Map<const RowMatrix> weights(w.f.data() + g * Mg * K, Mg, K);
      Eigen::Map<RowMatrix> dst(out.f.data() + (b * M + g * Mg) * P, Mg, P);
      if (pointwise) {
        dst.noalias() = weights * Eigen::Map<const RowMatrix>(src, K, P);
      } else {
        col.setZero(K, P);
        for (std::int64_t c = 0; c < Cg; ++c)
          for (std::int64_t ki = 0; ki < kh; ++ki)
            for (std::int64_t kj = 0; kj < kw; ++kj) {
              float* row = col.data() + ((c * kh + ki) * kw + kj) * P;
              for (std::int64_t oy = 0; oy < oh; ++oy) {
                const std::int64_t iy = oy * win.strides[0] - win.pads[0] + ki * win.dilations[0];
                if (iy < 0 || iy >= H) continue;
                const float* in_row = src + (c * H + iy) * W;
                for (std::int64_t ox = 0; ox < ow; ++ox) {
                  const std::int64_t ix = ox * win.strides[1] - win.pads[1] + kj * win.dilations[1];
                  if (ix >= 0 && ix < W) row[oy * ow + ox] = in_row[ix];
                }
              }
            }
        dst.noalias() = weights * col;
      }
      if (bias) {
        for (std::int64_t m = 0; m < Mg; ++m) dst.row(m).array() += bias->f[static_cast<std::size_t>(g * Mg + m)];
      }
    }
  }
  return out;
}

Tensor batch_norm(const Node& n, const Tensor& x, const Tensor& scale, const Tensor& shift, const Tensor& mean,
                  const Tensor& var) {
  require_f32(n, x);
  if (x.shape.size() < 2) fail(n, "input rank must be at least 2");
  const std::int64_t N = x.shape[0], C = x.shape[1];
  const std::int64_t inner = static_cast<std::int64_t>(x.numel()) / (N * C);
  for (const Tensor* p : {&scale, &shift, &mean, &var})
    if (static_cast<std::int64_t>(p->numel()) != C) fail(n, "parameter length mismatch");
  const float eps = n.get_f("epsilon", 1e-5f);
  Tensor out = x;
  for (std::int64_t c = 0; c < C; ++c) {
    const auto k = static_cast<std::size_t>(c);
    const float a = scale.f[k] / std::sqrt(var.f[k] + eps);
    const float b = shift.f[k] - a * mean.f[k];
    for (std::int64_t b_i = 0; b_i < N; ++b_i) {
      float* p = out.f.data() + (b_i * C + c) * inner;
      for (std::int64_t j = 0; j < inner; ++j) p[j] = a * p[j] + b;
    }
  }
  return out;
}

Tensor pool(const Node& n, const Tensor& x, bool is_max) {
  require_f32(n, x);
  if (x.shape.size() != 4) fail(n, "only NCHW pooling is supported");
  const std::int64_t N = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3];
  const auto kernel = n.get_ints("kernel_shape", {});
  if (kernel.size() != 2) fail(n, "kernel_shape must have two entries");
  const auto win = window_attrs(n, kernel, H, W);
  const bool ceil_mode = n.get_i("ceil_mode", 0) != 0;
  const bool include_pad = n.get_i("count_include_pad", 0) != 0;
  const std::int64_t oh = out_extent(H, kernel[0], win.strides[0], win.dilations[0], win.pads[0], win.pads[2], ceil_mode);
  const std::int64_t ow = out_extent(W, kernel[1], win.strides[1], win.dilations[1], win.pads[1], win.pads[3], ceil_mode);
  Tensor out = Tensor::zeros({N, C, oh, ow});
  for (std::int64_t plane = 0; plane < N * C; ++plane) {
    const float* src = x.f.data() + plane * H * W;
    float* dst = out.f.data() + plane * oh * ow;
    for (std::int64_t oy = 0; oy < oh; ++oy)
      for (std::int64_t ox = 0; ox < ow; ++ox) {
        float acc = is_max ? -std::numeric_limits<float>::infinity() : 0.0f;
        std::int64_t count = 0;
        for (std::int64_t ki = 0; ki < kernel[0]; ++ki) {
          const std::int64_t iy = oy * win.strides[0] - win.pads[0] + ki * win.dilations[0];
          for (std::int64_t kj = 0; kj < kernel[1]; ++kj) {
            const std::int64_t ix = ox * win.strides[1] - win.pads[1] + kj * win.dilations[1];
            const bool inside = iy >= 0 && iy < H && ix >= 0 && ix < W;
            if (!inside) {
              // Padding cells only count toward the divisor when they lie in the padded extent.
              if (!is_max && include_pad && iy < H + win.pads[2] && ix < W + win.pads[3]) ++count;
              continue;
            }
            const float v = src[iy * W + ix];
            if (is_max) {
              acc = std::max(acc, v);
            } else {
              acc += v;
            }
            ++count;
          }
        }
        dst[oy * ow + ox] = is_max ? acc : (count > 0 ? acc / static_cast<float>(count) : 0.0f);
      }
  }
  return out;
}

Tensor global_average_pool(const Node& n, const Tensor& x) {
  require_f32(n, x);
  if (x.shape.size() < 3) fail(n, "input rank must be at least 3");
  const std::int64_t N = x.shape[0], C = x.shape[1];
  const std::int64_t inner = static_cast<std::int64_t>(x.numel()) / (N * C);
  std::vector<std::int64_t> shape = {N, C};
  shape.resize(x.shape.size(), 1);
  Tensor out = Tensor::zeros(shape);
  for (std::int64_t plane = 0; plane < N * C; ++plane) {
    double sum = 0.0;
    const float* p = x.f.data() + plane * inner;
    for (std::int64_t j = 0; j < inner; ++j) sum += p[j];
    out.f[static_cast<std::size_t>(plane)] = static_cast<float>(sum / static_cast<double>(inner));
  }
  return out;
}

Tensor gemm(const Node& n, const Tensor& a, const Tensor& b, const Tensor* c) {
  require_f32(n, a);
  require_f32(n, b);
  if (a.shape.size() != 2 || b.shape.size() != 2) fail(n, "Gemm operands must be matrices");
  const bool ta = n.get_i("transA", 0) != 0;
  const bool tb = n.get_i("transB", 0) != 0;
  const float alpha = n.get_f("alpha", 1.0f);
  const float beta = n.get_f("beta", 1.0f);
  Eigen::Map<const RowMatrix> A(a.f.data(), a.shape[0], a.shape[1]);
  Eigen::Map<const RowMatrix> B(b.f.data(), b.shape[0], b.shape[1]);
  RowMatrix result;
  if (ta && tb) {
    result = A.transpose() * B.transpose();
  } else if (ta) {
    result = A.transpose() * B;
  } else if (tb) {
    if (A.cols() != B.cols()) fail(n, "inner dimensions differ");
    result = A * B.transpose();
  } else {
    if (A.cols() != B.rows()) fail(n, "inner dimensions differ");
    result = A * B;
  }
  result *= alpha;
  Tensor out;
  out.shape = {result.rows(), result.cols()};
  out.f.assign(result.data(), result.data() + result.size());
  if (c) {
    Tensor scaled_c = *c;
    for (auto& v : scaled_c.f) v *= beta;
    out = binary_op(n, out, scaled_c, std::plus<float>());
  }
  return out;
}

Tensor matmul(const Node& n, const Tensor& a, const Tensor& b) {
  require_f32(n, a);
  require_f32(n, b);
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0]) fail(n, "only 2-D MatMul is supported");
  Eigen::Map<const RowMatrix> A(a.f.data(), a.shape[0], a.shape[1]);
  Eigen::Map<const RowMatrix> B(b.f.data(), b.shape[0], b.shape[1]);
  RowMatrix result = A * B;
  Tensor out;
  out.shape = {result.rows(), result.cols()};
  out.f.assign(result.data(), result.data() + result.size());
  return out;
}

Tensor flatten(const Node& n, const Tensor& x) {
  std::int64_t axis = n.get_i("axis", 1);
  const auto rank = static_cast<std::int64_t>(x.shape.size());
  if (axis < 0) axis += rank;
  if (axis < 0 || axis > rank) fail(n, "axis out of range");
  std::int64_t outer = 1;
  for (std::int64_t k = 0; k < axis; ++k) outer *= x.shape[static_cast<std::size_t>(k)];
  Tensor out = x;
  out.shape = {outer, static_cast<std::int64_t>(x.numel()) / std::max<std::int64_t>(outer, 1)};
  return out;
}

Tensor reshape(const Node& n, const Tensor& x, const Tensor& shape) {
  if (shape.dtype != DType::i64) fail(n, "shape input must be int64");
  std::vector<std::int64_t> dims = shape.i;
  std::int64_t known = 1;
  int infer = -1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] == 0) {
      if (k >= x.shape.size()) fail(n, "zero dimension copies a missing input axis");
      dims[k] = x.shape[k];
    }
    if (dims[k] == -1) {
      if (infer >= 0) fail(n, "more than one inferred dimension");
      infer = static_cast<int>(k);
    } else {
      known *= dims[k];
    }
  }
  const auto total = static_cast<std::int64_t>(x.numel());
  if (infer >= 0) dims[static_cast<std::size_t>(infer)] = known ? total / known : 0;
  Tensor out = x;
  out.shape = dims;
  if (out.numel() != x.numel()) fail(n, "element count changes");
  return out;
}

}  // namespace

struct Graph::Impl {
  std::string input_name;
  std::string output_name;
  std::vector<std::int64_t> input_shape;
  std::vector<std::int64_t> output_shape;
  std::map<std::string, std::string> metadata;
  std::unordered_map<std::string, TensorPtr> initializers;
  std::vector<Node> nodes;
  // Index of the last node reading each intermediate value; lets run() drop
  // activations early.
  std::unordered_map<std::string, std::size_t> last_use;
};

Graph Graph::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw FileNotFoundError("model file not found: " + path.string());
  const auto bytes = io::read_file(path);
  try {
    return parse(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Graph Graph::parse(std::span<const std::uint8_t> bytes) {
  ::onnx::ModelProto model;
  if (bytes.size() > static_cast<std::size_t>(std::numeric_limits<int>::max()) ||
      !model.ParseFromArray(bytes.data(), static_cast<int>(bytes.size())) || !model.has_graph()) {
    throw DataError("not a parseable ONNX model");
  }
  auto impl = std::make_shared<Impl>();
  const auto& g = model.graph();
  for (const auto& prop : model.metadata_props()) impl->metadata[prop.key()] = prop.value();
  for (const auto& init : g.initializer())
    impl->initializers[init.name()] = std::make_shared<const Tensor>(convert_tensor(init));

  std::vector<const ::onnx::ValueInfoProto*> inputs;
  for (const auto& in : g.input())
    if (!impl->initializers.count(in.name())) inputs.push_back(&in);
  if (inputs.size() != 1) throw DataError("graph must have exactly one non-initializer input");
  if (g.output_size() != 1) throw DataError("graph must have exactly one output");
  impl->input_name = inputs[0]->name();
  impl->input_shape = declared_shape(*inputs[0]);
  impl->output_name = g.output(0).name();
  impl->output_shape = declared_shape(g.output(0));

  for (const auto& np : g.node()) {
    Node node;
    node.op = np.op_type();
    node.name = np.name();
    if (!np.domain().empty() && np.domain() != "ai.onnx") throw DataError("unsupported operator domain " + np.domain());
    if (!supported_ops().count(node.op)) throw DataError("unsupported operator " + node.op);
    node.inputs.assign(np.input().begin(), np.input().end());
    node.outputs.assign(np.output().begin(), np.output().end());
    for (const auto& a : np.attribute()) {
      Attribute attr;
      attr.i = a.i();
      attr.f = a.f();
      attr.s = a.s();
      attr.ints.assign(a.ints().begin(), a.ints().end());
      attr.floats.assign(a.floats().begin(), a.floats().end());
      if (a.has_t()) attr.t = std::make_shared<const Tensor>(convert_tensor(a.t()));
      node.attrs[a.name()] = std::move(attr);
    }
    impl->nodes.push_back(std::move(node));
  }
  for (std::size_t k = 0; k < impl->nodes.size(); ++k)
    for (const auto& in : impl->nodes[k].inputs) impl->last_use[in] = k;
  return Graph(std::move(impl));
}

const std::string& Graph::input_name() const { return impl_->input_name; }
const std::string& Graph::output_name() const { return impl_->output_name; }
const std::vector<std::int64_t>& Graph::input_shape() const { return impl_->input_shape; }
const std::vector<std::int64_t>& Graph::output_shape() const { return impl_->output_shape; }
const std::map<std::string, std::string>& Graph::metadata() const { return impl_->metadata; }
std::size_t Graph::node_count() const { return impl_->nodes.size(); }

Tensor Graph::run(const Tensor& input) const {
  const Impl& g = *impl_;
  std::unordered_map<std::string, TensorPtr> values;
  values[g.input_name] = std::make_shared<const Tensor>(input);

  auto fetch = [&](const Node& n, std::size_t k) -> const Tensor* {
    if (k >= n.inputs.size() || n.inputs[k].empty()) return nullptr;
    const auto& name = n.inputs[k];
    if (const auto it = values.find(name); it != values.end()) return it->second.get();
    if (const auto it = g.initializers.find(name); it != g.initializers.end()) return it->second.get();
    fail(n, "input '" + name + "' is not available");
  };
  auto need = [&](const Node& n, std::size_t k) -> const Tensor& {
    const Tensor* t = fetch(n, k);
    if (!t) fail(n, "missing required input " + std::to_string(k));
    return *t;
  };

  for (std::size_t idx = 0; idx < g.nodes.size(); ++idx) {
    const Node& n = g.nodes[idx];
    Tensor out;
    if (n.op == "Conv") {
      out = conv(n, need(n, 0), need(n, 1), fetch(n, 2));
    } else if (n.op == "BatchNormalization") {
      out = batch_norm(n, need(n, 0), need(n, 1), need(n, 2), need(n, 3), need(n, 4));
    } else if (n.op == "Relu") {
      out = require_f32(n, need(n, 0));
      for (auto& v : out.f) v = v > 0.0f ? v : 0.0f;
    } else if (n.op == "MaxPool") {
      out = pool(n, need(n, 0), true);
    } else if (n.op == "AveragePool") {
      out = pool(n, need(n, 0), false);
    } else if (n.op == "GlobalAveragePool") {
      out = global_average_pool(n, need(n, 0));
    } else if (n.op == "Add") {
      out = binary_op(n, need(n, 0), need(n, 1), std::plus<float>());
    } else if (n.op == "Sub") {
      out = binary_op(n, need(n, 0), need(n, 1), std::minus<float>());
    } else if (n.op == "Mul") {
      out = binary_op(n, need(n, 0), need(n, 1), std::multiplies<float>());
    } else if (n.op == "Div") {
      out = binary_op(n, need(n, 0), need(n, 1), std::divides<float>());
    } else if (n.op == "Flatten") {
      out = flatten(n, need(n, 0));
    } else if (n.op == "Reshape") {
      out = reshape(n, need(n, 0), need(n, 1));
    } else if (n.op == "Gemm") {
      out = gemm(n, need(n, 0), need(n, 1), fetch(n, 2));
    } else if (n.op == "MatMul") {
      out = matmul(n, need(n, 0), need(n, 1));
    } else if (n.op == "Constant") {
      const auto it = n.attrs.find("value");
      if (it == n.attrs.end() || !it->second.t) fail(n, "only tensor-valued constants are supported");
      out = *it->second.t;
    } else if (n.op == "Identity") {
      out = need(n, 0);
    }
    if (n.outputs.empty()) fail(n, "node has no outputs");
    values[n.outputs[0]] = std::make_shared<const Tensor>(std::move(out));
    for (const auto& in : n.inputs) {
      const auto it = g.last_use.find(in);
      if (it != g.last_use.end() && it->second == idx && in != g.output_name) values.erase(in);
    }
  }
  const auto it = values.find(g.output_name);
  if (it == values.end()) throw DataError("graph never produced its output '" + g.output_name + "'");
  return *it->second;
}

}  // namespace cervix::onnx
