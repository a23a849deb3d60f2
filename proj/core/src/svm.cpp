#include "cervix_cad/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/error.hpp"
#include "cervix_cad/rng.hpp"

namespace cervix {

namespace {

void check_labels(Eigen::Index n, std::span<const int> y) {
  if (static_cast<Eigen::Index>(y.size()) != n) throw std::invalid_argument("label count differs from row count");
  bool has_pos = false;
  bool has_neg = false;
  for (int label : y) {
    if (label == 1) {
      has_pos = true;
    } else if (label == -1) {
      has_neg = true;
    } else {
      throw std::invalid_argument("binary SVM labels must be -1 or +1");
    }
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("binary SVM needs both classes present");
}

void check_options(const SvmOptions& options) {
  if (!(options.c > 0.0)) throw std::invalid_argument("SVM C must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("SVM max_iter must be at least 1");
}

// Gram form pays off once there are fewer samples than features.
bool use_gram(const RowMatrixXd& x) { return x.rows() <= x.cols() + 1; }

/// x x^T + 1, the kernel of the bias-augmented features.
Eigen::MatrixXd augmented_gram(const RowMatrixXd& x) {
  Eigen::MatrixXd k(x.rows(), x.rows());
  k.triangularView<Eigen::Lower>() = x * x.transpose();
  k = k.selfadjointView<Eigen::Lower>();
  k.array() += 1.0;
  return k;
}

/// Randomized dual coordinate descent. `grad(i)` returns the dual gradient
/// component y_i (w.x_i + b) - 1 and `update(i, step)` adds step * y_i x_i to
/// the primal state; `objective()` evaluates the dual objective.
template <typename Grad, typename Update, typename Objective, typename Refresh>
SvmModel coordinate_descent(Eigen::Index n, const Eigen::VectorXd& qdiag, std::span<const int> y,
                            const SvmOptions& options, Eigen::VectorXd& alpha, Grad grad, Update update,
                            Objective objective, Refresh refresh, SvmTrace* trace) {
  const double C = options.c;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(options.seed);

  SvmModel model;
  model.c_param = C;
  for (int epoch = 0; epoch < options.max_iter; ++epoch) {
    rng.shuffle(std::span(order));
    double max_violation = 0.0;
    for (const Eigen::Index i : order) {
      const double g = grad(i);
      double pg = g;
      if (alpha(i) == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha(i) == C) {
        pg = std::max(g, 0.0);
      }
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha(i);
      alpha(i) = std::clamp(old - g / qdiag(i), 0.0, C);
      const double step = (alpha(i) - old) * y[static_cast<std::size_t>(i)];
      if (step != 0.0) update(i, step);
    }
    model.iterations_used = epoch + 1;
    if (trace) trace->dual_objective.push_back(objective());
    if (max_violation < options.tol) {
      // Re-derive the state from alpha so rounding drift cannot fake convergence.
      refresh();
      double worst = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double g = grad(i);
        const double pg = alpha(i) == 0.0 ? std::min(g, 0.0) : alpha(i) == C ? std::max(g, 0.0) : g;
        worst = std::max(worst, std::abs(pg));
      }
      if (worst < options.tol) {
        model.converged = true;
        break;
      }
    }
  }
  return model;
}

SvmModel solve_primal(const RowMatrixXd& x, std::span<const int> y, const SvmOptions& options, SvmTrace* trace) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  double b = 0.0;  // weight of the appended constant feature
  Eigen::VectorXd qdiag(n);
  for (Eigen::Index i = 0; i < n; ++i) qdiag(i) = x.row(i).squaredNorm() + 1.0;

  SvmModel model = coordinate_descent(
      n, qdiag, y, options, alpha,
      [&](Eigen::Index i) { return y[static_cast<std::size_t>(i)] * (x.row(i).dot(w) + b) - 1.0; },
      [&](Eigen::Index i, double step) {
        w.noalias() += step * x.row(i).transpose();
        b += step;
      },
      [&] { return alpha.sum() - 0.5 * (w.squaredNorm() + b * b); },
      [&] {
        w.setZero();
        b = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double ay = alpha(i) * y[static_cast<std::size_t>(i)];
          if (ay == 0.0) continue;
          w.noalias() += ay * x.row(i).transpose();
          b += ay;
        }
      },
      trace);
  model.weights = std::move(w);
  model.bias = b;
  if (trace) trace->alpha = alpha;
  return model;
}

SvmModel solve_gram(const RowMatrixXd& x, const Eigen::MatrixXd& k, std::span<const int> y, const SvmOptions& options,
                    SvmTrace* trace) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)];
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  // f(i) = sum_j alpha_j y_j k(i, j), i.e. the decision value w.x_i + b.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd qdiag = k.diagonal();

  SvmModel model = coordinate_descent(
      n, qdiag, y, options, alpha, [&](Eigen::Index i) { return yv(i) * f(i) - 1.0; },
      [&](Eigen::Index i, double step) { f.noalias() += step * k.col(i); },
      [&] { return alpha.sum() - 0.5 * alpha.cwiseProduct(yv).dot(f); },
      [&] { f.noalias() = k * alpha.cwiseProduct(yv); }, trace);

  const Eigen::VectorXd ay = alpha.cwiseProduct(yv);
  model.weights = x.transpose() * ay;
  model.bias = ay.sum();
  if (trace) trace->alpha = alpha;
  return model;
}

void finish(SvmModel& model, const RowMatrixXd& x, std::span<const int> y, const Eigen::VectorXd* alpha) {
#ifndef NDEBUG
  if (alpha) {
    Eigen::VectorXd check = Eigen::VectorXd::Zero(x.cols());
    double check_b = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      check.noalias() += (*alpha)(i) * y[static_cast<std::size_t>(i)] * x.row(i).transpose();
      check_b += (*alpha)(i) * y[static_cast<std::size_t>(i)];
    }
    const double scale = std::max(1.0, model.weights.norm());
    if ((check - model.weights).norm() > 1e-8 * scale || std::abs(check_b - model.bias) > 1e-8 * scale)
      throw NumericalError("SVM primal weights drifted from the dual variables");
  }
#else
  (void)x;
  (void)y;
  (void)alpha;
#endif
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) throw NumericalError("SVM produced non-finite weights");
}

SvmModel train_with(const RowMatrixXd& x, std::span<const int> y, const SvmOptions& options, SvmTrace* trace,
                    const Eigen::MatrixXd* gram) {
  check_options(options);
  check_labels(x.rows(), y);
  SvmTrace local;
  SvmTrace* t = trace ? trace : &local;
#ifdef NDEBUG
  if (!trace) t = nullptr;
#endif
  SvmModel model = gram ? solve_gram(x, *gram, y, options, t) : solve_primal(x, y, options, t);
  finish(model, x, y, t ? &t->alpha : nullptr);
  return model;
}

std::vector<int> one_vs_rest_labels(const FeatureMatrix& m, int positive_class) {
  std::vector<int> y(m.labels.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = m.labels[i] == positive_class ? 1 : -1;
  return y;
}

}  // namespace

SvmModel train_binary(const RowMatrixXd& x, std::span<const int> y, const SvmOptions& options, SvmTrace* trace) {
  check_options(options);
  check_labels(x.rows(), y);
  if (use_gram(x)) {
    const Eigen::MatrixXd k = augmented_gram(x);
    return train_with(x, y, options, trace, &k);
  }
  return train_with(x, y, options, trace, nullptr);
}

SvmModel train_binary(const FeatureMatrix& m, int positive_class, const SvmOptions& options, SvmTrace* trace) {
  return train_binary(m.values, one_vs_rest_labels(m, positive_class), options, trace);
}

Prediction predict(const SvmModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != model.d())
    throw std::invalid_argument("SVM expects " + std::to_string(model.d()) + " features, got " + std::to_string(x.size()));
  const double score = x.dot(model.weights) + model.bias;
  return {score >= 0.0 ? 1 : -1, score};
}

Prediction predict(const SvmModel& model, std::span<const double> x) {
  return predict(model, Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size())));
}

MulticlassSvm train_multiclass(const FeatureMatrix& m, const SvmOptions& options) {
  const int C = m.num_classes();
  if (C < 2) throw std::invalid_argument("multiclass SVM needs at least two classes");
  check_options(options);
  std::optional<Eigen::MatrixXd> gram;
  if (use_gram(m.values)) gram = augmented_gram(m.values);
  MulticlassSvm out;
  for (int c = 0; c < C; ++c) {
    SvmOptions o = options;
    o.seed = mix_seed(options.seed, static_cast<std::uint64_t>(c));
    const auto y = one_vs_rest_labels(m, c);
    out.models.push_back(train_with(m.values, y, o, nullptr, gram ? &*gram : nullptr));
    out.classes.push_back(c);
  }
  return out;
}

int predict_class(const MulticlassSvm& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (model.models.size() == 2) return predict(model.models[1], x).label > 0 ? model.classes[1] : model.classes[0];
  std::size_t best = 0;
  double best_score = predict(model.models[0], x).score;
  for (std::size_t c = 1; c < model.models.size(); ++c) {
    const double s = predict(model.models[c], x).score;
    if (s > best_score) {
      best = c;
      best_score = s;
    }
  }
  return model.classes[best];
}

std::vector<int> predict_classes(const MulticlassSvm& model, const RowMatrixXd& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = predict_class(model, x.row(i));
  return out;
}

namespace {
constexpr std::string_view kSvmMagic = "SVM1";
}

std::vector<std::uint8_t> encode_svm(const SvmModel& model) {
  io::ByteWriter w;
  w.put_bytes(kSvmMagic);
  w.put_u32(static_cast<std::uint32_t>(model.d()));
  w.put_f64(model.bias);
  w.put_f64(model.c_param);
  for (Eigen::Index j = 0; j < model.d(); ++j) w.put_f64(model.weights(j));
  return w.bytes();
}

SvmModel decode_svm(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  if (r.get_bytes(4) != kSvmMagic) throw DataError("not an SVM model (bad magic)");
  const auto d = r.get_u32();
  SvmModel model;
  model.bias = r.get_f64();
  model.c_param = r.get_f64();
  if (static_cast<std::uint64_t>(d) * 8 != r.remaining()) throw DataError("SVM model size does not match header");
  model.weights.resize(d);
  for (std::uint32_t j = 0; j < d; ++j) model.weights(j) = r.get_f64();
  return model;
}

void save_svm(const std::filesystem::path& path, const SvmModel& model) { io::write_file_atomic(path, encode_svm(model)); }

SvmModel load_svm(const std::filesystem::path& path) { return decode_svm(io::read_file(path)); }

}  // namespace cervix
