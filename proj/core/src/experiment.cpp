#include <future>
#include <stdexcept>
#include <string>

#include "cervix_cad/eval.hpp"
#include "cervix_cad/fusion.hpp"
#include "cervix_cad/lda.hpp"
#include "cervix_cad/rng.hpp"

namespace cervix {

PipelineVariant parse_pipeline_variant(std::string_view text) {
  if (text == "rn50") return PipelineVariant::rn50;
  if (text == "rn101") return PipelineVariant::rn101;
  if (text == "rn152") return PipelineVariant::rn152;
  if (text == "fusion") return PipelineVariant::fusion;
  if (text == "fusion+lda") return PipelineVariant::fusion_lda;
  throw std::invalid_argument("unknown pipeline variant '" + std::string(text) + "'");
}

std::string_view pipeline_variant_name(PipelineVariant v) {
  switch (v) {
    case PipelineVariant::rn50: return "rn50";
    case PipelineVariant::rn101: return "rn101";
    case PipelineVariant::rn152: return "rn152";
    case PipelineVariant::fusion: return "fusion";
    case PipelineVariant::fusion_lda: return "fusion+lda";
  }
  return "?";
}

std::string_view pipeline_variant_title(PipelineVariant v) {
  switch (v) {
    case PipelineVariant::rn50: return "ResNet50";
    case PipelineVariant::rn101: return "ResNet101";
    case PipelineVariant::rn152: return "ResNet152";
    case PipelineVariant::fusion: return "ResNet50 + ResNet101 + ResNet152";
    case PipelineVariant::fusion_lda: return "ResNet50 + ResNet101 + ResNet152 + LDA";
  }
  return "?";
}

namespace {

FeatureMatrix variant_features(const FeatureMatrix& fused, PipelineVariant v) {
  if (v == PipelineVariant::fusion || v == PipelineVariant::fusion_lda) return fused;
  if (fused.d() % 3 != 0) throw std::invalid_argument("fused width is not three equal descriptor blocks");
  const Eigen::Index block = fused.d() / 3;
  const Eigen::Index index = v == PipelineVariant::rn50 ? 0 : v == PipelineVariant::rn101 ? 1 : 2;
  return fused.cols(index * block, block);
}

ConfusionMatrix evaluate_fold(const FeatureMatrix& train, const FeatureMatrix& test, PipelineVariant v,
                              const ExperimentOptions& options, std::uint64_t fold_seed) {
  const MinMaxScaler scaler = fit_scaler(train);
  FeatureMatrix tr = apply_scaler(scaler, train);
  FeatureMatrix te = apply_scaler(scaler, test);
  if (v == PipelineVariant::fusion_lda) {
    const LdaModel lda = fit_lda_escalating(tr, options.lda_shrinkage);
    tr = project(lda, tr);
    te = project(lda, te);
  }
  SvmOptions svm = options.svm;
  svm.seed = fold_seed;
  const MulticlassSvm model = train_multiclass(tr, svm);
  const auto predicted = predict_classes(model, te.values);
  ConfusionMatrix cm(train.num_classes());
  for (std::size_t i = 0; i < predicted.size(); ++i) cm.add(te.labels[i], predicted[i]);
  return cm;
}

}  // namespace

MetricsReport run_experiment(const FeatureMatrix& features, const ExperimentOptions& options) {
  if (options.ks.empty() || options.variants.empty()) throw std::invalid_argument("experiment needs k values and variants");
  if (options.groups && options.groups->size() != static_cast<std::size_t>(features.n()))
    throw std::invalid_argument("group list length differs from sample count");

  MetricsReport report;
  report.scheme = features.scheme;
  report.seed = options.seed;
  report.per_fold_mean = options.per_fold_mean;
  const int C = features.num_classes();

  for (const int k : options.ks) {
    const std::uint64_t split_seed = mix_seed(options.seed, static_cast<std::uint64_t>(k));
    const FoldSplit split = options.groups ? stratified_group_kfold(features.labels, *options.groups, k, split_seed)
                                           : stratified_kfold(features.labels, k, split_seed);
    std::vector<ReportRow> rows;
    for (const auto v : options.variants) {
      ReportRow row;
      row.k = k;
      row.variant = v;
      row.pooled = ConfusionMatrix(C);
      rows.push_back(std::move(row));
    }
    // Folds are independent; each task returns one matrix per variant and the
    // reduction below runs in fold order, so results do not depend on timing.
    std::vector<std::future<std::vector<ConfusionMatrix>>> tasks;
    for (int fold = 0; fold < k; ++fold) {
      tasks.push_back(std::async(std::launch::async, [&, fold] {
        const FeatureMatrix train_all = features.rows(split.train_indices(fold));
        const FeatureMatrix test_all = features.rows(split.test_indices(fold));
        const std::uint64_t fold_seed = mix_seed(split_seed, static_cast<std::uint64_t>(fold) + 1);
        std::vector<ConfusionMatrix> out;
        for (const auto v : options.variants)
          out.push_back(evaluate_fold(variant_features(train_all, v), variant_features(test_all, v), v, options, fold_seed));
        return out;
      }));
    }
    for (auto& task : tasks) {
      const auto matrices = task.get();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].per_fold.push_back(compute_metrics(matrices[i]));
        rows[i].pooled += matrices[i];
      }
    }
    for (auto& row : rows) {
      if (options.per_fold_mean) {
        MetricValues mean;
        for (const auto& f : row.per_fold) {
          mean.specificity += f.specificity;
          mean.sensitivity += f.sensitivity;
          mean.accuracy += f.accuracy;
          mean.zero_denominator = mean.zero_denominator || f.zero_denominator;
        }
        const auto n = static_cast<double>(row.per_fold.size());
        mean.specificity /= n;
        mean.sensitivity /= n;
        mean.accuracy /= n;
        row.metrics = mean;
      } else {
        row.metrics = compute_metrics(row.pooled);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace cervix
