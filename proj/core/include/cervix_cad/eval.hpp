#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cervix_cad/feature_matrix.hpp"
#include "cervix_cad/svm.hpp"

namespace cervix {

// ---- folds ----------------------------------------------------------------

struct FoldSplit {
  int k = 0;
  std::vector<int> assignment;  ///< fold index per sample
  std::uint64_t seed = 0;

  std::vector<int> test_indices(int fold) const;
  std::vector<int> train_indices(int fold) const;
};

/// Shuffles each class with the seed, then deals samples to folds round-robin.
/// The dealing position carries over from one class to the next so overall
/// fold sizes also differ by at most one. Every class needs at least k samples.
FoldSplit stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

/// As stratified_kfold, but deals whole groups (all augmentations of one
/// source image) so no group straddles folds. Each group takes the label of
/// its first member.
FoldSplit stratified_group_kfold(std::span<const int> labels, std::span<const std::string> groups, int k,
                                 std::uint64_t seed);

// ---- metrics --------------------------------------------------------------

/// Rows are the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes = 2);

  int classes() const { return classes_; }
  std::int64_t at(int truth, int predicted) const;
  void add(int truth, int predicted, std::int64_t count = 1);
  std::int64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int classes_;
  std::vector<std::int64_t> counts_;
};

/// Percentages in [0, 100].
struct MetricValues {
  double specificity = 0.0;
  double sensitivity = 0.0;
  double accuracy = 0.0;
  bool zero_denominator = false;  ///< some ratio had an empty denominator and was set to 0
};

/// Binary (class 1 positive): sensitivity TP/(TP+FN), specificity TN/(TN+FP),
/// accuracy (TP+TN)/total. More classes: one-vs-rest sensitivity and
/// specificity averaged over classes, accuracy = trace/total.
MetricValues compute_metrics(const ConfusionMatrix& cm);

// ---- experiment -----------------------------------------------------------

enum class PipelineVariant { rn50, rn101, rn152, fusion, fusion_lda };

PipelineVariant parse_pipeline_variant(std::string_view text);
std::string_view pipeline_variant_name(PipelineVariant v);
/// Human-readable name, e.g. "ResNet50 + ResNet101 + ResNet152 + LDA".
std::string_view pipeline_variant_title(PipelineVariant v);

struct ExperimentOptions {
  std::vector<int> ks = {5, 10};
  std::vector<PipelineVariant> variants = {PipelineVariant::rn50, PipelineVariant::rn101, PipelineVariant::rn152,
                                           PipelineVariant::fusion, PipelineVariant::fusion_lda};
  std::uint64_t seed = 0;
  SvmOptions svm;
  double lda_shrinkage = 0.1;
  bool per_fold_mean = false;  ///< report the mean of fold metrics instead of pooled counts
  std::optional<std::vector<std::string>> groups;  ///< enables group-aware folds
};

struct ReportRow {
  int k = 0;
  PipelineVariant variant = PipelineVariant::fusion;
  MetricValues metrics;  ///< the reported figure (pooled or per-fold mean)
  ConfusionMatrix pooled{2};
  std::vector<MetricValues> per_fold;
};

struct MetricsReport {
  LabelScheme scheme = LabelScheme::binary;
  std::uint64_t seed = 0;
  bool per_fold_mean = false;
  std::vector<ReportRow> rows;  ///< ordered by k, then variant
};

/// `features` is the fused matrix; single-backbone variants use its thirds.
/// Per fold: scaler fit on train, optional LDA fit on train, one-vs-rest SVM,
/// held-out predictions accumulated into one confusion matrix per (k, variant).
MetricsReport run_experiment(const FeatureMatrix& features, const ExperimentOptions& options);

// ---- report emission ------------------------------------------------------

enum class ReportFormat { text, tsv, svg };

ReportFormat parse_report_format(std::string_view text);

std::string validation_label(int k);  ///< "5-fold"

/// `validation\tvariant\tspecificity\tsensitivity\taccuracy`, two decimals.
std::string format_tsv(const MetricsReport& report);
/// Aligned table; `provenance` lines are appended as a footer.
std::string format_text(const MetricsReport& report, std::string_view provenance = {});
/// Grouped bar chart, one group of three bars per row.
std::string format_svg(const MetricsReport& report, std::string_view provenance = {});

/// Reads a TSV written by format_tsv back into report rows (metrics only).
MetricsReport parse_tsv(const std::string& text, LabelScheme scheme);

void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& out,
                 std::string_view provenance = {});

}  // namespace cervix
