#include <stdexcept>

#include "cervix_cad/eval.hpp"

namespace cervix {

ConfusionMatrix::ConfusionMatrix(int classes) : classes_(classes) {
  if (classes < 2) throw std::invalid_argument("confusion matrix needs at least two classes");
  counts_.assign(static_cast<std::size_t>(classes * classes), 0);
}

std::int64_t ConfusionMatrix::at(int truth, int predicted) const {
  if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_)
    throw std::out_of_range("confusion matrix index out of range");
  return counts_[static_cast<std::size_t>(truth * classes_ + predicted)];
}

void ConfusionMatrix::add(int truth, int predicted, std::int64_t count) {
  if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_)
    throw std::out_of_range("confusion matrix index out of range");
  if (count < 0) throw std::invalid_argument("confusion counts are non-negative");
  counts_[static_cast<std::size_t>(truth * classes_ + predicted)] += count;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw std::invalid_argument("confusion matrices differ in class count");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

namespace {

double percent(std::int64_t num, std::int64_t den, bool& zero_flag) {
  if (den == 0) {
    zero_flag = true;
    return 0.0;
  }
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricValues compute_metrics(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw std::invalid_argument("cannot compute metrics of an empty confusion matrix");
  MetricValues m;
  if (cm.classes() == 2) {
    const auto tp = cm.at(1, 1);
    const auto fn = cm.at(1, 0);
    const auto tn = cm.at(0, 0);
    const auto fp = cm.at(0, 1);
    m.sensitivity = percent(tp, tp + fn, m.zero_denominator);
    m.specificity = percent(tn, tn + fp, m.zero_denominator);
    m.accuracy = percent(tp + tn, total, m.zero_denominator);
    return m;
  }
  std::int64_t diagonal = 0;
  for (int c = 0; c < cm.classes(); ++c) {
    std::int64_t row = 0;
    std::int64_t col = 0;
    for (int j = 0; j < cm.classes(); ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    const auto tp = cm.at(c, c);
    const auto fn = row - tp;
    const auto fp = col - tp;
    const auto tn = total - tp - fn - fp;
    m.sensitivity += percent(tp, tp + fn, m.zero_denominator);
    m.specificity += percent(tn, tn + fp, m.zero_denominator);
    diagonal += tp;
  }
  m.sensitivity /= cm.classes();
  m.specificity /= cm.classes();
  m.accuracy = percent(diagonal, total, m.zero_denominator);
  return m;
}

}  // namespace cervix
