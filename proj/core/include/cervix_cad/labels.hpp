#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cervix {

enum class LabelScheme { binary, ternary };

inline LabelScheme parse_scheme(std::string_view text) {
  if (text == "binary") return LabelScheme::binary;
  if (text == "ternary") return LabelScheme::ternary;
  throw std::invalid_argument("unknown label scheme '" + std::string(text) + "' (expected binary or ternary)");
}

inline std::string_view scheme_name(LabelScheme s) { return s == LabelScheme::binary ? "binary" : "ternary"; }

inline int class_count(LabelScheme s) { return s == LabelScheme::binary ? 2 : 3; }

/// Label strings in class-index order. For the binary task class 1
/// (`abnormal`) is the positive class.
inline std::vector<std::string_view> class_labels(LabelScheme s) {
  if (s == LabelScheme::binary) return {"normal", "abnormal"};
  return {"type1", "type2", "type3"};
}

inline int label_index(LabelScheme s, std::string_view label) {
  const auto labels = class_labels(s);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  throw std::invalid_argument("label '" + std::string(label) + "' is not part of the " + std::string(scheme_name(s)) +
                              " scheme");
}

inline std::string_view label_name(LabelScheme s, int index) { return class_labels(s).at(static_cast<std::size_t>(index)); }

}  // namespace cervix
