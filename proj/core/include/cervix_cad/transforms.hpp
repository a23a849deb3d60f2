#pragma once

#include <string>
#include <vector>

#include "cervix_cad/image.hpp"

namespace cervix {

enum class TransformKind { rotate, flip_h, flip_v, brightness, contrast, translate };

/// One augmentation step. Build through the named factories, which enforce
/// the parameter ranges; only the field matching `kind` is meaningful.
struct TransformSpec {
  TransformKind kind = TransformKind::rotate;
  double rotate_degrees = 0.0;
  int brightness_delta = 0;
  double contrast_factor = 1.0;
  int translate_dx = 0;
  int translate_dy = 0;

  /// Counter-clockwise rotation about the image center.
  static TransformSpec rotate(double degrees);
  static TransformSpec flip_h();
  static TransformSpec flip_v();
  /// Deltas outside [-255, 255] saturate to the nearest bound.
  static TransformSpec brightness(int delta);
  static TransformSpec contrast(double factor);
  static TransformSpec translate(int dx, int dy);

  /// Throws std::invalid_argument when the active parameter is out of range.
  void validate() const;

  std::string describe() const;

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

using TransformChain = std::vector<TransformSpec>;

/// Output keeps the input dimensions. Rotation and translation fill vacated
/// pixels with black; photometric steps clamp to [0, 255].
ImageRgb apply_transform(const ImageRgb& img, const TransformSpec& t);

ImageRgb apply_chain(const ImageRgb& img, const TransformChain& chain);

}  // namespace cervix
