#include "cervix_cad/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cervix {

ImageRgb::ImageRgb(int width, int height) : ImageRgb(width, height, {}) {}

ImageRgb::ImageRgb(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (data_.empty()) {
    data_.assign(expected, 0);
  } else if (data_.size() != expected) {
    throw std::invalid_argument("image buffer holds " + std::to_string(data_.size()) + " samples, expected " +
                                std::to_string(expected));
  }
}

ImageRgb resize_image(const ImageRgb& img, int target_w, int target_h) {
  if (target_w <= 0 || target_h <= 0) throw std::invalid_argument("resize target must be positive");
  if (target_w == img.width() && target_h == img.height()) return img;

  ImageRgb out(target_w, target_h);
  const double sx = static_cast<double>(img.width()) / target_w;
  const double sy = static_cast<double>(img.height()) / target_h;
  for (int y = 0; y < target_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height() - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < target_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width() - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0, c) * (1.0 - wx) + img.at(x1, y0, c) * wx;
        const double bottom = img.at(x0, y1, c) * (1.0 - wx) + img.at(x1, y1, c) * wx;
        const double v = top * (1.0 - wy) + bottom * wy;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

ImageRgb center_crop(const ImageRgb& img, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("crop fraction must be in (0, 1]");
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * fraction)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * fraction)));
  const int x0 = (img.width() - w) / 2;
  const int y0 = (img.height() - h) / 2;
  ImageRgb out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
  return out;
}

}  // namespace cervix
