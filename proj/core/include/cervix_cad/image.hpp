#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cervix {

/// Decoded 8-bit RGB raster, row-major, interleaved channels.
class ImageRgb {
 public:
  ImageRgb(int width, int height);
  ImageRgb(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const ImageRgb&, const ImageRgb&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3 +
           static_cast<std::size_t>(c);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

inline constexpr int kModelInputSize = 224;

/// Bilinear resampling with half-pixel centers. Same-size input is returned unchanged.
ImageRgb resize_image(const ImageRgb& img, int target_w, int target_h);

/// Centered region of `fraction` of each side, used for unsegmented inputs.
ImageRgb center_crop(const ImageRgb& img, double fraction);

}  // namespace cervix
