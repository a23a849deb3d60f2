#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cervix_cad/image.hpp"

namespace cervix {

/// Decodes PNG or JPEG, detected from the leading magic bytes. Alpha and
/// grayscale inputs are converted to RGB.
ImageRgb decode_image(std::span<const std::uint8_t> bytes);
ImageRgb read_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const ImageRgb& img);
std::vector<std::uint8_t> encode_jpeg(const ImageRgb& img, int quality = 95);

void write_png(const std::filesystem::path& path, const ImageRgb& img);

}  // namespace cervix
