#include "cervix_cad/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cervix {

TransformSpec TransformSpec::rotate(double degrees) {
  TransformSpec t;
  t.kind = TransformKind::rotate;
  t.rotate_degrees = degrees;
  t.validate();
  return t;
}

TransformSpec TransformSpec::flip_h() {
  TransformSpec t;
  t.kind = TransformKind::flip_h;
  return t;
}

TransformSpec TransformSpec::flip_v() {
  TransformSpec t;
  t.kind = TransformKind::flip_v;
  return t;
}

TransformSpec TransformSpec::brightness(int delta) {
  TransformSpec t;
  t.kind = TransformKind::brightness;
  t.brightness_delta = std::clamp(delta, -255, 255);
  return t;
}

TransformSpec TransformSpec::contrast(double factor) {
  TransformSpec t;
  t.kind = TransformKind::contrast;
  t.contrast_factor = factor;
  t.validate();
  return t;
}

TransformSpec TransformSpec::translate(int dx, int dy) {
  TransformSpec t;
  t.kind = TransformKind::translate;
  t.translate_dx = dx;
  t.translate_dy = dy;
  return t;
}

void TransformSpec::validate() const {
  switch (kind) {
    case TransformKind::rotate:
      if (!std::isfinite(rotate_degrees)) throw std::invalid_argument("rotation angle must be finite");
      break;
    case TransformKind::brightness:
      if (brightness_delta < -255 || brightness_delta > 255)
        throw std::invalid_argument("brightness delta must lie in [-255, 255]");
      break;
    case TransformKind::contrast:
      if (!(contrast_factor > 0.0) || !std::isfinite(contrast_factor))
        throw std::invalid_argument("contrast factor must be positive");
      break;
    case TransformKind::flip_h:
    case TransformKind::flip_v:
    case TransformKind::translate:
      break;
  }
}

std::string TransformSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case TransformKind::rotate: os << "rotate(" << rotate_degrees << ")"; break;
    case TransformKind::flip_h: os << "flip_h"; break;
    case TransformKind::flip_v: os << "flip_v"; break;
    case TransformKind::brightness: os << "brightness(" << brightness_delta << ")"; break;
    case TransformKind::contrast: os << "contrast(" << contrast_factor << ")"; break;
    case TransformKind::translate: os << "translate(" << translate_dx << "," << translate_dy << ")"; break;
  }
  return os.str();
}

namespace {

std::uint8_t clamp_u8(long v) { return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L)); }

// Exact sin/cos for quarter turns so 90/180/270 rotations of square images
// are lossless pixel permutations.
void rotation_terms(double degrees, double& c, double& s) {
  const double turns = degrees / 90.0;
  if (turns == std::round(turns)) {
    static constexpr double cs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const long q = ((std::lround(turns) % 4) + 4) % 4;
    c = cs[q][0];
    s = cs[q][1];
    return;
  }
  const double rad = degrees * std::numbers::pi / 180.0;
  c = std::cos(rad);
  s = std::sin(rad);
}

ImageRgb rotate(const ImageRgb& img, double degrees) {
  double c = 1;
  double s = 0;
  rotation_terms(degrees, c, s);
  const int w = img.width();
  const int h = img.height();
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  constexpr double snap = 1e-6;
  ImageRgb out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // y-up frame so positive angles turn content counter-clockwise on screen.
      const double u = x - cx;
      const double v = cy - y;
      double sx = cx + (u * c + v * s);
      double sy = cy - (-u * s + v * c);
      if (std::abs(sx - std::round(sx)) < snap) sx = std::round(sx);
      if (std::abs(sy - std::round(sy)) < snap) sy = std::round(sy);
      if (sx < 0 || sy < 0 || sx > w - 1 || sy > h - 1) continue;
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double wx = sx - x0;
      const double wy = sy - y0;
      for (int ch = 0; ch < 3; ++ch) {
        if (wx == 0.0 && wy == 0.0) {
          out.at(x, y, ch) = img.at(x0, y0, ch);
          continue;
        }
        const double top = img.at(x0, y0, ch) * (1 - wx) + img.at(x1, y0, ch) * wx;
        const double bottom = img.at(x0, y1, ch) * (1 - wx) + img.at(x1, y1, ch) * wx;
        out.at(x, y, ch) = clamp_u8(std::lround(top * (1 - wy) + bottom * wy));
      }
    }
  }
  return out;
}

}  // namespace

ImageRgb apply_transform(const ImageRgb& img, const TransformSpec& t) {
  t.validate();
  const int w = img.width();
  const int h = img.height();
  switch (t.kind) {
    case TransformKind::rotate:
      if (t.rotate_degrees == 0.0) return img;
      return rotate(img, t.rotate_degrees);
    case TransformKind::flip_h: {
      ImageRgb out(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(w - 1 - x, y, c);
      return out;
    }
    case TransformKind::flip_v: {
      ImageRgb out(w, h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, h - 1 - y, c);
      return out;
    }
    case TransformKind::brightness: {
      ImageRgb out = img;
      for (auto& v : out.data()) v = clamp_u8(static_cast<long>(v) + t.brightness_delta);
      return out;
    }
    case TransformKind::contrast: {
      ImageRgb out = img;
      for (auto& v : out.data()) v = clamp_u8(std::lround(128.0 + t.contrast_factor * (static_cast<double>(v) - 128.0)));
      return out;
    }
    case TransformKind::translate: {
      ImageRgb out(w, h);
      for (int y = 0; y < h; ++y) {
        const int sy = y - t.translate_dy;
        if (sy < 0 || sy >= h) continue;
        for (int x = 0; x < w; ++x) {
          const int sx = x - t.translate_dx;
          if (sx < 0 || sx >= w) continue;
          for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(sx, sy, c);
        }
      }
      return out;
    }
  }
  return img;
}

ImageRgb apply_chain(const ImageRgb& img, const TransformChain& chain) {
  ImageRgb out = img;
  for (const auto& t : chain) out = apply_transform(out, t);
  return out;
}

}  // namespace cervix
