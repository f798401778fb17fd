#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "latcomp/error.hpp"

namespace latcomp {

/// Row-major single-channel image. Carries luminance, excitation and
/// perceived values alike.
template <typename T>
class BasicPlane {
 public:
  using value_type = T;

  BasicPlane() = default;
  BasicPlane(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) noexcept {
    assert(x < width_ && y < height_);
    return data_[y * width_ + x];
  }
  const T& operator()(std::size_t x, std::size_t y) const noexcept {
    assert(x < width_ && y < height_);
    return data_[y * width_ + x];
  }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> row(std::size_t y) noexcept { return {data_.data() + y * width_, width_}; }
  std::span<const T> row(std::size_t y) const noexcept {
    return {data_.data() + y * width_, width_};
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  bool same_shape(const BasicPlane& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const BasicPlane&, const BasicPlane&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

using PixelPlane = BasicPlane<double>;

enum class ColorSpace { EncodedRGB, LinearRGB, XYZ, LMS, Excitation, Perceived };

inline std::string_view to_string(ColorSpace s) {
  switch (s) {
    case ColorSpace::EncodedRGB: return "EncodedRGB";
    case ColorSpace::LinearRGB: return "LinearRGB";
    case ColorSpace::XYZ: return "XYZ";
    case ColorSpace::LMS: return "LMS";
    case ColorSpace::Excitation: return "Excitation";
    case ColorSpace::Perceived: return "Perceived";
  }
  return "?";
}

/// Three aligned planes tagged with the colorspace they live in.
struct TriPlane {
  std::array<PixelPlane, 3> channels;
  ColorSpace space = ColorSpace::EncodedRGB;

  TriPlane() = default;
  TriPlane(std::size_t width, std::size_t height, ColorSpace s, double fill = 0.0)
      : channels{PixelPlane(width, height, fill), PixelPlane(width, height, fill),
                 PixelPlane(width, height, fill)},
        space(s) {}
  TriPlane(PixelPlane a, PixelPlane b, PixelPlane c, ColorSpace s)
      : channels{std::move(a), std::move(b), std::move(c)}, space(s) {
    if (!channels[0].same_shape(channels[1]) || !channels[0].same_shape(channels[2]))
      throw Error(ErrorCategory::Config, "TriPlane channels must share dimensions");
  }

  std::size_t width() const noexcept { return channels[0].width(); }
  std::size_t height() const noexcept { return channels[0].height(); }
  std::size_t pixel_count() const noexcept { return channels[0].size(); }

  PixelPlane& operator[](std::size_t c) noexcept { return channels[c]; }
  const PixelPlane& operator[](std::size_t c) const noexcept { return channels[c]; }

  friend bool operator==(const TriPlane&, const TriPlane&) = default;
};

inline void expect_space(const TriPlane& img, ColorSpace s, std::string_view op) {
  if (img.space != s) {
    throw Error(ErrorCategory::Config, std::string(op) + ": expected " + std::string(to_string(s)) +
                                           " image, got " + std::string(to_string(img.space)));
  }
}

inline double max_abs_diff(const PixelPlane& a, const PixelPlane& b) {
  assert(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const PixelPlane& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace latcomp
