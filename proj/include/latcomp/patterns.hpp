#pragma once

// Synthetic stimuli for lateral-inhibition effects. All levels are encoded
// (display) values snapped to the 16-bit grid so patterns survive a 16-bit
// PNG round trip bit-exactly.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latcomp/error.hpp"
#include "latcomp/plane.hpp"

namespace latcomp {

enum class PatternKind { Stripes, Chevreul, MachRamp, SimultaneousContrast, OpponentEdge, StepEdge };

inline constexpr std::array<std::pair<PatternKind, std::string_view>, 6> kPatternNames{{
    {PatternKind::Stripes, "stripes"},
    {PatternKind::Chevreul, "chevreul"},
    {PatternKind::MachRamp, "mach-ramp"},
    {PatternKind::SimultaneousContrast, "sim-contrast"},
    {PatternKind::OpponentEdge, "opponent-edge"},
    {PatternKind::StepEdge, "step-edge"},
}};

inline std::string_view to_string(PatternKind k) {
  for (const auto& [kind, name] : kPatternNames)
    if (kind == k) return name;
  return "?";
}

inline std::optional<PatternKind> parse_pattern_kind(std::string_view name) {
  for (const auto& [kind, n] : kPatternNames)
    if (n == name) return kind;
  return std::nullopt;
}

inline std::vector<std::string> pattern_names() {
  std::vector<std::string> out;
  for (const auto& entry : kPatternNames) out.emplace_back(entry.second);
  return out;
}

/// Geometry and levels. Unset fields take the per-kind defaults:
///
///   stripes       8 columns ascending 0.15..0.85, crossed by a 0.5 stripe
///                 of height h/6 through the vertical center
///   chevreul      6 columns descending 0.7..0.2
///   mach-ramp     0.2 flat on [0, w/3), linear ramp to 0.8 on [w/3, 2w/3),
///                 0.8 flat after
///   sim-contrast  left half 0.15, right half 0.85, a 0.5 square of side
///                 min(w/2, h)/3 centered in each half
///   opponent-edge blue (0,0,1) left half, yellow (1,1,0) right half
///   step-edge     0.25 left half, 0.75 right half
struct PatternSpec {
  PatternKind kind = PatternKind::Stripes;
  std::size_t width = 512;
  std::size_t height = 512;
  std::optional<int> columns;
  std::optional<double> low;
  std::optional<double> high;

  void validate() const {
    if (width < 16 || height < 16) config_error("pattern dimensions must be at least 16x16");
    if (width > 8192 || height > 8192) config_error("pattern dimensions must be at most 8192");
    if (columns && *columns < 2) config_error("pattern columns must be >= 2");
    for (const auto& v : {low, high})
      if (v && !(*v >= 0.0 && *v <= 1.0)) config_error("pattern levels must lie in [0, 1]");
  }
};

/// Nearest value representable in a 16-bit PNG.
inline double snap16(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 65535.0) / 65535.0; }

namespace detail {

inline TriPlane gray_image(const PixelPlane& g) {
  return TriPlane(g, g, g, ColorSpace::EncodedRGB);
}

inline double column_level(int i, int n, double first, double last) {
  return snap16(first + (last - first) * double(i) / double(n - 1));
}

}  // namespace detail

inline TriPlane generate(const PatternSpec& spec) {
  spec.validate();
  const std::size_t w = spec.width, h = spec.height;
  PixelPlane g(w, h);

  switch (spec.kind) {
    case PatternKind::Stripes: {
      const int n = spec.columns.value_or(8);
      const double lo = spec.low.value_or(0.15), hi = spec.high.value_or(0.85);
      const double stripe = snap16(0.5);
      const std::size_t sh = std::max<std::size_t>(h / 6, 1);
      const std::size_t s0 = (h - sh) / 2;
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
          const int col = static_cast<int>(std::min<std::size_t>(x * n / w, n - 1));
          g(x, y) = (y >= s0 && y < s0 + sh) ? stripe : detail::column_level(col, n, lo, hi);
        }
      return detail::gray_image(g);
    }
    case PatternKind::Chevreul: {
      const int n = spec.columns.value_or(6);
      const double lo = spec.low.value_or(0.2), hi = spec.high.value_or(0.7);
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
          const int col = static_cast<int>(std::min<std::size_t>(x * n / w, n - 1));
          g(x, y) = detail::column_level(col, n, hi, lo);
        }
      return detail::gray_image(g);
    }
    case PatternKind::MachRamp: {
      const double lo = spec.low.value_or(0.2), hi = spec.high.value_or(0.8);
      const std::size_t a = w / 3, b = 2 * w / 3;
      for (std::size_t x = 0; x < w; ++x) {
        double v = lo;
        if (x >= b) v = hi;
        else if (x >= a) v = lo + (hi - lo) * double(x - a) / double(b - a);
        v = snap16(v);
        for (std::size_t y = 0; y < h; ++y) g(x, y) = v;
      }
      return detail::gray_image(g);
    }
    case PatternKind::SimultaneousContrast: {
      const double lo = spec.low.value_or(0.15), hi = spec.high.value_or(0.85);
      const double patch = snap16(0.5);
      const std::size_t half = w / 2;
      const std::size_t side = std::max<std::size_t>(std::min(half, h) / 3, 1);
      const std::size_t py = (h - side) / 2;
      const std::size_t px_left = (half - side) / 2;
      const std::size_t px_right = half + px_left;
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
          const bool in_y = y >= py && y < py + side;
          const bool in_left = x >= px_left && x < px_left + side;
          const bool in_right = x >= px_right && x < px_right + side;
          if (in_y && (in_left || in_right)) g(x, y) = patch;
          else g(x, y) = snap16(x < half ? lo : hi);
        }
      return detail::gray_image(g);
    }
    case PatternKind::OpponentEdge: {
      TriPlane img(w, h, ColorSpace::EncodedRGB);
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
          const bool left = x < w / 2;
          img[0](x, y) = left ? 0.0 : 1.0;
          img[1](x, y) = left ? 0.0 : 1.0;
          img[2](x, y) = left ? 1.0 : 0.0;
        }
      return img;
    }
    case PatternKind::StepEdge: {
      const double lo = snap16(spec.low.value_or(0.25)), hi = snap16(spec.high.value_or(0.75));
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) g(x, y) = x < w / 2 ? lo : hi;
      return detail::gray_image(g);
    }
  }
  return detail::gray_image(g);
}

}  // namespace latcomp
