#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "latcomp/error.hpp"
#include "latcomp/plane.hpp"

namespace latcomp {

struct BilateralParams {
  double sigma_s = 5.0;   // pixels
  double sigma_r = 0.08;  // fraction of the plane's value range

  void validate() const {
    if (!(sigma_s > 0.0)) config_error("detail.sigma_s must be > 0");
    if (!(sigma_r > 0.0)) config_error("detail.sigma_r must be > 0");
  }
};

/// Edge-preserving base layer. Spatial Gaussian exp(-d^2 / 2 sigma_s^2)
/// truncated at 3 sigma_s; the window is clipped at the image border. The
/// range Gaussian uses sigma_r * (max - min) of the plane.
inline PixelPlane bilateral_base(const PixelPlane& plane, const BilateralParams& params = {}) {
  params.validate();
  if (plane.empty()) return plane;
  const auto [lo, hi] = std::minmax_element(plane.values().begin(), plane.values().end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return plane;

  const int r = static_cast<int>(std::ceil(3.0 * params.sigma_s));
  const double inv_2ss = 1.0 / (2.0 * params.sigma_s * params.sigma_s);
  const double sr = params.sigma_r * range;
  const double inv_2sr = 1.0 / (2.0 * sr * sr);

  const int side = 2 * r + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      spatial[(dy + r) * side + (dx + r)] = std::exp(-(dx * dx + dy * dy) * inv_2ss);

  const int w = static_cast<int>(plane.width()), h = static_cast<int>(plane.height());
  PixelPlane out(plane.width(), plane.height());
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(y - r, 0), y1 = std::min(y + r, h - 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(x - r, 0), x1 = std::min(x + r, w - 1);
      const double center = plane(x, y);
      double num = 0.0, den = 0.0;
      for (int yy = y0; yy <= y1; ++yy) {
        const double* src = plane.row(yy).data();
        const double* sw = spatial.data() + (yy - y + r) * side + r;
        for (int xx = x0; xx <= x1; ++xx) {
          const double d = src[xx] - center;
          const double wgt = sw[xx - x] * std::exp(-d * d * inv_2sr);
          num += wgt * src[xx];
          den += wgt;
        }
      }
      out(x, y) = num / den;
    }
  }
  return out;
}

struct BaseDetail {
  TriPlane base;
  TriPlane detail;
};

/// Per-channel split: base = bilateral_base(channel), detail = channel - base.
inline BaseDetail split_base_detail(const TriPlane& perceived, const BilateralParams& params = {}) {
  BaseDetail r{TriPlane(perceived.width(), perceived.height(), perceived.space),
               TriPlane(perceived.width(), perceived.height(), perceived.space)};
  for (int c = 0; c < 3; ++c) {
    r.base[c] = bilateral_base(perceived[c], params);
    for (std::size_t i = 0; i < perceived[c].size(); ++i)
      r.detail[c][i] = perceived[c][i] - r.base[c][i];
  }
  return r;
}

}  // namespace latcomp
