#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latcomp/error.hpp"
#include "latcomp/plane.hpp"

namespace latcomp {

/// Kernel scale in pixels per (pixel-per-inch x inch) of viewing geometry.
inline constexpr double kSigmaPerPpiInch = 7.1e-3;

struct ViewingGeometry {
  double distance_in = 30.0;
  double density_ppi = 94.0;

  void validate() const {
    if (!(density_ppi > 0.0) || !std::isfinite(density_ppi))
      config_error("viewing.density_ppi must be > 0");
    if (!(distance_in >= 6.0 && distance_in <= 240.0))
      config_error("viewing.distance_in must lie in [6, 240] inches");
  }
};

/// Inhibitory kernel scale for a viewer at `distance_in` from a display with
/// `density_ppi` pixels per inch. Linear in both.
inline double sigma_from_geometry(const ViewingGeometry& g) {
  g.validate();
  return kSigmaPerPpiInch * g.density_ppi * g.distance_in;
}

enum class Normalization {
  UnitSum,       // 2D Gaussian part sums to 1; the kernel is zero-sum
  PaperLiteral,  // literal 1/(sqrt(pi) sigma) prefactor applied to the 2D Gaussian
};

inline std::string_view to_string(Normalization n) {
  return n == Normalization::UnitSum ? "unit-sum" : "paper-literal";
}

inline Normalization parse_normalization(std::string_view s) {
  if (s == "unit-sum") return Normalization::UnitSum;
  if (s == "paper-literal") return Normalization::PaperLiteral;
  config_error("inhibition.normalization: expected unit-sum or paper-literal, got '" +
               std::string(s) + "'");
}

struct InhibitionParams {
  double alpha = 0.037;
  double sigma_px = kSigmaPerPpiInch * 94.0 * 30.0;
  std::optional<double> beta;
  Normalization normalization = Normalization::UnitSum;
  /// Unset means ceil(3 sigma).
  std::optional<int> truncation_radius_px;

  int radius() const {
    return truncation_radius_px ? *truncation_radius_px
                                : static_cast<int>(std::ceil(3.0 * sigma_px));
  }

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 0.5)) config_error("inhibition.alpha must lie in [0, 0.5]");
    if (!(sigma_px > 0.0) || !std::isfinite(sigma_px))
      config_error("inhibition.sigma_px must be > 0");
    if (beta && !(*beta >= 0.0 && *beta < 1.0))
      config_error("inhibition.beta must lie in [0, 1)");
    if (radius() < 1) config_error("inhibition: truncation radius must be >= 1");
  }
};

/// Separable Gaussian part of k = alpha (G - delta). The impulse is implicit:
/// applying the kernel computes alpha (G*p - p).
struct DiscreteKernel {
  std::vector<double> taps;  // taps[i] is the weight at offset +-i
  int radius = 0;
  double alpha = 0.0;
  double gaussian_sum = 0.0;  // sum of the 2D outer-product taps
  double sigma_px = 0.0;
  Normalization normalization = Normalization::UnitSum;

  /// Weight of the 2D Gaussian at integer offset (dx, dy).
  double gaussian_tap(int dx, int dy) const {
    const int ax = std::abs(dx), ay = std::abs(dy);
    if (ax > radius || ay > radius) return 0.0;
    return taps[ax] * taps[ay];
  }

  /// Full kernel value alpha (G - delta) at (dx, dy).
  double tap(int dx, int dy) const {
    return alpha * (gaussian_tap(dx, dy) - (dx == 0 && dy == 0 ? 1.0 : 0.0));
  }

  /// Sum of |G| taps; bounds the l-inf gain of the Gaussian part.
  double gaussian_l1() const { return gaussian_sum; }
};

inline DiscreteKernel build_kernel(const InhibitionParams& params) {
  params.validate();
  const int r = params.radius();
  const double sigma = params.sigma_px;

  DiscreteKernel k;
  k.radius = r;
  k.alpha = params.alpha;
  k.sigma_px = sigma;
  k.normalization = params.normalization;
  k.taps.resize(static_cast<std::size_t>(r) + 1);
  for (int i = 0; i <= r; ++i) k.taps[i] = std::exp(-double(i) * i / (sigma * sigma));

  double sum1d = k.taps[0];
  for (int i = 1; i <= r; ++i) sum1d += 2.0 * k.taps[i];

  if (params.normalization == Normalization::UnitSum) {
    // Renormalized after truncation.
    for (double& t : k.taps) t /= sum1d;
    sum1d = 1.0;
  } else {
    // Each 1D factor carries pi^-1/4 sigma^-1/2 so the product carries
    // 1 / (sqrt(pi) sigma).
    const double s = 1.0 / (std::pow(std::numbers::pi, 0.25) * std::sqrt(sigma));
    for (double& t : k.taps) t *= s;
    sum1d *= s;
  }
  k.gaussian_sum = sum1d * sum1d;
  return k;
}

namespace detail {

// out = G * in, separable, clamp-to-edge boundary.
inline void gaussian_separable(const PixelPlane& in, PixelPlane& out, const DiscreteKernel& k,
                               std::vector<double>& scratch_row, PixelPlane& tmp) {
  const std::size_t w = in.width(), h = in.height();
  const int r = k.radius;
  const double* t = k.taps.data();

  // Horizontal pass into tmp.
  scratch_row.resize(w + 2 * static_cast<std::size_t>(r));
  for (std::size_t y = 0; y < h; ++y) {
    auto src = in.row(y);
    double* buf = scratch_row.data();
    for (int i = 0; i < r; ++i) buf[i] = src[0];
    std::copy(src.begin(), src.end(), buf + r);
    for (int i = 0; i < r; ++i) buf[r + w + i] = src[w - 1];

    double* dst = tmp.row(y).data();
    const double* c = buf + r;
    for (std::size_t x = 0; x < w; ++x) dst[x] = t[0] * c[x];
    for (int j = 1; j <= r; ++j) {
      const double tj = t[j];
      const double* lo = c - j;
      const double* hi = c + j;
      for (std::size_t x = 0; x < w; ++x) dst[x] += tj * (lo[x] + hi[x]);
    }
  }

  // Vertical pass into out, row at a time.
  const long hl = static_cast<long>(h);
  for (long y = 0; y < hl; ++y) {
    double* dst = out.row(static_cast<std::size_t>(y)).data();
    const double* c = tmp.row(static_cast<std::size_t>(y)).data();
    for (std::size_t x = 0; x < w; ++x) dst[x] = t[0] * c[x];
    for (int j = 1; j <= r; ++j) {
      const double tj = t[j];
      const double* lo = tmp.row(static_cast<std::size_t>(std::max(y - j, 0L))).data();
      const double* hi = tmp.row(static_cast<std::size_t>(std::min(y + j, hl - 1))).data();
      for (std::size_t x = 0; x < w; ++x) dst[x] += tj * (lo[x] + hi[x]);
    }
  }
}

}  // namespace detail

/// G * plane with replicate boundary extension.
inline PixelPlane gaussian_filter(const PixelPlane& plane, const DiscreteKernel& k) {
  PixelPlane out(plane.width(), plane.height());
  if (plane.empty()) return out;
  PixelPlane tmp(plane.width(), plane.height());
  std::vector<double> scratch;
  detail::gaussian_separable(plane, out, k, scratch, tmp);
  return out;
}

/// The inhibition term (k * plane) = alpha (G * plane - plane).
inline PixelPlane apply_inhibition(const PixelPlane& plane, const DiscreteKernel& k) {
  if (k.alpha == 0.0) return PixelPlane(plane.width(), plane.height(), 0.0);
  PixelPlane out = gaussian_filter(plane, k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = k.alpha * (out[i] - plane[i]);
  return out;
}

}  // namespace latcomp
