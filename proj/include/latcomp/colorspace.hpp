#pragma once

// Pointwise color transforms: display transfer, RGB <-> XYZ through the
// display profile, XYZ <-> LMS through the cone absorption matrix, and the
// logarithmic photoreceptor compression.

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "latcomp/error.hpp"
#include "latcomp/plane.hpp"

namespace latcomp {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

inline constexpr Mat3 identity3() { return Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline double determinant(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Adjugate inverse. Caller guarantees a nonsingular matrix.
inline Mat3 inverse(const Mat3& m) {
  const double inv_det = 1.0 / determinant(m);
  Mat3 r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
  return r;
}

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline Vec3 multiply(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// ---------------------------------------------------------------------------
// Display transfer

enum class TransferKind { Srgb, Gamma, Linear };

struct Transfer {
  TransferKind kind = TransferKind::Srgb;
  double gamma = 2.2;  // only meaningful for TransferKind::Gamma

  static Transfer srgb() { return {TransferKind::Srgb, 2.2}; }
  static Transfer linear() { return {TransferKind::Linear, 1.0}; }
  static Transfer power(double g) { return {TransferKind::Gamma, g}; }

  /// Encoded signal -> linear light.
  double decode(double v) const {
    switch (kind) {
      case TransferKind::Srgb:
        return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
      case TransferKind::Gamma: return std::pow(v, gamma);
      case TransferKind::Linear: return v;
    }
    return v;
  }

  /// Linear light -> encoded signal.
  double encode(double l) const {
    switch (kind) {
      case TransferKind::Srgb:
        return l <= 0.0031308 ? l * 12.92 : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
      case TransferKind::Gamma: return std::pow(l, 1.0 / gamma);
      case TransferKind::Linear: return l;
    }
    return l;
  }

  friend bool operator==(const Transfer& a, const Transfer& b) {
    return a.kind == b.kind && (a.kind != TransferKind::Gamma || a.gamma == b.gamma);
  }
};

/// Accepts "srgb", "linear" or "gamma:<value>".
inline Transfer parse_transfer(std::string_view s) {
  if (s == "srgb") return Transfer::srgb();
  if (s == "linear") return Transfer::linear();
  constexpr std::string_view prefix = "gamma:";
  if (s.starts_with(prefix)) {
    const std::string num(s.substr(prefix.size()));
    std::size_t used = 0;
    double g = 0.0;
    try {
      g = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != num.size() || num.empty() || !(g > 0.0) || !std::isfinite(g))
      config_error("profile.transfer: invalid gamma in '" + std::string(s) + "'");
    return Transfer::power(g);
  }
  config_error("profile.transfer: expected srgb, linear or gamma:<value>, got '" +
               std::string(s) + "'");
}

inline std::string format_transfer(const Transfer& t) {
  switch (t.kind) {
    case TransferKind::Srgb: return "srgb";
    case TransferKind::Linear: return "linear";
    case TransferKind::Gamma: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t.gamma);
      return "gamma:" + std::string(buf, end);
    }
  }
  return "srgb";
}

// ---------------------------------------------------------------------------
// Display profile

/// Linear RGB in [0,1] -> relative CIEXYZ (display white at Y = 1) plus the
/// transfer curve of the display.
class DisplayProfile {
 public:
  /// sRGB primaries, D65 white, piecewise sRGB transfer.
  static constexpr Mat3 kSrgbToXyz{{{0.4124, 0.3576, 0.1805},
                                    {0.2126, 0.7152, 0.0722},
                                    {0.0193, 0.1192, 0.9505}}};

  DisplayProfile() : DisplayProfile(kSrgbToXyz, Transfer::srgb()) {}

  DisplayProfile(const Mat3& rgb_to_xyz, Transfer transfer)
      : rgb_to_xyz_(rgb_to_xyz), transfer_(transfer) {
    for (const auto& row : rgb_to_xyz)
      for (double v : row)
        if (!std::isfinite(v)) config_error("profile.matrix: non-finite entry");
    if (!(std::abs(determinant(rgb_to_xyz)) > 1e-9))
      config_error("profile.matrix: matrix is singular (|det| <= 1e-9)");
    if (transfer.kind == TransferKind::Gamma && !(transfer.gamma > 0.0))
      config_error("profile.transfer: gamma must be positive");
    xyz_to_rgb_ = inverse(rgb_to_xyz);
  }

  static DisplayProfile srgb() { return DisplayProfile(); }

  const Mat3& rgb_to_xyz() const noexcept { return rgb_to_xyz_; }
  const Mat3& xyz_to_rgb() const noexcept { return xyz_to_rgb_; }
  const Transfer& transfer() const noexcept { return transfer_; }

 private:
  Mat3 rgb_to_xyz_;
  Mat3 xyz_to_rgb_;
  Transfer transfer_;
};

// ---------------------------------------------------------------------------
// Cone absorption

/// Light absorbed by the L, M and S cones per unit of X, Y and Z.
/// Rows are (L, M, S), columns (X, Y, Z).
struct AbsorptionMatrix {
  static constexpr Mat3 kDefault{{{63.0, 74.7, 7.5}, {40.5, 65.7, 12.6}, {14.0, 4.1, 75.1}}};

  Mat3 a = kDefault;

  Mat3 inverse() const { return latcomp::inverse(a); }
};

// ---------------------------------------------------------------------------
// Photoreceptor compression (Fechner-Weber)

/// Relative floor used for the log: a fraction of the largest LMS value the
/// profile can produce.
inline constexpr double kCompressionFloorFraction = 1e-4;

struct CompressionFn {
  double floor = 1e-4;

  double operator()(double y) const { return std::log(std::max(y, floor)); }
  double inverse(double e) const { return std::exp(e); }
  double log_floor() const { return std::log(floor); }
};

/// Largest LMS component reachable from linear RGB in [0,1]^3.
inline double max_lms_value(const DisplayProfile& profile, const AbsorptionMatrix& absorption) {
  const Mat3 m = multiply(absorption.a, profile.rgb_to_xyz());
  double best = 0.0;
  for (const auto& row : m) {
    double s = 0.0;
    for (double v : row) s += std::max(v, 0.0);
    best = std::max(best, s);
  }
  return best;
}

inline CompressionFn compression_for(const DisplayProfile& profile,
                                     const AbsorptionMatrix& absorption = {}) {
  return CompressionFn{kCompressionFloorFraction * max_lms_value(profile, absorption)};
}

// ---------------------------------------------------------------------------
// Image-level operations

inline TriPlane decode_transfer(const TriPlane& img, const DisplayProfile& profile) {
  expect_space(img, ColorSpace::EncodedRGB, "decode_transfer");
  TriPlane out(img.width(), img.height(), ColorSpace::LinearRGB);
  const Transfer& t = profile.transfer();
  for (int c = 0; c < 3; ++c) {
    auto src = img[c].values();
    auto dst = out[c].values();
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double v = src[i];
      if (!(v >= 0.0 && v <= 1.0))
        throw Error(ErrorCategory::OutOfRange,
                    "decode_transfer: sample " + std::to_string(v) + " outside [0,1]");
      dst[i] = t.decode(v);
    }
  }
  return out;
}

/// Samples are clamped to [0,1] before encoding.
inline TriPlane encode_transfer(const TriPlane& img, const DisplayProfile& profile) {
  expect_space(img, ColorSpace::LinearRGB, "encode_transfer");
  TriPlane out(img.width(), img.height(), ColorSpace::EncodedRGB);
  const Transfer& t = profile.transfer();
  for (int c = 0; c < 3; ++c) {
    auto src = img[c].values();
    auto dst = out[c].values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = t.encode(std::clamp(src[i], 0.0, 1.0));
  }
  return out;
}

namespace detail {

inline TriPlane apply_matrix(const TriPlane& img, const Mat3& m, ColorSpace to,
                             bool clamp_negative) {
  TriPlane out(img.width(), img.height(), to);
  const std::size_t n = img.pixel_count();
  const double* s0 = img[0].values().data();
  const double* s1 = img[1].values().data();
  const double* s2 = img[2].values().data();
  double* d0 = out[0].values().data();
  double* d1 = out[1].values().data();
  double* d2 = out[2].values().data();
  for (std::size_t i = 0; i < n; ++i) {
    double a = s0[i], b = s1[i], c = s2[i];
    if (clamp_negative) {
      a = std::max(a, 0.0);
      b = std::max(b, 0.0);
      c = std::max(c, 0.0);
    }
    d0[i] = m[0][0] * a + m[0][1] * b + m[0][2] * c;
    d1[i] = m[1][0] * a + m[1][1] * b + m[1][2] * c;
    d2[i] = m[2][0] * a + m[2][1] * b + m[2][2] * c;
  }
  return out;
}

}  // namespace detail

inline TriPlane rgb_to_xyz(const TriPlane& img, const DisplayProfile& profile) {
  expect_space(img, ColorSpace::LinearRGB, "rgb_to_xyz");
  return detail::apply_matrix(img, profile.rgb_to_xyz(), ColorSpace::XYZ, false);
}

inline TriPlane xyz_to_rgb(const TriPlane& img, const DisplayProfile& profile) {
  expect_space(img, ColorSpace::XYZ, "xyz_to_rgb");
  return detail::apply_matrix(img, profile.xyz_to_rgb(), ColorSpace::LinearRGB, false);
}

/// Negative XYZ components (matrix roundoff) are clamped to zero first.
inline TriPlane xyz_to_lms(const TriPlane& img, const AbsorptionMatrix& absorption = {}) {
  expect_space(img, ColorSpace::XYZ, "xyz_to_lms");
  return detail::apply_matrix(img, absorption.a, ColorSpace::LMS, true);
}

inline TriPlane lms_to_xyz(const TriPlane& img, const AbsorptionMatrix& absorption = {}) {
  expect_space(img, ColorSpace::LMS, "lms_to_xyz");
  return detail::apply_matrix(img, absorption.inverse(), ColorSpace::XYZ, false);
}

inline PixelPlane compress(const PixelPlane& plane, const CompressionFn& phi) {
  PixelPlane out(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = phi(plane[i]);
  return out;
}

inline PixelPlane expand(const PixelPlane& plane, const CompressionFn& phi) {
  PixelPlane out(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = phi.inverse(plane[i]);
  return out;
}

/// LMS -> excitation. Negative inputs fall under the floor.
inline TriPlane compress(const TriPlane& lms, const CompressionFn& phi) {
  expect_space(lms, ColorSpace::LMS, "compress");
  return TriPlane(compress(lms[0], phi), compress(lms[1], phi), compress(lms[2], phi),
                  ColorSpace::Excitation);
}

/// Excitation -> LMS.
inline TriPlane expand(const TriPlane& excitation, const CompressionFn& phi) {
  if (excitation.space != ColorSpace::Excitation && excitation.space != ColorSpace::Perceived)
    expect_space(excitation, ColorSpace::Excitation, "expand");
  return TriPlane(expand(excitation[0], phi), expand(excitation[1], phi),
                  expand(excitation[2], phi), ColorSpace::LMS);
}

}  // namespace latcomp
