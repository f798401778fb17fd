#include <gtest/gtest.h>

#include <random>

#include "latcomp/detail_preserve.hpp"
#include "oracles.hpp"

namespace latcomp {
namespace {

TEST(BilateralParams, DefaultsAndValidation) {
  const BilateralParams p;
  EXPECT_EQ(p.sigma_s, 5.0);
  EXPECT_EQ(p.sigma_r, 0.08);
  EXPECT_THROW(bilateral_base(PixelPlane(4, 4), {0.0, 0.08}), Error);
  EXPECT_THROW(bilateral_base(PixelPlane(4, 4), {5.0, -1.0}), Error);
}

TEST(Bilateral, ConstantPlaneReturnedUnchanged) {
  const PixelPlane c(13, 9, -2.25);
  EXPECT_EQ(bilateral_base(c), c);
}

TEST(Bilateral, MatchesBruteForceOnRandomPlanes) {
  std::mt19937_64 rng(101);
  for (const BilateralParams bp : {BilateralParams{}, BilateralParams{1.5, 0.3},
                                   BilateralParams{2.0, 0.02}}) {
    const PixelPlane p = oracle::random_plane(16, 16, rng, -3, 1);
    EXPECT_LE(max_abs_diff(bilateral_base(p, bp), oracle::brute_bilateral(p, bp.sigma_s, bp.sigma_r)),
              1e-9);
  }
}

// The range weights differ from one by about (dv / (sigma_r * range))^2 / 2,
// so the limit is checked on a plane whose spread inside one window (about
// 0.2 here) is small next to its range.
TEST(Bilateral, LargeRangeSigmaApproachesGaussianBlur) {
  PixelPlane p(160, 40);
  for (std::size_t y = 0; y < p.height(); ++y)
    for (std::size_t x = 0; x < p.width(); ++x)
      p(x, y) = double(x) / 160.0 + 0.02 * std::sin(0.3 * double(y)) * std::cos(0.2 * double(x));
  EXPECT_LE(max_abs_diff(bilateral_base(p, {5.0, 100.0}), oracle::windowed_gaussian_blur(p, 5.0)),
            1e-6);
}

TEST(Bilateral, ConservativeRange) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 5; ++trial) {
    const PixelPlane p = oracle::random_plane(30, 22, rng, -4, 2);
    const PixelPlane b = bilateral_base(p);
    double lo = p[0], hi = p[0];
    for (double v : p.values()) lo = std::min(lo, v), hi = std::max(hi, v);
    for (double v : b.values()) {
      EXPECT_GE(v, lo);
      EXPECT_LE(v, hi);
    }
  }
}

TEST(SplitBaseDetail, ReconstructsExactly) {
  std::mt19937_64 rng(107);
  const TriPlane t(oracle::random_plane(20, 20, rng, -3, 0), oracle::random_plane(20, 20, rng, -3, 0),
                   oracle::random_plane(20, 20, rng, -3, 0), ColorSpace::Perceived);
  const BaseDetail bd = split_base_detail(t);
  EXPECT_EQ(bd.base.space, ColorSpace::Perceived);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(bd.base[c], bilateral_base(t[c]));
    for (std::size_t i = 0; i < t[c].size(); ++i)
      EXPECT_NEAR(bd.base[c][i] + bd.detail[c][i], t[c][i], 1e-15);
  }
}

TEST(SplitBaseDetail, EdgeStaysInBaseTextureGoesToDetail) {
  const std::size_t w = 64, h = 32;
  PixelPlane p(w, h), texture(w, h);
  const double edge = 1.0;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      texture(x, y) = 0.03 * (((x + y) % 2) ? 1.0 : -1.0);
      p(x, y) = (x < w / 2 ? 0.0 : edge) + texture(x, y);
    }
  const PixelPlane base = bilateral_base(p);
  const PixelPlane ref = oracle::brute_bilateral(p, 5.0, 0.08);
  EXPECT_LE(max_abs_diff(base, ref), 1e-9);

  double base_edge = 0.0;
  for (std::size_t y = 0; y < h; ++y) {
    // Mean over 4 columns each side of the edge to average out the checkerboard.
    double l = 0.0, r = 0.0;
    for (std::size_t x = w / 2 - 4; x < w / 2; ++x) l += base(x, y);
    for (std::size_t x = w / 2; x < w / 2 + 4; ++x) r += base(x, y);
    base_edge += (r - l) / 4.0;
  }
  base_edge /= double(h);
  EXPECT_GE(base_edge, 0.9 * edge);

  double tex_energy = 0.0, detail_tex = 0.0, base_tex = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double detail = p[i] - base[i];
    tex_energy += texture[i] * texture[i];
    detail_tex += detail * texture[i];
    base_tex += (base[i] - (p[i] - texture[i])) * texture[i];
  }
  // Projection of each layer onto the texture pattern.
  EXPECT_GT(detail_tex / tex_energy, 0.8);
  EXPECT_LT(std::abs(base_tex / tex_energy), 0.2);
}

}  // namespace
}  // namespace latcomp
