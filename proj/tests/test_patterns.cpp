#include <gtest/gtest.h>

#include "latcomp/patterns.hpp"

namespace latcomp {
namespace {

PatternSpec spec(PatternKind k, std::size_t w, std::size_t h) {
  PatternSpec s;
  s.kind = k;
  s.width = w;
  s.height = h;
  return s;
}

bool is_gray(const TriPlane& t) { return t[0] == t[1] && t[1] == t[2]; }

TEST(Patterns, NamesParseAndRoundTrip) {
  const auto names = pattern_names();
  ASSERT_EQ(names.size(), 6u);
  for (const auto& n : names) {
    const auto k = parse_pattern_kind(n);
    ASSERT_TRUE(k) << n;
    EXPECT_EQ(to_string(*k), n);
  }
  EXPECT_FALSE(parse_pattern_kind("checkerboard"));
  EXPECT_FALSE(parse_pattern_kind(""));
}

TEST(Patterns, DimensionsValidated) {
  EXPECT_THROW(generate(spec(PatternKind::Stripes, 15, 64)), Error);
  EXPECT_THROW(generate(spec(PatternKind::Stripes, 64, 8)), Error);
  EXPECT_THROW(generate(spec(PatternKind::Stripes, 9000, 64)), Error);
  PatternSpec bad = spec(PatternKind::StepEdge, 32, 32);
  bad.low = 1.5;
  EXPECT_THROW(generate(bad), Error);
  const TriPlane t = generate(spec(PatternKind::MachRamp, 37, 21));
  EXPECT_EQ(t.width(), 37u);
  EXPECT_EQ(t.height(), 21u);
  EXPECT_EQ(t.space, ColorSpace::EncodedRGB);
}

TEST(Patterns, Deterministic) {
  for (const auto& [kind, name] : kPatternNames) {
    const PatternSpec s = spec(kind, 96, 64);
    EXPECT_EQ(generate(s), generate(s)) << name;
  }
}

TEST(Patterns, LevelsOnSixteenBitGrid) {
  for (const auto& [kind, name] : kPatternNames) {
    const TriPlane t = generate(spec(kind, 100, 50));
    for (int c = 0; c < 3; ++c)
      for (double v : t[c].values()) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        ASSERT_EQ(snap16(v), v) << name;
      }
  }
}

TEST(Patterns, ChevreulColumnsUniformAndDescending) {
  const std::size_t w = 120, h = 40;
  const TriPlane t = generate(spec(PatternKind::Chevreul, w, h));
  ASSERT_TRUE(is_gray(t));
  const PixelPlane& g = t[0];
  double prev = 2.0;
  for (int col = 0; col < 6; ++col) {
    const std::size_t x0 = col * w / 6, x1 = (col + 1) * w / 6;
    const double v = g(x0, 0);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = x0; x < x1; ++x) ASSERT_EQ(g(x, y), v);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_EQ(g(0, 0), snap16(0.7));
  EXPECT_EQ(g(w - 1, 0), snap16(0.2));
}

TEST(Patterns, StripesCrossedByMidGrayBand) {
  const std::size_t w = 96, h = 60;
  const TriPlane t = generate(spec(PatternKind::Stripes, w, h));
  ASSERT_TRUE(is_gray(t));
  const PixelPlane& g = t[0];
  EXPECT_EQ(g(0, 0), snap16(0.15));
  EXPECT_EQ(g(w - 1, 0), snap16(0.85));
  for (std::size_t x = 0; x < w; ++x) EXPECT_EQ(g(x, h / 2), snap16(0.5));
  for (std::size_t x = 1; x < w; ++x) EXPECT_GE(g(x, 0), g(x - 1, 0));
}

TEST(Patterns, MachRampMonotone) {
  const std::size_t w = 90;
  const TriPlane t = generate(spec(PatternKind::MachRamp, w, 20));
  const PixelPlane& g = t[0];
  for (std::size_t x = 1; x < w; ++x) EXPECT_GE(g(x, 5), g(x - 1, 5));
  EXPECT_EQ(g(0, 0), snap16(0.2));
  EXPECT_EQ(g(w / 3 - 1, 0), snap16(0.2));
  EXPECT_GT(g(w / 2, 0), snap16(0.2));
  EXPECT_LT(g(w / 2, 0), snap16(0.8));
  EXPECT_EQ(g(w - 1, 0), snap16(0.8));
}

TEST(Patterns, SimultaneousContrastPatchesIdentical) {
  const std::size_t w = 120, h = 60;
  const TriPlane t = generate(spec(PatternKind::SimultaneousContrast, w, h));
  const PixelPlane& g = t[0];
  const double patch = snap16(0.5);
  std::size_t left = 0, right = 0;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      if (g(x, y) == patch) (x < w / 2 ? left : right)++;
  EXPECT_GT(left, 0u);
  EXPECT_EQ(left, right);
  // Patch layout mirrors across the halves.
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w / 2; ++x)
      EXPECT_EQ(g(x, y) == patch, g(x + w / 2, y) == patch);
  EXPECT_EQ(g(0, 0), snap16(0.15));
  EXPECT_EQ(g(w - 1, 0), snap16(0.85));
}

TEST(Patterns, OpponentEdgeBlueYellow) {
  const TriPlane t = generate(spec(PatternKind::OpponentEdge, 32, 16));
  EXPECT_EQ(t[0](0, 0), 0.0);
  EXPECT_EQ(t[2](0, 0), 1.0);
  EXPECT_EQ(t[0](31, 15), 1.0);
  EXPECT_EQ(t[1](31, 15), 1.0);
  EXPECT_EQ(t[2](31, 15), 0.0);
}

TEST(Patterns, StepEdgeLevels) {
  const TriPlane t = generate(spec(PatternKind::StepEdge, 40, 16));
  EXPECT_EQ(t[0](19, 3), snap16(0.25));
  EXPECT_EQ(t[0](20, 3), snap16(0.75));
  PatternSpec s = spec(PatternKind::StepEdge, 40, 16);
  s.low = 0.0;
  s.high = 1.0;
  const TriPlane u = generate(s);
  EXPECT_EQ(u[1](0, 0), 0.0);
  EXPECT_EQ(u[1](39, 0), 1.0);
}

}  // namespace
}  // namespace latcomp
