#pragma once

// End-to-end compensation:
//
//   encoded RGB -> linear RGB -> XYZ -> LMS -> log excitation p'
//     -> [bilateral base/detail split] -> inverse inhibition -> [+ detail] -> e'
//     -> LMS -> XYZ -> linear RGB -> clamp -> encoded RGB
//
// and the forward (perceived-image) prediction used for analysis.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "latcomp/colorspace.hpp"
#include "latcomp/config.hpp"
#include "latcomp/detail_preserve.hpp"
#include "latcomp/kernel.hpp"
#include "latcomp/perception.hpp"
#include "latcomp/plane.hpp"

namespace latcomp {

/// Gamut clamping performed after XYZ -> RGB.
struct ClipStats {
  std::array<std::size_t, 3> below{};  // per RGB channel, samples < 0
  std::array<std::size_t, 3> above{};  // per RGB channel, samples > 1
  std::size_t samples = 0;
  BasicPlane<std::uint8_t> mask;  // 1 where any channel of the pixel was clamped

  std::size_t clamped() const {
    std::size_t n = 0;
    for (int c = 0; c < 3; ++c) n += below[c] + above[c];
    return n;
  }
  double fraction() const { return samples ? double(clamped()) / double(samples) : 0.0; }
};

struct CompensationResult {
  TriPlane image;       // encoded RGB in [0,1], not quantized
  TriPlane target;      // p' = phi(LMS) of the input
  TriPlane excitation;  // compensated excitation e'
  ClipStats clip;
  std::vector<std::string> warnings;
};

struct Perception {
  TriPlane perceived;  // per-cone perceived excitation
  PixelPlane total;    // weighted total excitation of `perceived`
  SolveStats stats;
};

struct ScanlineRow {
  std::size_t col = 0;
  double perceived_input = 0.0;
  double perceived_compensated = 0.0;
};

/// Clip fraction above which compensate() reports a warning.
inline constexpr double kClipWarningFraction = 0.01;

class Pipeline {
 public:
  explicit Pipeline(CompensationConfig cfg)
      : cfg_(std::move(cfg)), absorption_(), compression_() {
    cfg_.validate();
    kernel_ = build_kernel(cfg_.inhibition());
    compression_ = compression_for(cfg_.profile, absorption_);
  }

  const CompensationConfig& config() const noexcept { return cfg_; }
  const DiscreteKernel& kernel() const noexcept { return kernel_; }
  const CompressionFn& compression() const noexcept { return compression_; }
  const AbsorptionMatrix& absorption() const noexcept { return absorption_; }

  double contraction_bound() const { return cfg_.contraction_bound(kernel_.gaussian_sum); }

  /// Config echo plus values derived while resolving it.
  nlohmann::json echo() const {
    nlohmann::json j;
    j["config"] = to_json(cfg_);
    j["resolved"] = {{"sigma_source", cfg_.sigma_px ? "explicit" : "geometry"},
                     {"kernel_radius", kernel_.radius},
                     {"gaussian_sum", kernel_.gaussian_sum},
                     {"lms_floor", compression_.floor},
                     {"contraction_bound", contraction_bound()}};
    return j;
  }

  /// Empty when the forward model is a contraction under this config.
  std::optional<std::string> solvability_issue() const {
    const double b = contraction_bound();
    if (b < 1.0) return std::nullopt;
    std::ostringstream os;
    os << "forward model is not a contraction: alpha (G_sum + 1) x coupling = " << b
       << " >= 1 (for unit-sum kernels this is 2 alpha (w_l + w_m + w_s) when chromatically "
          "blind, 2 alpha when channel-independent)";
    return os.str();
  }

  TriPlane to_lms(const TriPlane& encoded) const {
    return xyz_to_lms(rgb_to_xyz(decode_transfer(encoded, cfg_.profile), cfg_.profile),
                      absorption_);
  }

  /// Target perceived image p' = phi(LMS).
  TriPlane target_excitation(const TriPlane& encoded) const {
    return compress(to_lms(encoded), compression_);
  }

  CompensationResult compensate(const TriPlane& encoded) const {
    expect_space(encoded, ColorSpace::EncodedRGB, "compensate_image");
    CompensationResult r;
    const TriPlane lms = to_lms(encoded);
    r.target = compress(lms, compression_);

    // No inhibition: the model is the identity, skip the colour round trip.
    if (kernel_.alpha == 0.0) {
      r.excitation = r.target;
      r.excitation.space = ColorSpace::Excitation;
      r.image = encoded;
      r.clip.samples = 3 * encoded.pixel_count();
      r.clip.mask = BasicPlane<std::uint8_t>(encoded.width(), encoded.height(), 0);
      return r;
    }

    if (cfg_.detail_preserve) {
      BaseDetail bd = split_base_detail(r.target, cfg_.bilateral);
      bd.base.space = ColorSpace::Perceived;
      r.excitation = compensate_excitation(bd.base);
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < r.excitation[c].size(); ++i)
          r.excitation[c][i] += bd.detail[c][i];
    } else {
      r.excitation = compensate_excitation(r.target);
    }

    // phi^-1 applied as a ratio, lms * exp(e' - p'). Equal to exp(e') wherever
    // lms is above the compression floor; below it the original value is
    // scaled instead of the floor, so black stays black.
    TriPlane out_lms(encoded.width(), encoded.height(), ColorSpace::LMS);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < lms[c].size(); ++i)
        out_lms[c][i] = lms[c][i] * std::exp(r.excitation[c][i] - r.target[c][i]);

    TriPlane rgb = xyz_to_rgb(lms_to_xyz(out_lms, absorption_), cfg_.profile);
    r.clip = clamp_gamut(rgb);
    r.image = encode_transfer(rgb, cfg_.profile);

    if (r.clip.fraction() > kClipWarningFraction) {
      std::ostringstream os;
      os << "gamut clamp: " << 100.0 * r.clip.fraction() << "% of samples clamped (R "
         << r.clip.below[0] + r.clip.above[0] << ", G " << r.clip.below[1] + r.clip.above[1]
         << ", B " << r.clip.below[2] + r.clip.above[2] << ")";
      r.warnings.push_back(os.str());
    }
    if (auto issue = solvability_issue())
      r.warnings.push_back(*issue + "; predictions are unavailable for this config");
    return r;
  }

  /// Compensation in the excitation domain for the configured model and
  /// color mode.
  TriPlane compensate_excitation(const TriPlane& target) const {
    if (cfg_.model == Model::BarlowLange)
      return compensate_color_barlow_lange(target, kernel_, cfg_.weights, *cfg_.beta,
                                           cfg_.color_mode);
    if (cfg_.color_mode == ColorMode::ChromaticallyBlind)
      return compensate_color(target, kernel_, cfg_.weights);
    return compensate_color_channel_independent(target, kernel_);
  }

  /// Forward model in the excitation domain.
  TriPlane perceive_excitation(const TriPlane& excitation, SolveStats* stats = nullptr) const {
    if (auto issue = solvability_issue()) config_error(*issue);
    if (cfg_.model == Model::BarlowLange)
      return perceive_color_barlow_lange(excitation, kernel_, cfg_.weights, *cfg_.beta,
                                         cfg_.color_mode, cfg_.solver, stats);
    if (cfg_.color_mode == ColorMode::ChromaticallyBlind)
      return perceive_color(excitation, kernel_, cfg_.weights, cfg_.solver, stats);
    return perceive_color_channel_independent(excitation, kernel_, cfg_.solver, stats);
  }

  Perception predict(const TriPlane& encoded) const {
    expect_space(encoded, ColorSpace::EncodedRGB, "predict_perceived");
    Perception p;
    p.perceived = perceive_excitation(target_excitation(encoded), &p.stats);
    p.total = total_excitation(p.perceived, cfg_.weights);
    return p;
  }

  /// Total perceived excitation along row `row`, columns col0..col1 inclusive.
  std::vector<double> perceive_scanline(const TriPlane& encoded, std::size_t row,
                                        std::size_t col0, std::size_t col1) const {
    check_segment(encoded, row, col0, col1);
    const Perception p = predict(encoded);
    auto r = p.total.row(row);
    return {r.begin() + static_cast<long>(col0), r.begin() + static_cast<long>(col1) + 1};
  }

  /// Perceived totals of the input and of its compensated version.
  std::vector<ScanlineRow> scanline(const TriPlane& encoded, std::size_t row, std::size_t col0,
                                    std::size_t col1) const {
    check_segment(encoded, row, col0, col1);
    const std::vector<double> in = perceive_scanline(encoded, row, col0, col1);
    const std::vector<double> out = perceive_scanline(compensate(encoded).image, row, col0, col1);
    std::vector<ScanlineRow> rows;
    for (std::size_t i = 0; i < in.size(); ++i) rows.push_back({col0 + i, in[i], out[i]});
    return rows;
  }

  static ClipStats clamp_gamut(TriPlane& rgb) {
    ClipStats s;
    s.samples = 3 * rgb.pixel_count();
    s.mask = BasicPlane<std::uint8_t>(rgb.width(), rgb.height(), 0);
    // Roundoff-sized excursions are clamped but not counted.
    constexpr double eps = 1e-12;
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < rgb[c].size(); ++i) {
        double& v = rgb[c][i];
        if (v < 0.0) {
          if (v < -eps) ++s.below[c], s.mask[i] = 1;
          v = 0.0;
        } else if (v > 1.0) {
          if (v > 1.0 + eps) ++s.above[c], s.mask[i] = 1;
          v = 1.0;
        }
      }
    }
    return s;
  }

 private:
  static void check_segment(const TriPlane& img, std::size_t row, std::size_t col0,
                            std::size_t col1) {
    if (row >= img.height() || col0 > col1 || col1 >= img.width())
      throw Error(ErrorCategory::OutOfRange,
                  "scanline segment out of bounds: row " + std::to_string(row) + ", cols " +
                      std::to_string(col0) + ".." + std::to_string(col1) + " for a " +
                      std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                      " image");
  }

  CompensationConfig cfg_;
  AbsorptionMatrix absorption_;
  CompressionFn compression_;
  DiscreteKernel kernel_;
};

inline CompensationResult compensate_image(const TriPlane& img, const CompensationConfig& cfg) {
  return Pipeline(cfg).compensate(img);
}

inline Perception predict_perceived(const TriPlane& img, const CompensationConfig& cfg) {
  return Pipeline(cfg).predict(img);
}

inline std::vector<double> perceive_scanline(const TriPlane& img, std::size_t row,
                                             std::size_t col0, std::size_t col1,
                                             const Pipeline& ctx) {
  return ctx.perceive_scanline(img, row, col0, col1);
}

/// CSV with a one-line header, one row per column index.
inline std::string format_scanline_csv(const std::vector<ScanlineRow>& rows) {
  std::string out = "col_index,perceived_input_total,perceived_compensated_total\n";
  char buf[64];
  for (const auto& r : rows) {
    out += std::to_string(r.col);
    for (double v : {r.perceived_input, r.perceived_compensated}) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out += ',';
      out.append(buf, end);
    }
    out += '\n';
  }
  return out;
}

}  // namespace latcomp
