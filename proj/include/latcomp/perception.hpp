#pragma once

// Perceived-image model p = e - k*p and its exact inverse e' = p' + k*p'.
//
// Color images couple through the total excitation P = wl L + wm M + ws S:
// every cone channel receives the same inhibition term k*P.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "latcomp/error.hpp"
#include "latcomp/kernel.hpp"
#include "latcomp/plane.hpp"

namespace latcomp {

struct SolverConfig {
  double tol = 1e-8;
  int max_iter = 200;

  void validate() const {
    if (!(tol > 0.0)) config_error("solver.tol must be > 0");
    if (max_iter < 1) config_error("solver.max_iter must be >= 1");
  }
};

struct SolveStats {
  int iterations = 0;
  double last_delta = 0.0;  // l-inf change of the final iteration
};

/// Cone population weights of the total excitation.
struct ExcitationWeights {
  double l = 1.5;
  double m = 1.0;
  double s = 0.25;

  double sum() const { return l + m + s; }
  std::array<double, 3> as_array() const { return {l, m, s}; }

  void validate() const {
    if (!(l > 0.0 && m > 0.0 && s > 0.0)) config_error("weights.{l,m,s} must all be > 0");
  }
};

enum class ColorMode { ChromaticallyBlind, ChannelIndependent };

inline std::string_view to_string(ColorMode m) {
  return m == ColorMode::ChromaticallyBlind ? "chromatically-blind" : "channel-independent";
}

inline ColorMode parse_color_mode(std::string_view s) {
  if (s == "chromatically-blind") return ColorMode::ChromaticallyBlind;
  if (s == "channel-independent") return ColorMode::ChannelIndependent;
  config_error("color_mode: expected chromatically-blind or channel-independent, got '" +
               std::string(s) + "'");
}

namespace detail {

inline void expect_log_domain(const TriPlane& img, std::string_view op) {
  if (img.space != ColorSpace::Excitation && img.space != ColorSpace::Perceived)
    throw Error(ErrorCategory::Config, std::string(op) + ": expected an excitation-domain image, got " +
                                           std::string(to_string(img.space)));
}

}  // namespace detail

inline PixelPlane total_excitation(const TriPlane& lms, const ExcitationWeights& w = {}) {
  PixelPlane out(lms.width(), lms.height());
  const double* a = lms[0].values().data();
  const double* b = lms[1].values().data();
  const double* c = lms[2].values().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w.l * a[i] + w.m * b[i] + w.s * c[i];
  return out;
}

// ---------------------------------------------------------------------------
// Compensation (closed form, no iteration)

inline PixelPlane compensate_achromatic(const PixelPlane& target, const DiscreteKernel& k) {
  PixelPlane out = apply_inhibition(target, k);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += target[i];
  return out;
}

/// Each channel gets its own target plus the shared term k * (total excitation).
/// Per-pixel channel differences are therefore untouched.
inline TriPlane compensate_color(const TriPlane& target, const DiscreteKernel& k,
                                 const ExcitationWeights& w = {}) {
  detail::expect_log_domain(target, "compensate_color");
  const PixelPlane s = apply_inhibition(total_excitation(target, w), k);
  TriPlane out(target.width(), target.height(), ColorSpace::Excitation);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < s.size(); ++i) out[c][i] = target[c][i] + s[i];
  return out;
}

/// Inhibition only between cones of the same type. Introduces hue shifts at
/// chromatic edges; kept for comparison against compensate_color.
inline TriPlane compensate_color_channel_independent(const TriPlane& target,
                                                     const DiscreteKernel& k) {
  detail::expect_log_domain(target, "compensate_color_channel_independent");
  TriPlane out(target.width(), target.height(), ColorSpace::Excitation);
  for (int c = 0; c < 3; ++c) out[c] = compensate_achromatic(target[c], k);
  return out;
}

namespace detail {

// Barlow-Lange forward model: p = e - (1 - beta e) (k*p). Given the target p'
// the excitation follows algebraically:
//   p' = e - (k*p') + beta e (k*p')  =>  e = (p' + k*p') / (1 + beta (k*p')).
inline void barlow_lange_invert(const PixelPlane& target, const PixelPlane& inhibition,
                                double beta, PixelPlane& out) {
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double bs = beta * inhibition[i];
    if (!(std::abs(bs) < 0.5))
      throw Error(ErrorCategory::Degenerate,
                  "Barlow-Lange denominator degenerate: |beta * (k*p')| = " +
                      std::to_string(std::abs(bs)) + " >= 0.5; beta too large for this image");
    out[i] = (target[i] + inhibition[i]) / (1.0 + bs);
  }
}

}  // namespace detail

inline PixelPlane compensate_barlow_lange(const PixelPlane& target, const DiscreteKernel& k,
                                          double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) config_error("inhibition.beta must lie in [0, 1)");
  const PixelPlane s = apply_inhibition(target, k);
  PixelPlane out(target.width(), target.height());
  detail::barlow_lange_invert(target, s, beta, out);
  return out;
}

/// Color Barlow-Lange: the mask (1 - beta e_c) is per channel, the inhibition
/// term follows `mode`.
inline TriPlane compensate_color_barlow_lange(const TriPlane& target, const DiscreteKernel& k,
                                              const ExcitationWeights& w, double beta,
                                              ColorMode mode) {
  detail::expect_log_domain(target, "compensate_color_barlow_lange");
  if (!(beta >= 0.0 && beta < 1.0)) config_error("inhibition.beta must lie in [0, 1)");
  TriPlane out(target.width(), target.height(), ColorSpace::Excitation);
  if (mode == ColorMode::ChromaticallyBlind) {
    const PixelPlane s = apply_inhibition(total_excitation(target, w), k);
    for (int c = 0; c < 3; ++c) detail::barlow_lange_invert(target[c], s, beta, out[c]);
  } else {
    for (int c = 0; c < 3; ++c)
      detail::barlow_lange_invert(target[c], apply_inhibition(target[c], k), beta, out[c]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward model (fixed-point iteration)

namespace detail {

// Solves p_c = e_c - mask_c * inhibition_c(p) by Jacobi iteration from p = e.
// With `shared` the inhibition term is k * (sum_c w_c p_c) for every channel,
// otherwise k * p_c. `masks` may be empty (all ones).
template <std::size_t N>
std::array<PixelPlane, N> solve_forward(const std::array<const PixelPlane*, N>& e,
                                        const DiscreteKernel& k,
                                        const std::array<double, N>& weights, bool shared,
                                        const std::array<const PixelPlane*, N>& masks,
                                        const SolverConfig& cfg, SolveStats* stats) {
  cfg.validate();
  std::array<PixelPlane, N> p;
  for (std::size_t c = 0; c < N; ++c) p[c] = *e[c];
  const std::size_t n = p[0].size();

  int it = 0;
  double delta = 0.0;
  std::array<PixelPlane, N> inhib;
  while (it < cfg.max_iter) {
    ++it;
    if (shared) {
      PixelPlane total(p[0].width(), p[0].height(), 0.0);
      for (std::size_t c = 0; c < N; ++c)
        for (std::size_t i = 0; i < n; ++i) total[i] += weights[c] * p[c][i];
      PixelPlane s = apply_inhibition(total, k);
      for (std::size_t c = 0; c < N; ++c) inhib[c] = s;
    } else {
      for (std::size_t c = 0; c < N; ++c) inhib[c] = apply_inhibition(p[c], k);
    }

    delta = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
      const PixelPlane& ec = *e[c];
      const PixelPlane* mc = masks[c];
      for (std::size_t i = 0; i < n; ++i) {
        const double term = mc ? (*mc)[i] * inhib[c][i] : inhib[c][i];
        const double next = ec[i] - term;
        delta = std::max(delta, std::abs(next - p[c][i]));
        p[c][i] = next;
      }
    }
    if (!std::isfinite(delta)) break;
    if (delta < cfg.tol) {
      if (stats) *stats = {it, delta};
      return p;
    }
  }
  if (stats) *stats = {it, delta};
  throw NoConvergence(it, delta);
}

inline PixelPlane barlow_lange_mask(const PixelPlane& e, double beta) {
  PixelPlane m(e.width(), e.height());
  for (std::size_t i = 0; i < e.size(); ++i) m[i] = 1.0 - beta * e[i];
  return m;
}

}  // namespace detail

/// Predicted perceived plane for excitation `e`.
inline PixelPlane perceive_achromatic(const PixelPlane& e, const DiscreteKernel& k,
                                      const SolverConfig& cfg = {}, SolveStats* stats = nullptr) {
  auto r = detail::solve_forward<1>({&e}, k, {1.0}, false, {nullptr}, cfg, stats);
  return std::move(r[0]);
}

/// Joint solve of p_c = e_c - k * (sum_c w_c p_c).
inline TriPlane perceive_color(const TriPlane& e, const DiscreteKernel& k,
                               const ExcitationWeights& w = {}, const SolverConfig& cfg = {},
                               SolveStats* stats = nullptr) {
  detail::expect_log_domain(e, "perceive_color");
  auto r = detail::solve_forward<3>({&e[0], &e[1], &e[2]}, k, w.as_array(), true,
                                    {nullptr, nullptr, nullptr}, cfg, stats);
  return TriPlane(std::move(r[0]), std::move(r[1]), std::move(r[2]), ColorSpace::Perceived);
}

inline TriPlane perceive_color_channel_independent(const TriPlane& e, const DiscreteKernel& k,
                                                   const SolverConfig& cfg = {},
                                                   SolveStats* stats = nullptr) {
  detail::expect_log_domain(e, "perceive_color_channel_independent");
  auto r = detail::solve_forward<3>({&e[0], &e[1], &e[2]}, k, {1.0, 1.0, 1.0}, false,
                                    {nullptr, nullptr, nullptr}, cfg, stats);
  return TriPlane(std::move(r[0]), std::move(r[1]), std::move(r[2]), ColorSpace::Perceived);
}

/// p = e - (1 - beta e) (k*p). The mask depends on e only, so the iteration
/// stays linear in p.
inline PixelPlane perceive_barlow_lange(const PixelPlane& e, const DiscreteKernel& k, double beta,
                                        const SolverConfig& cfg = {},
                                        SolveStats* stats = nullptr) {
  const PixelPlane mask = detail::barlow_lange_mask(e, beta);
  auto r = detail::solve_forward<1>({&e}, k, {1.0}, false, {&mask}, cfg, stats);
  return std::move(r[0]);
}

inline TriPlane perceive_color_barlow_lange(const TriPlane& e, const DiscreteKernel& k,
                                            const ExcitationWeights& w, double beta,
                                            ColorMode mode, const SolverConfig& cfg = {},
                                            SolveStats* stats = nullptr) {
  detail::expect_log_domain(e, "perceive_color_barlow_lange");
  const std::array<PixelPlane, 3> masks{detail::barlow_lange_mask(e[0], beta),
                                        detail::barlow_lange_mask(e[1], beta),
                                        detail::barlow_lange_mask(e[2], beta)};
  const bool shared = mode == ColorMode::ChromaticallyBlind;
  auto r = detail::solve_forward<3>({&e[0], &e[1], &e[2]}, k,
                                    shared ? w.as_array() : std::array<double, 3>{1, 1, 1},
                                    shared, {&masks[0], &masks[1], &masks[2]}, cfg, stats);
  return TriPlane(std::move(r[0]), std::move(r[1]), std::move(r[2]), ColorSpace::Perceived);
}

}  // namespace latcomp
