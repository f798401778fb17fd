#pragma once

// Compensation configuration and its structured-text (JSON) form.
//
// Keys may be given nested ({"inhibition": {"alpha": 0.04}}) or dotted
// ({"inhibition.alpha": 0.04}); both flatten to the same schema:
//
//   viewing.distance_in  viewing.density_ppi
//   inhibition.alpha  inhibition.sigma_px  inhibition.beta  inhibition.normalization
//   weights.l  weights.m  weights.s
//   profile.matrix  profile.transfer
//   detail.enabled  detail.sigma_s  detail.sigma_r
//   solver.tol  solver.max_iter
//   color_mode  model

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "latcomp/colorspace.hpp"
#include "latcomp/detail_preserve.hpp"
#include "latcomp/error.hpp"
#include "latcomp/kernel.hpp"
#include "latcomp/perception.hpp"

namespace latcomp {

enum class Model { HartlineRatliff, BarlowLange };

inline std::string_view to_string(Model m) {
  return m == Model::HartlineRatliff ? "hartline-ratliff" : "barlow-lange";
}

inline Model parse_model(std::string_view s) {
  if (s == "hartline-ratliff") return Model::HartlineRatliff;
  if (s == "barlow-lange") return Model::BarlowLange;
  config_error("model: expected hartline-ratliff or barlow-lange, got '" + std::string(s) + "'");
}

struct CompensationConfig {
  ViewingGeometry geometry;
  double alpha = 0.037;
  std::optional<double> sigma_px;  // unset: derived from geometry
  std::optional<double> beta;
  Normalization normalization = Normalization::UnitSum;
  ExcitationWeights weights;
  DisplayProfile profile;
  bool detail_preserve = false;
  BilateralParams bilateral;
  SolverConfig solver;
  ColorMode color_mode = ColorMode::ChromaticallyBlind;
  Model model = Model::HartlineRatliff;

  double resolved_sigma() const { return sigma_px ? *sigma_px : sigma_from_geometry(geometry); }

  InhibitionParams inhibition() const {
    InhibitionParams p;
    p.alpha = alpha;
    p.sigma_px = resolved_sigma();
    p.beta = beta;
    p.normalization = normalization;
    return p;
  }

  /// Hard invariants; throws a Config error naming the violated one.
  void validate() const {
    geometry.validate();
    inhibition().validate();
    weights.validate();
    bilateral.validate();
    solver.validate();
    if (model == Model::BarlowLange && !beta)
      config_error("model barlow-lange requires inhibition.beta");
  }

  /// l-inf gain bound of the forward-model iteration for a kernel whose
  /// Gaussian part sums to `gaussian_sum`.
  double contraction_bound(double gaussian_sum) const {
    const double coupling = color_mode == ColorMode::ChromaticallyBlind ? weights.sum() : 1.0;
    return alpha * (gaussian_sum + 1.0) * coupling;
  }
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline void flatten_json(const nlohmann::json& j, const std::string& prefix,
                         std::map<std::string, nlohmann::json>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    // profile.matrix is an array leaf; everything else nests by objects.
    if (it.value().is_object()) flatten_json(it.value(), key, out);
    else out[key] = it.value();
  }
}

inline double json_number(const std::string& key, const nlohmann::json& v) {
  if (!v.is_number()) config_error(key + ": expected a number");
  return v.get<double>();
}

inline std::string json_string(const std::string& key, const nlohmann::json& v) {
  if (!v.is_string()) config_error(key + ": expected a string");
  return v.get<std::string>();
}

inline bool json_bool(const std::string& key, const nlohmann::json& v) {
  if (!v.is_boolean()) config_error(key + ": expected true or false");
  return v.get<bool>();
}

}  // namespace detail

/// Applies every key of `overrides` to `cfg`. Unknown keys are rejected.
/// Does not validate the result.
inline void apply_overrides(CompensationConfig& cfg, const nlohmann::json& overrides) {
  if (overrides.is_null()) return;
  if (!overrides.is_object()) config_error("configuration must be a JSON object");
  std::map<std::string, nlohmann::json> flat;
  detail::flatten_json(overrides, "", flat);

  std::optional<Mat3> matrix;
  std::optional<Transfer> transfer;
  for (const auto& [key, v] : flat) {
    using namespace detail;
    if (key == "viewing.distance_in") cfg.geometry.distance_in = json_number(key, v);
    else if (key == "viewing.density_ppi") cfg.geometry.density_ppi = json_number(key, v);
    else if (key == "inhibition.alpha") cfg.alpha = json_number(key, v);
    else if (key == "inhibition.sigma_px")
      cfg.sigma_px = v.is_null() ? std::nullopt : std::optional<double>(json_number(key, v));
    else if (key == "inhibition.beta")
      cfg.beta = v.is_null() ? std::nullopt : std::optional<double>(json_number(key, v));
    else if (key == "inhibition.normalization")
      cfg.normalization = parse_normalization(json_string(key, v));
    else if (key == "weights.l") cfg.weights.l = json_number(key, v);
    else if (key == "weights.m") cfg.weights.m = json_number(key, v);
    else if (key == "weights.s") cfg.weights.s = json_number(key, v);
    else if (key == "profile.matrix") {
      if (!v.is_array() || v.size() != 9)
        config_error("profile.matrix: expected 9 numbers in row-major order");
      Mat3 m{};
      for (std::size_t i = 0; i < 9; ++i) m[i / 3][i % 3] = json_number(key, v[i]);
      matrix = m;
    } else if (key == "profile.transfer") transfer = parse_transfer(json_string(key, v));
    else if (key == "detail.enabled") cfg.detail_preserve = json_bool(key, v);
    else if (key == "detail.sigma_s") cfg.bilateral.sigma_s = json_number(key, v);
    else if (key == "detail.sigma_r") cfg.bilateral.sigma_r = json_number(key, v);
    else if (key == "solver.tol") cfg.solver.tol = json_number(key, v);
    else if (key == "solver.max_iter") {
      if (!v.is_number_integer()) config_error(key + ": expected an integer");
      cfg.solver.max_iter = v.get<int>();
    } else if (key == "color_mode") cfg.color_mode = parse_color_mode(json_string(key, v));
    else if (key == "model") cfg.model = parse_model(json_string(key, v));
    else config_error("unknown configuration key '" + key + "'");
  }
  if (matrix || transfer)
    cfg.profile = DisplayProfile(matrix.value_or(cfg.profile.rgb_to_xyz()),
                                 transfer.value_or(cfg.profile.transfer()));
}

inline CompensationConfig config_from_json(const nlohmann::json& j) {
  CompensationConfig cfg;
  apply_overrides(cfg, j);
  cfg.validate();
  return cfg;
}

inline nlohmann::json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string(what) + ": " + e.what());
  }
}

inline nlohmann::json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

/// Nested JSON carrying every schema key. sigma_px is always explicit so the
/// echo reproduces the run without the original geometry-derived default.
inline nlohmann::json to_json(const CompensationConfig& cfg) {
  nlohmann::json j;
  j["viewing"] = {{"distance_in", cfg.geometry.distance_in},
                  {"density_ppi", cfg.geometry.density_ppi}};
  j["inhibition"] = {{"alpha", cfg.alpha},
                     {"sigma_px", cfg.resolved_sigma()},
                     {"beta", cfg.beta ? nlohmann::json(*cfg.beta) : nlohmann::json(nullptr)},
                     {"normalization", std::string(to_string(cfg.normalization))}};
  j["weights"] = {{"l", cfg.weights.l}, {"m", cfg.weights.m}, {"s", cfg.weights.s}};
  nlohmann::json m = nlohmann::json::array();
  for (const auto& row : cfg.profile.rgb_to_xyz())
    for (double v : row) m.push_back(v);
  j["profile"] = {{"matrix", m}, {"transfer", format_transfer(cfg.profile.transfer())}};
  j["detail"] = {{"enabled", cfg.detail_preserve},
                 {"sigma_s", cfg.bilateral.sigma_s},
                 {"sigma_r", cfg.bilateral.sigma_r}};
  j["solver"] = {{"tol", cfg.solver.tol}, {"max_iter", cfg.solver.max_iter}};
  j["color_mode"] = std::string(to_string(cfg.color_mode));
  j["model"] = std::string(to_string(cfg.model));
  return j;
}

}  // namespace latcomp
