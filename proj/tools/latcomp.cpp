// latcomp: lateral-inhibition compensation command-line tool.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "latcomp/config.hpp"
#include "latcomp/error.hpp"
#include "latcomp/patterns.hpp"
#include "latcomp/pipeline.hpp"
#include "latcomp/png_io.hpp"
#include "latcomp/service.hpp"

namespace {

using namespace latcomp;

// Exit codes per error category; 1 is reserved for usage errors.
int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Io: return 2;
    case ErrorCategory::Config: return 3;
    case ErrorCategory::OutOfRange: return 3;
    case ErrorCategory::NoConvergence: return 4;
    case ErrorCategory::Degenerate: return 5;
  }
  return 1;
}

struct ConfigFlags {
  std::string config_path;
  std::optional<double> alpha, sigma, beta, distance, ppi, weight_l, weight_m, weight_s;
  std::optional<double> sigma_s, sigma_r, tol;
  std::optional<int> max_iter;
  std::optional<std::string> normalization, transfer, color_mode, model;
  std::vector<double> matrix;
  std::optional<bool> detail;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--alpha", alpha, "compensation level alpha");
    app->add_option("--sigma", sigma, "kernel scale in pixels (overrides viewing geometry)");
    app->add_option("--beta", beta, "Barlow-Lange beta");
    app->add_option("--distance-in", distance, "viewing distance in inches");
    app->add_option("--ppi", ppi, "display pixel density (pixels per inch)");
    app->add_option("--normalization", normalization, "unit-sum | paper-literal");
    app->add_option("--weight-l", weight_l, "total-excitation weight of L");
    app->add_option("--weight-m", weight_m, "total-excitation weight of M");
    app->add_option("--weight-s", weight_s, "total-excitation weight of S");
    app->add_option("--matrix", matrix, "display RGB->XYZ matrix, 9 values row-major")
        ->expected(9)
        ->delimiter(',');
    app->add_option("--transfer", transfer, "srgb | linear | gamma:<value>");
    app->add_flag("--detail,!--no-detail", detail, "bilateral detail preservation");
    app->add_option("--sigma-s", sigma_s, "bilateral spatial sigma (pixels)");
    app->add_option("--sigma-r", sigma_r, "bilateral range sigma (fraction of range)");
    app->add_option("--tol", tol, "solver tolerance");
    app->add_option("--max-iter", max_iter, "solver iteration cap");
    app->add_option("--color-mode", color_mode, "chromatically-blind | channel-independent");
    app->add_option("--model", model, "hartline-ratliff | barlow-lange");
  }

  nlohmann::json overrides() const {
    nlohmann::json j = nlohmann::json::object();
    auto put = [&j](const char* key, const auto& opt) {
      if (opt) j[key] = *opt;
    };
    put("inhibition.alpha", alpha);
    put("inhibition.sigma_px", sigma);
    put("inhibition.beta", beta);
    put("inhibition.normalization", normalization);
    put("viewing.distance_in", distance);
    put("viewing.density_ppi", ppi);
    put("weights.l", weight_l);
    put("weights.m", weight_m);
    put("weights.s", weight_s);
    put("profile.transfer", transfer);
    put("detail.enabled", detail);
    put("detail.sigma_s", sigma_s);
    put("detail.sigma_r", sigma_r);
    put("solver.tol", tol);
    put("solver.max_iter", max_iter);
    put("color_mode", color_mode);
    put("model", model);
    if (!matrix.empty()) j["profile.matrix"] = matrix;
    return j;
  }

  // defaults <- config file <- flags
  CompensationConfig resolve() const {
    CompensationConfig cfg;
    if (!config_path.empty()) apply_overrides(cfg, read_config_file(config_path));
    apply_overrides(cfg, overrides());
    cfg.validate();
    return cfg;
  }
};

struct InputFlags {
  std::string pattern;
  std::size_t width = 512, height = 512;

  void add_to(CLI::App* app) {
    app->add_option("--pattern", pattern, "use a built-in pattern instead of an input file");
    app->add_option("--width", width, "pattern width");
    app->add_option("--height", height, "pattern height");
  }

  TriPlane load(const std::string& path) const {
    if (!pattern.empty()) {
      const auto kind = parse_pattern_kind(pattern);
      if (!kind) config_error("unknown pattern '" + pattern + "'");
      PatternSpec spec;
      spec.kind = *kind;
      spec.width = width;
      spec.height = height;
      return generate(spec);
    }
    if (path.empty()) config_error("an input image or --pattern is required");
    return read_png(path).image;
  }
};

// Positional [input] output, where input may be replaced by --pattern.
struct InOut {
  std::vector<std::string> files;

  std::pair<std::string, std::string> split(const InputFlags& in) const {
    const std::size_t want = in.pattern.empty() ? 2 : 1;
    if (files.size() != want)
      config_error(in.pattern.empty() ? "expected <input> <output>"
                                      : "expected <output> when --pattern is given");
    return want == 2 ? std::pair{files[0], files[1]} : std::pair{std::string(), files[0]};
  }
};

void echo_config(const Pipeline& p) {
  std::cerr << "resolved-config: " << p.echo().dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lateral-inhibition compensation for displayed images"};
  app.require_subcommand(1);

  ConfigFlags cfg_flags;
  InputFlags in_flags;
  InOut io;
  int bits = 16;
  bool no_metadata = false;

  auto* compensate = app.add_subcommand("compensate", "write a laterally-compensated image");
  cfg_flags.add_to(compensate);
  in_flags.add_to(compensate);
  compensate->add_option("files", io.files, "[input.png] output.png")->required();
  compensate->add_option("--bits", bits, "output bit depth (8 or 16)")->check(CLI::IsMember({8, 16}));
  compensate->add_flag("--no-metadata", no_metadata, "do not write <output>.json");

  ConfigFlags perceive_cfg;
  InputFlags perceive_in;
  InOut perceive_io;
  int perceive_bits = 16;
  auto* perceive = app.add_subcommand("perceive", "render the predicted perceived image");
  perceive_cfg.add_to(perceive);
  perceive_in.add_to(perceive);
  perceive->add_option("files", perceive_io.files, "[input.png] output.png")->required();
  perceive->add_option("--bits", perceive_bits, "output bit depth")->check(CLI::IsMember({8, 16}));

  ConfigFlags scan_cfg;
  InputFlags scan_in;
  std::string scan_input, scan_output;
  std::size_t row = 0, col0 = 0, col1 = 0;
  auto* scanline = app.add_subcommand("scanline", "perceived input/compensated profiles as CSV");
  scan_cfg.add_to(scanline);
  scan_in.add_to(scanline);
  scanline->add_option("input", scan_input, "input PNG (omit with --pattern)");
  scanline->add_option("--row", row, "row index")->required();
  scanline->add_option("--col0", col0, "first column (inclusive)")->required();
  scanline->add_option("--col1", col1, "last column (inclusive)")->required();
  scanline->add_option("-o,--output", scan_output, "CSV path (default stdout)");

  std::string pattern_name, pattern_out;
  std::size_t pw = 512, ph = 512;
  int pattern_bits = 16;
  auto* pattern = app.add_subcommand("pattern", "write a built-in test pattern");
  pattern->add_option("name", pattern_name, "pattern name")
      ->required()
      ->check(CLI::IsMember(pattern_names()));
  pattern->add_option("output", pattern_out, "output PNG")->required();
  pattern->add_option("--width", pw, "width");
  pattern->add_option("--height", ph, "height");
  pattern->add_option("--bits", pattern_bits, "bit depth")->check(CLI::IsMember({8, 16}));

  ConfigFlags kinfo_cfg;
  auto* kernel_info = app.add_subcommand("kernel-info", "print the resolved kernel as JSON");
  kinfo_cfg.add_to(kernel_info);

  ConfigFlags serve_cfg;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "run the HTTP preview service");
  serve_cfg.add_to(serve);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compensate) {
      const auto [input, output] = io.split(in_flags);
      const Pipeline pipeline(cfg_flags.resolve());
      echo_config(pipeline);
      const CompensationResult r = pipeline.compensate(in_flags.load(input));
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      write_png(output, r.image, bits);
      if (!no_metadata) {
        nlohmann::json meta = pipeline.echo();
        meta["clip_fraction"] = r.clip.fraction();
        const std::string text = meta.dump(2) + "\n";
        write_file_bytes(output + ".json", {reinterpret_cast<const std::uint8_t*>(text.data()),
                                            text.size()});
      }
    } else if (*perceive) {
      const auto [input, output] = perceive_io.split(perceive_in);
      const Pipeline pipeline(perceive_cfg.resolve());
      echo_config(pipeline);
      const Perception p = pipeline.predict(perceive_in.load(input));
      std::cerr << "solver: " << p.stats.iterations << " iterations, last delta "
                << p.stats.last_delta << '\n';
      TriPlane rgb = xyz_to_rgb(lms_to_xyz(expand(p.perceived, pipeline.compression()),
                                           pipeline.absorption()),
                                pipeline.config().profile);
      Pipeline::clamp_gamut(rgb);
      write_png(output, encode_transfer(rgb, pipeline.config().profile), perceive_bits);
    } else if (*scanline) {
      const Pipeline pipeline(scan_cfg.resolve());
      echo_config(pipeline);
      if (!scan_in.pattern.empty() && !scan_input.empty())
        config_error("give either an input image or --pattern, not both");
      const std::string csv =
          format_scanline_csv(pipeline.scanline(scan_in.load(scan_input), row, col0, col1));
      if (scan_output.empty()) std::cout << csv;
      else write_file_bytes(scan_output, {reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()});
    } else if (*pattern) {
      PatternSpec spec;
      spec.kind = *parse_pattern_kind(pattern_name);
      spec.width = pw;
      spec.height = ph;
      write_png(pattern_out, generate(spec), pattern_bits);
    } else if (*kernel_info) {
      const Pipeline pipeline(kinfo_cfg.resolve());
      const DiscreteKernel& k = pipeline.kernel();
      nlohmann::json j = pipeline.echo();
      j["kernel"] = {{"alpha", k.alpha},
                     {"sigma_px", k.sigma_px},
                     {"radius", k.radius},
                     {"normalization", std::string(to_string(k.normalization))},
                     {"gaussian_sum", k.gaussian_sum},
                     {"center_tap", k.gaussian_tap(0, 0)},
                     {"taps", k.taps}};
      std::cout << j.dump(2) << '\n';
    } else if (*serve) {
      const Service service(serve_cfg.resolve());
      std::cerr << "resolved-config: " << to_json(service.base_config()).dump() << '\n';
      std::cerr << "listening on http://" << host << ':' << port << '\n';
      if (!service.run(host, port)) throw Error(ErrorCategory::Io, "cannot bind " + host + ":" + std::to_string(port));
    }
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", std::string(to_string(e.category()))},
                                {"message", e.what()}}
                     .dump()
              << '\n';
    return exit_code(e.category());
  }
  return 0;
}
