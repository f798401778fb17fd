#pragma once

// HTTP preview service for interactive calibration.
//
//   GET  /healthz                  liveness
//   GET  /api/patterns             pattern names
//   GET  /api/pattern/{name}?w=&h= 16-bit PNG of a pattern
//   GET  /api/defaults?distance_in=&density_ppi=
//   POST /api/compensate           PNG (+ X-Resolved-Config header)
//   POST /api/scanline             CSV
//
// POST bodies are either JSON ({"pattern": ..., "w": ..., "h": ..., "bits": ...,
// plus config keys nested or dotted}) or a raw PNG upload with
// Content-Type image/png and config keys in the query string.

#include <httplib.h>

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "latcomp/config.hpp"
#include "latcomp/error.hpp"
#include "latcomp/patterns.hpp"
#include "latcomp/pipeline.hpp"
#include "latcomp/png_io.hpp"

namespace latcomp {

inline constexpr std::size_t kMaxUploadPixels = 16'000'000;

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, std::string category, const std::string& msg)
      : std::runtime_error(msg), status_(status), category_(std::move(category)) {}
  int status() const noexcept { return status_; }
  const std::string& category() const noexcept { return category_; }

 private:
  int status_;
  std::string category_;
};

class Service {
 public:
  explicit Service(CompensationConfig base) : base_(std::move(base)) { base_.validate(); }

  const CompensationConfig& base_config() const noexcept { return base_; }

  void register_routes(httplib::Server& server) const {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok\n", "text/plain");
    });
    server.Get("/api/patterns", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(nlohmann::json(pattern_names()).dump(), "application/json");
    });
    server.Get(R"(/api/pattern/([A-Za-z\-]+))", guarded([](const httplib::Request& req,
                                                           httplib::Response& res) {
      PatternSpec spec = pattern_spec(req.matches[1].str(), query_json(req));
      const auto bytes = encode_png(generate(spec), 16);
      res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
    }));
    server.Get("/api/defaults", guarded([this](const httplib::Request& req,
                                               httplib::Response& res) {
      CompensationConfig cfg = base_;
      nlohmann::json overrides = nlohmann::json::object();
      for (const char* key : {"distance_in", "density_ppi"})
        if (req.has_param(key)) overrides["viewing"][key] = parse_scalar(req.get_param_value(key));
      apply_overrides(cfg, overrides);
      cfg.sigma_px.reset();
      res.set_content(Pipeline(cfg).echo().dump(2), "application/json");
    }));
    server.Post("/api/compensate", guarded([this](const httplib::Request& req,
                                                  httplib::Response& res) {
      Request r = parse_request(req);
      const Pipeline pipeline(r.config);
      const CompensationResult out = pipeline.compensate(r.image);
      const auto bytes = encode_png(out.image, r.bits);
      res.set_header("X-Resolved-Config", pipeline.echo().dump());
      res.set_header("X-Clip-Fraction", std::to_string(out.clip.fraction()));
      if (!out.warnings.empty()) res.set_header("X-Warnings", nlohmann::json(out.warnings).dump());
      res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
    }));
    server.Post("/api/scanline", guarded([this](const httplib::Request& req,
                                                httplib::Response& res) {
      Request r = parse_request(req);
      if (!r.row || !r.col0 || !r.col1)
        throw HttpError(400, "Config", "scanline requires row, col0 and col1");
      const Pipeline pipeline(r.config);
      const auto rows = pipeline.scanline(r.image, *r.row, *r.col0, *r.col1);
      res.set_header("X-Resolved-Config", pipeline.echo().dump());
      res.set_content(format_scanline_csv(rows), "text/csv; charset=utf-8");
    }));
  }

  /// Blocks until the server stops.
  bool run(const std::string& host, int port) const {
    httplib::Server server;
    register_routes(server);
    return server.listen(host, port);
  }

 private:
  struct Request {
    CompensationConfig config;
    TriPlane image;
    int bits = 16;
    std::optional<std::size_t> row, col0, col1;
  };

  template <typename Fn>
  static httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const HttpError& e) {
        fail(res, e.status(), e.category(), e.what());
      } catch (const NoConvergence& e) {
        fail(res, 422, "NoConvergence", e.what());
      } catch (const Error& e) {
        const int status = e.category() == ErrorCategory::Degenerate ? 422 : 400;
        fail(res, status, std::string(to_string(e.category())), e.what());
      } catch (const std::exception& e) {
        fail(res, 500, "Internal", e.what());
      }
    };
  }

  static void fail(httplib::Response& res, int status, const std::string& category,
                   const std::string& msg) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", category}, {"message", msg}}.dump(),
                    "application/json");
  }

  // Query values arrive as text; numbers and booleans are recovered, anything
  // else stays a string.
  static nlohmann::json parse_scalar(const std::string& v) {
    auto j = nlohmann::json::parse(v, nullptr, false);
    if (!j.is_discarded() && (j.is_number() || j.is_boolean() || j.is_null())) return j;
    return v;
  }

  static nlohmann::json query_json(const httplib::Request& req) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : req.params) j[k] = parse_scalar(v);
    return j;
  }

  static std::size_t take_size(nlohmann::json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = j[key];
    j.erase(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw HttpError(400, "Config", std::string(key) + ": expected a non-negative integer");
    return v.get<std::size_t>();
  }

  static PatternSpec pattern_spec(const std::string& name, nlohmann::json j) {
    const auto kind = parse_pattern_kind(name);
    if (!kind) throw HttpError(404, "Config", "unknown pattern '" + name + "'");
    PatternSpec spec;
    spec.kind = *kind;
    spec.width = take_size(j, "w", 512);
    spec.height = take_size(j, "h", 512);
    spec.validate();
    return spec;
  }

  Request parse_request(const httplib::Request& req) const {
    Request r{base_, {}, 16, {}, {}, {}};
    nlohmann::json body;
    const bool png_upload = req.get_header_value("Content-Type").starts_with("image/png");
    if (png_upload) {
      body = query_json(req);
      const auto* data = reinterpret_cast<const std::uint8_t*>(req.body.data());
      const std::span<const std::uint8_t> bytes(data, req.body.size());
      if (auto dims = png_dimensions(bytes);
          dims && std::uint64_t(dims->first) * dims->second > kMaxUploadPixels)
        throw HttpError(413, "IO", "upload exceeds the limit of 16 megapixels");
      r.image = decode_png(bytes, kMaxUploadPixels).image;
    } else {
      body = req.body.empty() ? nlohmann::json::object() : parse_json_text(req.body, "request body");
      if (!body.is_object()) throw HttpError(400, "Config", "request body must be a JSON object");
      const nlohmann::json query = query_json(req);
      for (const auto& [k, v] : query.items()) body[k] = v;
    }

    std::optional<std::string> pattern;
    if (body.contains("pattern")) {
      if (!body["pattern"].is_string()) throw HttpError(400, "Config", "pattern: expected a name");
      pattern = body["pattern"].get<std::string>();
      body.erase("pattern");
    }
    nlohmann::json geometry = nlohmann::json::object();
    for (const char* key : {"w", "h"})
      if (body.contains(key)) {
        geometry[key] = body[key];
        body.erase(key);
      }
    for (auto [key, slot] : {std::pair{"row", &r.row}, {"col0", &r.col0}, {"col1", &r.col1}})
      if (body.contains(key)) *slot = take_size(body, key, 0);
    if (body.contains("bits")) {
      r.bits = static_cast<int>(take_size(body, "bits", 16));
      if (r.bits != 8 && r.bits != 16) throw HttpError(400, "Config", "bits must be 8 or 16");
    }

    if (!png_upload) {
      if (!pattern) throw HttpError(400, "Config", "request needs a pattern name or a PNG body");
      r.image = generate(pattern_spec(*pattern, geometry));
    } else if (pattern) {
      throw HttpError(400, "Config", "give either a pattern or a PNG body, not both");
    }

    apply_overrides(r.config, body);
    r.config.validate();
    return r;
  }

  CompensationConfig base_;
};

}  // namespace latcomp
