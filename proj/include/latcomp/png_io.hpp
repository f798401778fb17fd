#pragma once

// 8/16-bit PNG read and write. Grayscale and palette images are expanded to
// RGB on load and alpha is dropped. Output is always RGB with no ancillary
// chunks, so equal pixels give equal bytes.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latcomp/error.hpp"
#include "latcomp/plane.hpp"

namespace latcomp {

struct DecodedPng {
  TriPlane image;  // EncodedRGB in [0,1]
  int bit_depth = 8;
};

namespace detail {

struct PngReadCursor {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
};

inline void png_read_callback(png_structp png, png_bytep out, png_size_t n) {
  auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + n > cur->data.size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, cur->data.data() + cur->offset, n);
  cur->offset += n;
}

inline void png_write_callback(png_structp png, png_bytep in, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + n);
}

inline void png_flush_callback(png_structp) {}

inline void png_silent_warning(png_structp, png_const_charp) {}

[[noreturn]] inline void png_silent_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }

}  // namespace detail

/// Width and height from the IHDR chunk, without decoding. Empty when the
/// bytes do not start with a PNG signature and header.
inline std::optional<std::pair<std::uint32_t, std::uint32_t>> png_dimensions(
    std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 24 || png_sig_cmp(bytes.data(), 0, 8) != 0) return std::nullopt;
  if (std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) return std::nullopt;
  const auto be32 = [&](std::size_t off) {
    return std::uint32_t(bytes[off]) << 24 | std::uint32_t(bytes[off + 1]) << 16 |
           std::uint32_t(bytes[off + 2]) << 8 | std::uint32_t(bytes[off + 3]);
  };
  return std::pair{be32(16), be32(20)};
}

/// Decodes PNG bytes. Images with more than `max_pixels` pixels are rejected
/// before the pixel data is allocated.
inline DecodedPng decode_png(std::span<const std::uint8_t> bytes,
                             std::size_t max_pixels = std::size_t(1) << 32) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    throw Error(ErrorCategory::Io, "not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_silent_error,
                                           detail::png_silent_warning);
  if (!png) throw Error(ErrorCategory::Io, "libpng: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCategory::Io, "libpng: cannot create info struct");
  }

  detail::PngReadCursor cursor{bytes, 0};
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  // 0 = ok, 1 = libpng error, 2 = too large
  volatile int failure = 0;

  if (setjmp(png_jmpbuf(png))) {
    failure = 1;
  } else {
    png_set_read_fn(png, &cursor, detail::png_read_callback);
    png_read_info(png, info);
    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (std::uint64_t(w) * h > max_pixels) {
      failure = 2;
    } else {
      const int color = png_get_color_type(png, info);
      png_set_expand(png);
      if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
      if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
      png_read_update_info(png, info);

      const std::size_t stride = png_get_rowbytes(png, info);
      pixels.resize(stride * h);
      rows.resize(h);
      for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * stride;
      png_read_image(png, rows.data());
      png_read_end(png, nullptr);
    }
  }

  DecodedPng out;
  if (failure == 0) {
    const std::size_t w = png_get_image_width(png, info);
    const std::size_t h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    out.bit_depth = depth;
    out.image = TriPlane(w, h, ColorSpace::EncodedRGB);
    const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
    const std::size_t stride = w * 3 * (depth == 16 ? 2 : 1);
    for (std::size_t y = 0; y < h; ++y) {
      const std::uint8_t* src = pixels.data() + y * stride;
      for (std::size_t x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) {
          const std::size_t k = x * 3 + c;
          const unsigned v = depth == 16 ? (unsigned(src[2 * k]) << 8) | src[2 * k + 1] : src[k];
          out.image[c](x, y) = v * scale;
        }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (failure == 1) throw Error(ErrorCategory::Io, "corrupt or unsupported PNG data");
  if (failure == 2)
    throw Error(ErrorCategory::Io,
                "PNG exceeds the pixel limit of " + std::to_string(max_pixels) + " pixels");
  return out;
}

/// Encodes an EncodedRGB image at 8 or 16 bits per channel. Values are
/// clamped to [0,1] and rounded to the nearest code.
inline std::vector<std::uint8_t> encode_png(const TriPlane& img, int bits = 16) {
  if (bits != 8 && bits != 16) config_error("PNG bit depth must be 8 or 16");
  if (img.pixel_count() == 0) throw Error(ErrorCategory::Io, "cannot encode an empty image");

  const std::size_t w = img.width(), h = img.height();
  const std::size_t bpc = bits / 8;
  const double maxv = bits == 16 ? 65535.0 : 255.0;
  std::vector<std::uint8_t> pixels(w * h * 3 * bpc);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const auto v =
            static_cast<unsigned>(std::lround(std::clamp(img[c](x, y), 0.0, 1.0) * maxv));
        const std::size_t k = ((y * w + x) * 3 + c) * bpc;
        if (bpc == 2) {
          pixels[k] = static_cast<std::uint8_t>(v >> 8);
          pixels[k + 1] = static_cast<std::uint8_t>(v & 0xff);
        } else {
          pixels[k] = static_cast<std::uint8_t>(v);
        }
      }
  std::vector<png_bytep> rows(h);
  for (std::size_t y = 0; y < h; ++y) rows[y] = pixels.data() + y * w * 3 * bpc;

  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_silent_error,
                                            detail::png_silent_warning);
  if (!png) throw Error(ErrorCategory::Io, "libpng: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCategory::Io, "libpng: cannot create info struct");
  }
  volatile bool failed = false;
  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_set_write_fn(png, &out, detail::png_write_callback, detail::png_flush_callback);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bits,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  if (failed) throw Error(ErrorCategory::Io, "libpng: encoding failed");
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::Io, "cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::Io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCategory::Io, "write to '" + path + "' failed");
}

inline DecodedPng read_png(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return decode_png(bytes);
}

inline void write_png(const std::string& path, const TriPlane& img, int bits = 16) {
  write_file_bytes(path, encode_png(img, bits));
}

}  // namespace latcomp
