#pragma once

// 16-bit PNG export of images and sub-aperture mosaics. Requires libpng.
//
// Mosaic layout: an Ns x Nt grid of Nu x Nv tiles. Tile column is s, tile
// row is t; within a tile u runs left to right. Both t and v increase
// upward (y up), so rows are flipped relative to index order.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "lfrl/errors.hpp"
#include "lfrl/light_field.hpp"

namespace lfrl {

// Raw 16-bit raster, row-major, channel fastest.
struct Raster16 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint16_t> pixels;
};

inline std::uint16_t quantize16(double x) {
  if (!(x > 0)) return 0;
  if (x >= 1) return 65535;
  return static_cast<std::uint16_t>(std::lround(x * 65535.0));
}

inline void write_png16(const Raster16& r, const std::string& path) {
  if (r.channels != 1 && r.channels != 3) {
    throw FormatError("unsupported channel count " + std::to_string(r.channels));
  }
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng init failed");
  }
  std::vector<png_byte> row(r.width * r.channels * 2);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng error writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(r.width), static_cast<png_uint_32>(r.height), 16,
               r.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < r.height; ++y) {
    for (std::size_t i = 0; i < r.width * r.channels; ++i) {
      const std::uint16_t px = r.pixels[y * r.width * r.channels + i];
      row[2 * i] = static_cast<png_byte>(px >> 8);
      row[2 * i + 1] = static_cast<png_byte>(px & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline Raster16 read_png16(const std::string& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!fp) throw IoError("cannot open " + path);
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng init failed");
  }
  Raster16 r;
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("libpng error reading " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth < 16) png_set_expand_16(png);
  png_read_update_info(png, info);
  r.width = png_get_image_width(png, info);
  r.height = png_get_image_height(png, info);
  r.channels = png_get_channels(png, info);
  if (r.channels != 1 && r.channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("unsupported PNG channel count " + std::to_string(r.channels));
  }
  r.pixels.resize(r.width * r.height * r.channels);
  row.resize(png_get_rowbytes(png, info));
  for (std::size_t y = 0; y < r.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (std::size_t i = 0; i < r.width * r.channels; ++i) {
      r.pixels[y * r.width * r.channels + i] =
          static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1]);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return r;
}

inline Raster16 mosaic_raster(const LightField& lf) {
  const Dims& d = lf.dims();
  if (d.nc != 1 && d.nc != 3) throw FormatError("unsupported channel count " + std::to_string(d.nc));
  Raster16 r{d.ns * d.nu, d.nt * d.nv, d.nc, {}};
  r.pixels.resize(r.width * r.height * r.channels);
  for (std::size_t s = 0; s < d.ns; ++s)
    for (std::size_t t = 0; t < d.nt; ++t)
      for (std::size_t u = 0; u < d.nu; ++u)
        for (std::size_t v = 0; v < d.nv; ++v) {
          const std::size_t x = s * d.nu + u;
          const std::size_t y = (d.nt - 1 - t) * d.nv + (d.nv - 1 - v);
          for (std::size_t c = 0; c < d.nc; ++c) {
            r.pixels[(y * r.width + x) * d.nc + c] = quantize16(lf(s, t, u, v, c));
          }
        }
  return r;
}

inline LightField mosaic_to_lf(const Raster16& r, std::size_t ns, std::size_t nt,
                               const Intrinsics& intrinsics) {
  if (r.channels != 1 && r.channels != 3) {
    throw FormatError("unsupported channel count " + std::to_string(r.channels));
  }
  if (ns == 0 || nt == 0 || r.width % ns != 0 || r.height % nt != 0) {
    throw FormatError("mosaic size is not divisible by the view grid");
  }
  const Dims d{ns, nt, r.width / ns, r.height / nt, r.channels};
  LightField lf(d, intrinsics);
  for (std::size_t s = 0; s < d.ns; ++s)
    for (std::size_t t = 0; t < d.nt; ++t)
      for (std::size_t u = 0; u < d.nu; ++u)
        for (std::size_t v = 0; v < d.nv; ++v) {
          const std::size_t x = s * d.nu + u;
          const std::size_t y = (d.nt - 1 - t) * d.nv + (d.nv - 1 - v);
          for (std::size_t c = 0; c < d.nc; ++c) {
            lf(s, t, u, v, c) = r.pixels[(y * r.width + x) * d.nc + c] / 65535.0;
          }
        }
  return lf;
}

inline void export_mosaic(const LightField& lf, const std::string& path) {
  write_png16(mosaic_raster(lf), path);
}

inline LightField import_mosaic(const std::string& path, std::size_t ns, std::size_t nt,
                                const Intrinsics& intrinsics) {
  return mosaic_to_lf(read_png16(path), ns, nt, intrinsics);
}

// A single image exported the same way as a 1x1 mosaic.
inline void write_image_png(const Image& img, const std::string& path) {
  LightField lf(Dims{1, 1, img.nu, img.nv, img.nc}, Intrinsics{}, img.data);
  export_mosaic(lf, path);
}

inline Image read_image_png(const std::string& path) {
  const LightField lf = import_mosaic(path, 1, 1, Intrinsics{});
  Image img(lf.dims().nu, lf.dims().nv, lf.dims().nc);
  std::copy(lf.data().begin(), lf.data().end(), img.data.begin());
  return img;
}

}  // namespace lfrl
