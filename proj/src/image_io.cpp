#include "holo/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "holo/errors.hpp"

namespace holo::io {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

GrayImage read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG: " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  // Normalize everything to single-channel gray, keeping 16-bit when present.
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (depth == 16) png_set_swap(png);  // PNG is big-endian on disk
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);

  GrayImage img;
  img.height = int(png_get_image_height(png, info));
  img.width = int(png_get_image_width(png, info));
  img.bit_depth = depth == 16 ? 16 : 8;
  img.pixels.resize(size_t(img.height) * img.width);

  std::vector<std::uint8_t> rowbuf(png_get_rowbytes(png, info));
  for (int y = 0; y < img.height; ++y) {
    png_read_row(png, rowbuf.data(), nullptr);
    if (depth == 16) {
      const auto* p = reinterpret_cast<const std::uint16_t*>(rowbuf.data());
      std::copy(p, p + img.width, img.pixels.begin() + size_t(y) * img.width);
    } else {
      for (int x = 0; x < img.width; ++x)
        img.pixels[size_t(y) * img.width + x] = rowbuf[x];
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot open for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), img.bit_depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (img.bit_depth == 16) png_set_swap(png);

  std::vector<std::uint8_t> rowbuf(size_t(img.width) * (img.bit_depth == 16 ? 2 : 1));
  for (int y = 0; y < img.height; ++y) {
    if (img.bit_depth == 16) {
      std::memcpy(rowbuf.data(), img.pixels.data() + size_t(y) * img.width,
                  size_t(img.width) * 2);
    } else {
      for (int x = 0; x < img.width; ++x)
        rowbuf[x] = std::uint8_t(std::min<std::uint16_t>(img.pixels[size_t(y) * img.width + x], 255));
    }
    png_write_row(png, rowbuf.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  std::string magic;
  is >> magic;
  if (magic != "P5") throw IoError("not a binary PGM: " + path.string());
  auto next_int = [&is, &path]() {
    // Skips whitespace and '#' comment lines.
    while (true) {
      int ch = is.peek();
      if (ch == '#') {
        std::string line;
        std::getline(is, line);
      } else if (std::isspace(ch)) {
        is.get();
      } else {
        break;
      }
    }
    long v = -1;
    is >> v;
    if (!is || v < 0) throw IoError("corrupt PGM header: " + path.string());
    return v;
  };
  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  is.get();  // single whitespace after maxval
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("corrupt PGM header: " + path.string());

  GrayImage img;
  img.width = int(w);
  img.height = int(h);
  img.bit_depth = maxval > 255 ? 16 : 8;
  img.pixels.resize(size_t(w) * h);
  if (img.bit_depth == 8) {
    std::vector<std::uint8_t> buf(img.pixels.size());
    is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (!is) throw IoError("truncated PGM: " + path.string());
    std::copy(buf.begin(), buf.end(), img.pixels.begin());
  } else {
    std::vector<std::uint8_t> buf(img.pixels.size() * 2);
    is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (!is) throw IoError("truncated PGM: " + path.string());
    for (size_t i = 0; i < img.pixels.size(); ++i)
      img.pixels[i] = std::uint16_t((buf[i * 2] << 8) | buf[i * 2 + 1]);  // big-endian
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  const int maxval = img.bit_depth == 16 ? 65535 : 255;
  os << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  if (img.bit_depth == 8) {
    std::vector<std::uint8_t> buf(img.pixels.size());
    for (size_t i = 0; i < buf.size(); ++i)
      buf[i] = std::uint8_t(std::min<std::uint16_t>(img.pixels[i], 255));
    os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  } else {
    std::vector<std::uint8_t> buf(img.pixels.size() * 2);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
      buf[i * 2] = std::uint8_t(img.pixels[i] >> 8);
      buf[i * 2 + 1] = std::uint8_t(img.pixels[i] & 0xff);
    }
    os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

bool has_ext(const std::filesystem::path& path, const char* ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
  if (has_ext(path, ".pgm")) return read_pgm(path);
  if (has_ext(path, ".png")) return read_png(path);
  // Fall back to content sniffing.
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  char head[2] = {0, 0};
  is.read(head, 2);
  is.close();
  if (head[0] == 'P' && head[1] == '5') return read_pgm(path);
  return read_png(path);
}

void write_gray(const std::filesystem::path& path, const GrayImage& img) {
  if (img.bit_depth != 8 && img.bit_depth != 16)
    throw ParamError("bit depth must be 8 or 16");
  if (has_ext(path, ".pgm"))
    write_pgm(path, img);
  else
    write_png(path, img);
}

GrayImage quantize16(const std::vector<double>& unit_values, int height, int width) {
  GrayImage img;
  img.height = height;
  img.width = width;
  img.bit_depth = 16;
  img.pixels.resize(unit_values.size());
  for (size_t i = 0; i < unit_values.size(); ++i) {
    const double v = std::clamp(unit_values[i], 0.0, 1.0);
    img.pixels[i] = std::uint16_t(std::lround(v * 65535.0));
  }
  return img;
}

GrayImage quantize8(const std::vector<double>& unit_values, int height, int width) {
  GrayImage img;
  img.height = height;
  img.width = width;
  img.bit_depth = 8;
  img.pixels.resize(unit_values.size());
  for (size_t i = 0; i < unit_values.size(); ++i) {
    const double v = std::clamp(unit_values[i], 0.0, 1.0);
    img.pixels[i] = std::uint16_t(std::lround(v * 255.0));
  }
  return img;
}

}  // namespace holo::io
