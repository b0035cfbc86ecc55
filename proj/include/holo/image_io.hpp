#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace holo::io {

/// Grayscale raster as read from disk: samples in [0, (1<<bit_depth)-1].
struct GrayImage {
  int height = 0;
  int width = 0;
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> pixels;

  double max_value() const { return bit_depth == 16 ? 65535.0 : 255.0; }
};

/// Reads an 8- or 16-bit grayscale PNG or PGM (decided by content/extension).
GrayImage read_gray(const std::filesystem::path& path);

/// Writes grayscale PNG/PGM, format chosen from the file extension
/// (.png or .pgm); bit_depth must be 8 or 16.
void write_gray(const std::filesystem::path& path, const GrayImage& img);

/// Quantizes values in [0,1] to a 16-bit image (values clamped).
GrayImage quantize16(const std::vector<double>& unit_values, int height, int width);

/// Quantizes values in [0,1] to an 8-bit image (values clamped).
GrayImage quantize8(const std::vector<double>& unit_values, int height, int width);

}  // namespace holo::io
