#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace holo {

/// Binary background mask: 1 = background pixel (outside the object).
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> values;

  Mask() = default;
  Mask(int h, int w, std::uint8_t fill = 1)
      : height(h), width(w), values(size_t(h) * w, fill) {}

  std::uint8_t at(int y, int x) const { return values[size_t(y) * width + x]; }
  std::uint8_t& at(int y, int x) { return values[size_t(y) * width + x]; }

  size_t count() const {
    size_t n = 0;
    for (auto v : values) n += v;
    return n;
  }

  bool operator==(const Mask& o) const {
    return height == o.height && width == o.width && values == o.values;
  }
};

/// Halves each dimension; a 2x2 block maps to background when at least
/// half of its pixels are background.
Mask downsample2x(const Mask& m);

/// 8-bit PNG/PGM export, 255 = background.
void save_mask(const Mask& m, const std::filesystem::path& path);
Mask load_mask(const std::filesystem::path& path);

}  // namespace holo
