#include "holo/mask.hpp"

#include "holo/errors.hpp"
#include "holo/image_io.hpp"

namespace holo {

Mask downsample2x(const Mask& m) {
  if (m.height % 2 || m.width % 2) throw DimensionError("downsample2x: odd mask size");
  Mask out(m.height / 2, m.width / 2, 0);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      const int s = m.at(2 * y, 2 * x) + m.at(2 * y, 2 * x + 1) +
                    m.at(2 * y + 1, 2 * x) + m.at(2 * y + 1, 2 * x + 1);
      out.at(y, x) = s >= 2 ? 1 : 0;
    }
  return out;
}

void save_mask(const Mask& m, const std::filesystem::path& path) {
  io::GrayImage img;
  img.height = m.height;
  img.width = m.width;
  img.bit_depth = 8;
  img.pixels.resize(m.values.size());
  for (size_t i = 0; i < m.values.size(); ++i) img.pixels[i] = m.values[i] ? 255 : 0;
  io::write_gray(path, img);
}

Mask load_mask(const std::filesystem::path& path) {
  const io::GrayImage img = io::read_gray(path);
  Mask m(img.height, img.width, 0);
  const double half = img.max_value() / 2.0;
  for (size_t i = 0; i < m.values.size(); ++i) m.values[i] = img.pixels[i] >= half ? 1 : 0;
  return m;
}

}  // namespace holo
