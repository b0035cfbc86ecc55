#include "holo/field.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace holo {
namespace {

void put_u32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

}  // namespace

void save_hcf(const ComplexField& field, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write("HCF1", 4);
  put_u32(os, std::uint32_t(field.height));
  put_u32(os, std::uint32_t(field.width));
  std::vector<float> row(size_t(field.width) * 2);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) {
      const size_t i = size_t(y) * field.width + x;
      row[size_t(x) * 2] = static_cast<float>(field.re[i]);
      row[size_t(x) * 2 + 1] = static_cast<float>(field.im[i]);
    }
    os.write(reinterpret_cast<const char*>(row.data()),
             std::streamsize(row.size() * sizeof(float)));
  }
  if (!os) throw IoError("write failed: " + path.string());
}

ComplexField load_hcf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "HCF1", 4) != 0)
    throw IoError("not an HCF1 file: " + path.string());
  const std::uint32_t h = get_u32(is);
  const std::uint32_t w = get_u32(is);
  if (!is || h == 0 || w == 0 || h > (1u << 20) || w > (1u << 20))
    throw IoError("corrupt HCF1 header: " + path.string());
  ComplexField field{int(h), int(w)};
  std::vector<float> row(size_t(w) * 2);
  for (std::uint32_t y = 0; y < h; ++y) {
    is.read(reinterpret_cast<char*>(row.data()),
            std::streamsize(row.size() * sizeof(float)));
    if (!is) throw IoError("truncated HCF1 file: " + path.string());
    for (std::uint32_t x = 0; x < w; ++x) {
      const size_t i = size_t(y) * w + x;
      field.re[i] = row[size_t(x) * 2];
      field.im[i] = row[size_t(x) * 2 + 1];
    }
  }
  return field;
}

}  // namespace holo
