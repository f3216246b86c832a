#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace posecal {

/// Binary silhouette raster, row-major, one byte per pixel (0 or 1).
struct SilhouetteMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  static SilhouetteMask zeros(int width, int height);

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool value = true) {
    bits[static_cast<std::size_t>(y) * width + x] = value ? 1 : 0;
  }
  std::size_t pixel_count() const { return bits.size(); }

  bool operator==(const SilhouetteMask&) const = default;
};

/// Reads a PBM mask (P1 ASCII or P4 packed); 1 bits are set pixels.
SilhouetteMask load_mask_pbm(const std::string& path);

/// Writes a PBM mask; P4 by default, P1 when ascii = true.
void save_mask_pbm(const SilhouetteMask& mask, const std::string& path,
                   bool ascii = false);

}  // namespace posecal
