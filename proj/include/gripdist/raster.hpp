#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace grip {

/// Row-major height x width x channels image buffer.
template <typename T> struct Raster {
  uint32_t height = 0;
  uint32_t width = 0;
  uint16_t channels = 1;
  std::vector<T> data;

  Raster() = default;
  Raster(uint32_t h, uint32_t w, uint16_t c)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, T{}) {}

  size_t index(uint32_t r, uint32_t c, uint16_t ch = 0) const {
    return (static_cast<size_t>(r) * width + c) * channels + ch;
  }
  T &at(uint32_t r, uint32_t c, uint16_t ch = 0) { return data[index(r, c, ch)]; }
  const T &at(uint32_t r, uint32_t c, uint16_t ch = 0) const {
    return data[index(r, c, ch)];
  }
  size_t pixel_count() const { return static_cast<size_t>(height) * width; }
};

// GRR1 container: magic "GRR1", version u8, dtype u8 (1=f32, 2=u8),
// channels u16 LE, height u32 LE, width u32 LE, then row-major payload LE.
inline constexpr uint8_t kGrr1DtypeF32 = 1;
inline constexpr uint8_t kGrr1DtypeU8 = 2;

struct Grr1Header {
  uint8_t version = 1;
  uint8_t dtype = kGrr1DtypeF32;
  uint16_t channels = 1;
  uint32_t height = 0;
  uint32_t width = 0;
};

Grr1Header peek_grr1_header(const std::filesystem::path &path);

Raster<float> load_grr1_f32(const std::filesystem::path &path);
Raster<uint8_t> load_grr1_u8(const std::filesystem::path &path);

void save_grr1(const std::filesystem::path &path, const Raster<float> &r);
void save_grr1(const std::filesystem::path &path, const Raster<uint8_t> &r);

/// Writes through a temp file in the same directory, then renames, so a
/// failed run never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path &path,
                       const std::string &bytes);

std::string read_file_bytes(const std::filesystem::path &path);

} // namespace grip
