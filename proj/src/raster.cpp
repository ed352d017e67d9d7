#include "gripdist/raster.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace grip {

namespace {

constexpr char kMagic[4] = {'G', 'R', 'R', '1'};
constexpr size_t kHeaderSize = 16;

void put_u16le(std::string &out, uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}

void put_u32le(std::string &out, uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(char((v >> (8 * i)) & 0xff));
}

uint16_t get_u16le(const unsigned char *p) {
  return uint16_t(p[0] | (uint16_t(p[1]) << 8));
}

uint32_t get_u32le(const unsigned char *p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

std::string header_bytes(const Grr1Header &h) {
  std::string out;
  out.append(kMagic, 4);
  out.push_back(char(h.version));
  out.push_back(char(h.dtype));
  put_u16le(out, h.channels);
  put_u32le(out, h.height);
  put_u32le(out, h.width);
  return out;
}

Grr1Header parse_header(const std::string &bytes,
                        const std::filesystem::path &path) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::invalid_argument("GRR1: bad magic in " + path.string());
  const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
  Grr1Header h;
  h.version = p[4];
  h.dtype = p[5];
  h.channels = get_u16le(p + 6);
  h.height = get_u32le(p + 8);
  h.width = get_u32le(p + 12);
  if (h.version != 1)
    throw std::invalid_argument("GRR1: unsupported version in " + path.string());
  if (h.dtype != kGrr1DtypeF32 && h.dtype != kGrr1DtypeU8)
    throw std::invalid_argument("GRR1: unknown dtype in " + path.string());
  if (h.channels == 0 || h.height == 0 || h.width == 0)
    throw std::invalid_argument("GRR1: empty dimensions in " + path.string());
  return h;
}

size_t payload_elems(const Grr1Header &h) {
  return static_cast<size_t>(h.height) * h.width * h.channels;
}

template <typename T>
Raster<T> load_typed(const std::filesystem::path &path, uint8_t want_dtype) {
  const std::string bytes = read_file_bytes(path);
  const Grr1Header h = parse_header(bytes, path);
  if (h.dtype != want_dtype)
    throw std::invalid_argument("GRR1: unexpected dtype in " + path.string());
  const size_t n = payload_elems(h);
  if (bytes.size() != kHeaderSize + n * sizeof(T))
    throw std::invalid_argument("GRR1: truncated or oversized payload in " +
                                path.string());
  Raster<T> r(h.height, h.width, h.channels);
  static_assert(std::endian::native == std::endian::little,
                "payload serialization assumes a little-endian host");
  std::memcpy(r.data.data(), bytes.data() + kHeaderSize, n * sizeof(T));
  return r;
}

template <typename T>
void save_typed(const std::filesystem::path &path, const Raster<T> &r,
                uint8_t dtype) {
  if (r.height == 0 || r.width == 0 || r.channels == 0)
    throw std::invalid_argument("GRR1: refusing to write empty raster");
  if (r.data.size() != payload_elems(Grr1Header{1, dtype, r.channels, r.height,
                                                r.width}))
    throw std::invalid_argument("GRR1: raster buffer size mismatch");
  Grr1Header h;
  h.dtype = dtype;
  h.channels = r.channels;
  h.height = r.height;
  h.width = r.width;
  std::string out = header_bytes(h);
  const size_t nbytes = r.data.size() * sizeof(T);
  out.resize(kHeaderSize + nbytes);
  std::memcpy(out.data() + kHeaderSize, r.data.data(), nbytes);
  write_file_atomic(path, out);
}

} // namespace

Grr1Header peek_grr1_header(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open " + path.string());
  std::string head(kHeaderSize, '\0');
  in.read(head.data(), kHeaderSize);
  if (in.gcount() != std::streamsize(kHeaderSize))
    throw std::invalid_argument("GRR1: truncated header in " + path.string());
  return parse_header(head, path);
}

Raster<float> load_grr1_f32(const std::filesystem::path &path) {
  return load_typed<float>(path, kGrr1DtypeF32);
}

Raster<uint8_t> load_grr1_u8(const std::filesystem::path &path) {
  return load_typed<uint8_t>(path, kGrr1DtypeU8);
}

void save_grr1(const std::filesystem::path &path, const Raster<float> &r) {
  save_typed(path, r, kGrr1DtypeF32);
}

void save_grr1(const std::filesystem::path &path, const Raster<uint8_t> &r) {
  save_typed(path, r, kGrr1DtypeU8);
}

std::string read_file_bytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_atomic(const std::filesystem::path &path,
                       const std::string &bytes) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (dir.empty())
    dir = ".";
  fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out)
      throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

} // namespace grip
