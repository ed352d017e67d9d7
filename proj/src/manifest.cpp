#include "gripdist/manifest.hpp"

#include <json.hpp>

#include "gripdist/raster.hpp"

namespace grip {

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void RunManifest::add_input(const std::filesystem::path &path) {
  input_digests[path.filename().string()] = fnv1a64_hex(read_file_bytes(path));
}

void RunManifest::write(const std::filesystem::path &path) const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["config"] = config;
  j["inputs"] = input_digests;
  write_file_atomic(path, j.dump(2) + "\n");
}

} // namespace grip
