#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace grip {

uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

/// Reproducibility record written alongside every CLI output: re-running the
/// subcommand with inputs matching the digests and the same configuration and
/// seed reproduces the outputs byte for byte.
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_digests;
  uint64_t seed = 0;

  void add_input(const std::filesystem::path &path);
  void write(const std::filesystem::path &path) const;
};

} // namespace grip
