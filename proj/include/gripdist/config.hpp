#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gripdist/mixture.hpp"

namespace grip {

/// Flat `key = value` configuration file; `#` starts a comment.
class KeyValueConfig {
public:
  static KeyValueConfig parse_file(const std::filesystem::path &path);
  static KeyValueConfig parse_string(const std::string &text);

  bool has(const std::string &key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string> &values() const { return values_; }

  /// Throws invalid_argument naming the first key not in `allowed`.
  void require_known_keys(const std::vector<std::string> &allowed) const;

  std::string get_string(const std::string &key, const std::string &def) const;
  double get_double(const std::string &key, double def) const;
  uint32_t get_u32(const std::string &key, uint32_t def) const;
  int get_int(const std::string &key, int def) const;
  bool get_bool(const std::string &key, bool def) const;
  std::vector<std::string> get_list(const std::string &key,
                                    const std::string &def) const;

private:
  std::map<std::string, std::string> values_;
};

/// Parses "dry:0.4,wet:0.6"-style class layouts.
std::vector<std::pair<SurfaceState, double>>
parse_layout(const std::string &text);

} // namespace grip
