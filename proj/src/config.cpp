#include "gripdist/config.hpp"

#include <algorithm>
#include <stdexcept>

#include "gripdist/raster.hpp"

namespace grip {

namespace {

std::string trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t");
  size_t e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path &path) {
  return parse_string(read_file_bytes(path));
}

KeyValueConfig KeyValueConfig::parse_string(const std::string &text) {
  KeyValueConfig cfg;
  std::string line;
  size_t lineno = 0;
  auto flush = [&] {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    const std::string t = trim(line);
    line.clear();
    if (t.empty())
      return;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value on line " +
                                  std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key on line " +
                                  std::to_string(lineno));
    if (cfg.values_.count(key))
      throw std::invalid_argument("config: duplicate key: " + key);
    cfg.values_[key] = value;
  };
  for (char ch : text) {
    if (ch == '\n')
      flush();
    else if (ch != '\r')
      line.push_back(ch);
  }
  if (!line.empty())
    flush();
  return cfg;
}

void KeyValueConfig::require_known_keys(
    const std::vector<std::string> &allowed) const {
  for (const auto &[key, value] : values_) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument("config: unknown key: " + key);
  }
}

std::string KeyValueConfig::get_string(const std::string &key,
                                       const std::string &def) const {
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double KeyValueConfig::get_double(const std::string &key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end())
    return def;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
      throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad numeric value for key: " + key);
  }
}

uint32_t KeyValueConfig::get_u32(const std::string &key, uint32_t def) const {
  const double v = get_double(key, double(def));
  if (v < 0 || v != double(uint32_t(v)))
    throw std::invalid_argument("config: expected non-negative integer for key: " + key);
  return uint32_t(v);
}

int KeyValueConfig::get_int(const std::string &key, int def) const {
  const double v = get_double(key, double(def));
  if (v != double(int(v)))
    throw std::invalid_argument("config: expected integer for key: " + key);
  return int(v);
}

bool KeyValueConfig::get_bool(const std::string &key, bool def) const {
  auto it = values_.find(key);
  if (it == values_.end())
    return def;
  if (it->second == "true" || it->second == "1")
    return true;
  if (it->second == "false" || it->second == "0")
    return false;
  throw std::invalid_argument("config: expected true/false for key: " + key);
}

std::vector<std::string> KeyValueConfig::get_list(const std::string &key,
                                                  const std::string &def) const {
  const std::string text = get_string(key, def);
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      if (!trim(cur).empty())
        out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty())
    out.push_back(trim(cur));
  return out;
}

std::vector<std::pair<SurfaceState, double>>
parse_layout(const std::string &text) {
  std::vector<std::pair<SurfaceState, double>> layout;
  std::string cur;
  auto flush = [&] {
    const std::string t = trim(cur);
    cur.clear();
    if (t.empty())
      return;
    const size_t colon = t.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("layout: expected state:fraction, got: " + t);
    const SurfaceState s = surface_state_from_string(trim(t.substr(0, colon)));
    double frac;
    try {
      frac = std::stod(t.substr(colon + 1));
    } catch (...) {
      throw std::invalid_argument("layout: bad fraction in: " + t);
    }
    layout.emplace_back(s, frac);
  };
  for (char ch : text) {
    if (ch == ',')
      flush();
    else
      cur.push_back(ch);
  }
  flush();
  if (layout.empty())
    throw std::invalid_argument("layout: empty");
  return layout;
}

} // namespace grip
