#include "fairmsm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fairmsm {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string item =
        trim(comma == std::string::npos ? value.substr(start) : value.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty() || t[0] == ';') continue;
    if (t.front() == '[') {
      require(t.back() == ']', errc::config_error,
              origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      require(!section.empty(), errc::config_error,
              origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    std::size_t eq = t.find('=');
    require(eq != std::string::npos, errc::config_error,
            origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    require(!key.empty(), errc::config_error,
            origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.entries_.push_back({section, key, value, lineno});
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  for (const auto& e : entries_)
    if (e.section == section && e.key == key) return true;
  return false;
}

std::optional<std::string> Config::get_optional(const std::string& section,
                                                const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& e : entries_) {
    if (e.section == section && e.key == key) {
      e.consumed = true;
      out = e.value;  // last occurrence wins for scalar keys
    }
  }
  return out;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  auto v = get_optional(section, key);
  require(v.has_value(), errc::config_error,
          origin_ + ": missing required key '" + key + "' in section [" + section + "]");
  return *v;
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return get_optional(section, key).value_or(fallback);
}

std::vector<std::string> Config::get_all(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.section == section && e.key == key) {
      e.consumed = true;
      out.push_back(e.value);
    }
  }
  return out;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& section,
                                                  const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.section != section || e.key.rfind(prefix, 0) != 0) continue;
    bool dup = false;
    for (const auto& k : out) dup = dup || k == e.key;
    if (!dup) out.push_back(e.key);
  }
  return out;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  std::string v = get(section, key);
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    require(pos == v.size(), errc::config_error, "");
    return d;
  } catch (...) {
    fail(errc::config_error,
         origin_ + ": key '" + key + "' in [" + section + "] is not a number: " + v);
  }
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  std::string v = get(section, key);
  try {
    std::size_t pos = 0;
    int i = std::stoi(v, &pos);
    require(pos == v.size(), errc::config_error, "");
    return i;
  } catch (...) {
    fail(errc::config_error,
         origin_ + ": key '" + key + "' in [" + section + "] is not an integer: " + v);
  }
}

int Config::get_int_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t Config::get_seed(const std::string& section, const std::string& key) const {
  std::string v = get(section, key);
  try {
    std::size_t pos = 0;
    unsigned long long s = std::stoull(v, &pos);
    require(pos == v.size(), errc::config_error, "");
    return static_cast<std::uint64_t>(s);
  } catch (...) {
    fail(errc::config_error,
         origin_ + ": key '" + key + "' in [" + section + "] is not a valid seed: " + v);
  }
}

bool Config::get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
  auto v = get_optional(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail(errc::config_error,
       origin_ + ": key '" + key + "' in [" + section + "] is not a boolean: " + *v);
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key) const {
  return split_list(get(section, key));
}

std::vector<std::string> Config::get_list_or(const std::string& section,
                                             const std::string& key) const {
  auto v = get_optional(section, key);
  return v ? split_list(*v) : std::vector<std::string>{};
}

void Config::ensure_all_consumed() const {
  for (const auto& e : entries_) {
    require(e.consumed, errc::config_error,
            origin_ + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "' in section [" +
                e.section + "]");
  }
}

void Config::ensure_consumed(const std::vector<std::string>& strict_sections,
                             const std::vector<std::string>& known_sections) const {
  auto contains = [](const std::vector<std::string>& v, const std::string& s) {
    for (const auto& x : v)
      if (x == s) return true;
    return false;
  };
  for (const auto& e : entries_) {
    if (contains(strict_sections, e.section)) {
      require(e.consumed, errc::config_error,
              origin_ + ":" + std::to_string(e.line) + ": unknown key '" + e.key +
                  "' in section [" + e.section + "]");
    } else {
      require(contains(known_sections, e.section), errc::config_error,
              origin_ + ":" + std::to_string(e.line) + ": unknown section [" + e.section + "]");
    }
  }
}

}  // namespace fairmsm
