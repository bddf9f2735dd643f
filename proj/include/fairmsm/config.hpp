#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairmsm/errors.hpp"

namespace fairmsm {

/// Flat `key = value` configuration with `[section]` headers. Keys may
/// repeat (lists) and may use dotted segments. Every entry must be consumed
/// by the command reading the config; leftovers are rejected as unknown keys.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  std::optional<std::string> get_optional(const std::string& section, const std::string& key) const;

  /// All values for a repeated key, in file order.
  std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

  /// Keys in `section` beginning with `prefix`, in file order, deduplicated.
  std::vector<std::string> keys_with_prefix(const std::string& section,
                                            const std::string& prefix) const;

  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_seed(const std::string& section, const std::string& key) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

  /// Comma-separated list value.
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_list_or(const std::string& section, const std::string& key) const;

  /// Throws config_error naming the first entry never read by any getter.
  void ensure_all_consumed() const;

  /// Shared-config variant: every entry in a strict section must have been
  /// consumed; entries elsewhere are tolerated as long as their section is a
  /// known one (they belong to other commands reading the same file).
  void ensure_consumed(const std::vector<std::string>& strict_sections,
                       const std::vector<std::string>& known_sections) const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string section, key, value;
    int line = 0;
    mutable bool consumed = false;
  };
  std::vector<Entry> entries_;
  std::string origin_;
};

std::vector<std::string> split_list(const std::string& value);

}  // namespace fairmsm
