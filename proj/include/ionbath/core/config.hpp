#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ionbath {

/// Line-oriented key=value configuration.
///
/// Blank lines and lines starting with '#' are ignored; trailing "# ..." comments
/// are stripped. Keys keep their insertion order so that echoing a config into a
/// run manifest is stable. Later assignments override earlier ones.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text, const std::string& source = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void merge(const KeyValueConfig& other);

  bool has(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::vector<std::string>& keys() const { return order_; }
  /// Serialises as key=value lines in insertion order.
  std::string to_string() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origin_;  // "file:line" for error messages
  std::vector<std::string> order_;
};

}  // namespace ionbath
