#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace handpose {

/// Flat `name = value` settings as used by the config, dimensions and
/// camera sidecar files. Blank lines and `#` comments are skipped.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::istream& in, const std::string& source_name);
  static KeyValueFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, double value);

  /// Typed lookups; throw IoError naming the source and key on a malformed value.
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  double require_double(const std::string& key) const;

  const std::string& source() const { return source_; }

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::string source_ = "<memory>";
  std::map<std::string, std::string> values_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace handpose
