#include "handpose/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "handpose/error.hpp"

namespace handpose {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source_name) {
  KeyValueFile kv;
  kv.source_ = source_name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError(source_name + ":" + std::to_string(line_no) + ": expected 'name = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw IoError(source_name + ":" + std::to_string(line_no) + ": empty key");
    }
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return parse(in, path.string());
}

void KeyValueFile::set(const std::string& key, double value) { values_[key] = format_double(value); }

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& text = it->second;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError(source_ + ": field '" + key + "': not a number: '" + text + "'");
  }
  return value;
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& text = it->second;
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError(source_ + ": field '" + key + "': not an integer: '" + text + "'");
  }
  return value;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw IoError(source_ + ": field '" + key + "': not a boolean: '" + v + "'");
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::require_double(const std::string& key) const {
  if (!contains(key)) throw IoError(source_ + ": missing field '" + key + "'");
  return get_double(key, 0.0);
}

void KeyValueFile::write(std::ostream& out) const {
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

void KeyValueFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  write(out);
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace handpose
