#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nlphase {

// Flat `section.key = value` configuration. `#` starts a comment. Every value
// remembers the line it came from so errors can point at it.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;  // 0 for values set programmatically
  };

  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const Entry& entry(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  void set(const std::string& key, const std::string& value);

  // Typed access; parse failures raise ConfigError with the source line.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_integer(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  // "file:line: " prefix for messages about `key` (just "file: " if unknown).
  std::string where(const std::string& key) const;

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

// Reals accept plain decimals and `a/b` fractions (e.g. 1/1024).
double parse_real(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

}  // namespace nlphase
