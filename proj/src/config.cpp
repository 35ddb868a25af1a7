#include "nlphase/config.hpp"

#include <fstream>
#include <istream>
#include <regex>

#include "nlphase/errors.hpp"
#include "nlphase/format.hpp"

namespace nlphase {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string::npos) return parse_double(t);
  const double num = parse_double(trim(t.substr(0, slash)));
  const double den = parse_double(trim(t.substr(slash + 1)));
  if (den == 0.0) throw InputError("zero denominator in '" + t + "'");
  return num / den;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw InputError("empty item in list '" + text + "'");
    out.push_back(parse_real(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Config Config::parse(std::istream& in, const std::string& source) {
  static const std::regex key_re(R"([A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)+)");
  Config cfg;
  cfg.source_ = source;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string at = source + ":" + std::to_string(line) + ": ";
    if (eq == std::string::npos) throw ConfigError(at + "expected `section.key = value`");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (!std::regex_match(key, key_re)) throw ConfigError(at + "malformed key '" + key + "'");
    if (value.empty()) throw ConfigError(at + "empty value for '" + key + "'");
    if (auto it = cfg.entries_.find(key); it != cfg.entries_.end())
      throw ConfigError(at + "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
    cfg.entries_[key] = {value, line};
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  return parse(in, path.string());
}

const Config::Entry& Config::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return it->second;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = entries_.find(key);
  if (it == entries_.end())
    entries_[key] = {value, 0};
  else
    it->second.value = value;
}

std::string Config::where(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end() || it->second.line == 0) return source_ + ": ";
  return source_ + ":" + std::to_string(it->second.line) + ": ";
}

std::string Config::get_string(const std::string& key) const { return entry(key).value; }

double Config::get_double(const std::string& key) const {
  const Entry& e = entry(key);
  try {
    return parse_real(e.value);
  } catch (const InputError& err) {
    throw ConfigError(where(key) + key + ": " + err.what());
  }
}

long long Config::get_integer(const std::string& key) const {
  const Entry& e = entry(key);
  try {
    return parse_integer(e.value);
  } catch (const InputError& err) {
    throw ConfigError(where(key) + key + ": " + err.what());
  }
}

std::vector<double> Config::get_list(const std::string& key) const {
  const Entry& e = entry(key);
  try {
    return parse_real_list(e.value);
  } catch (const InputError& err) {
    throw ConfigError(where(key) + key + ": " + err.what());
  }
}

}  // namespace nlphase
