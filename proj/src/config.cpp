#include "itp/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace itp::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& msg, int line) {
  std::ostringstream os;
  os << "config line " << line << ": " << msg;
  throw ConfigError(os.str(), line);
}

}  // namespace

Config Config::parse_text(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail("unterminated section header", line);
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) fail("empty section name", line);
      if (c.data_.count(name)) fail("duplicate section [" + name + "]", line);
      c.data_[name];
      section = name;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail("empty key", line);
    if (section.empty()) fail("key '" + key + "' outside any section", line);
    auto& sec = c.data_[section];
    if (sec.count(key))
      fail("duplicate key '" + key + "' in [" + section + "]", line);
    sec[key] = Entry{value, line, false};
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

const Config::Entry* Config::find(const std::string& s,
                                  const std::string& k) const {
  auto si = data_.find(s);
  if (si == data_.end()) return nullptr;
  auto ki = si->second.find(k);
  if (ki == si->second.end()) return nullptr;
  ki->second.used = true;
  return &ki->second;
}

bool Config::has_section(const std::string& s) const {
  return data_.count(s) > 0;
}

bool Config::has(const std::string& s, const std::string& k) const {
  auto si = data_.find(s);
  return si != data_.end() && si->second.count(k) > 0;
}

std::string Config::require(const std::string& s, const std::string& k) const {
  const Entry* e = find(s, k);
  if (!e) throw ConfigError("missing required key '" + k + "' in [" + s + "]", 0);
  return e->value;
}

std::optional<std::string> Config::get(const std::string& s,
                                       const std::string& k) const {
  const Entry* e = find(s, k);
  if (!e) return std::nullopt;
  return e->value;
}

std::string Config::get_str(const std::string& s, const std::string& k,
                            std::string fallback) const {
  const Entry* e = find(s, k);
  return e ? e->value : std::move(fallback);
}

double Config::require_double(const std::string& s,
                              const std::string& k) const {
  return to_double(require(s, k), s + "." + k, line_of(s, k));
}

double Config::get_double(const std::string& s, const std::string& k,
                          double fallback) const {
  const Entry* e = find(s, k);
  return e ? to_double(e->value, s + "." + k, e->line) : fallback;
}

int Config::require_int(const std::string& s, const std::string& k) const {
  return to_int(require(s, k), s + "." + k, line_of(s, k));
}

int Config::get_int(const std::string& s, const std::string& k,
                    int fallback) const {
  const Entry* e = find(s, k);
  return e ? to_int(e->value, s + "." + k, e->line) : fallback;
}

std::uint64_t Config::get_u64(const std::string& s, const std::string& k,
                              std::uint64_t fallback) const {
  const Entry* e = find(s, k);
  return e ? to_u64(e->value, s + "." + k, e->line) : fallback;
}

int Config::line_of(const std::string& s, const std::string& k) const {
  auto si = data_.find(s);
  if (si == data_.end()) return 0;
  auto ki = si->second.find(k);
  return ki == si->second.end() ? 0 : ki->second.line;
}

std::vector<std::string> Config::keys(const std::string& s) const {
  std::vector<std::string> out;
  auto si = data_.find(s);
  if (si == data_.end()) return out;
  out.reserve(si->second.size());
  for (const auto& [k, e] : si->second) out.push_back(k);
  return out;
}

void Config::finish() const {
  for (const auto& [sec, keys] : data_)
    for (const auto& [key, e] : keys)
      if (!e.used)
        throw ConfigError(
            "unknown key '" + key + "' in [" + sec + "]", e.line);
}

double to_double(const std::string& v, const std::string& what, int line) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("value of " + what + " is not a number: '" + v + "'",
                      line);
  return x;
}

int to_int(const std::string& v, const std::string& what, int line) {
  errno = 0;
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE ||
      x < INT32_MIN || x > INT32_MAX)
    throw ConfigError("value of " + what + " is not an integer: '" + v + "'",
                      line);
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& v, const std::string& what,
                     int line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() ||
      errno == ERANGE)
    throw ConfigError(
        "value of " + what + " is not an unsigned integer: '" + v + "'",
        line);
  return static_cast<std::uint64_t>(x);
}

std::vector<std::string> split_fields(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace itp::config
