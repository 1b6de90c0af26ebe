#pragma once

// Strict sectioned key=value run configs.  Unknown keys, duplicate keys,
// and malformed lines are hard errors carrying the offending line number,
// so a config never silently drifts from the run it describes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itp/errors.hpp"

namespace itp::config {

class Config {
 public:
  // `#` and `;` start comment lines; sections are bracketed; values keep
  // interior whitespace after trimming the ends
  static Config parse_text(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has_section(const std::string& s) const;
  bool has(const std::string& s, const std::string& k) const;

  std::string require(const std::string& s, const std::string& k) const;
  std::optional<std::string> get(const std::string& s,
                                 const std::string& k) const;
  std::string get_str(const std::string& s, const std::string& k,
                      std::string fallback) const;
  double require_double(const std::string& s, const std::string& k) const;
  double get_double(const std::string& s, const std::string& k,
                    double fallback) const;
  int require_int(const std::string& s, const std::string& k) const;
  int get_int(const std::string& s, const std::string& k, int fallback) const;
  std::uint64_t get_u64(const std::string& s, const std::string& k,
                        std::uint64_t fallback) const;

  // line number of a key, for diagnostics about its value
  int line_of(const std::string& s, const std::string& k) const;

  // keys of a section in lexicographic order; does not mark them used
  std::vector<std::string> keys(const std::string& s) const;

  // every parsed key must have been consumed by an accessor
  void finish() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  const Entry* find(const std::string& s, const std::string& k) const;
  std::map<std::string, std::map<std::string, Entry>> data_;
};

// full-consumption numeric parses, anchored to the config line on failure
double to_double(const std::string& v, const std::string& what, int line);
int to_int(const std::string& v, const std::string& what, int line);
std::uint64_t to_u64(const std::string& v, const std::string& what, int line);

// whitespace-separated fields
std::vector<std::string> split_fields(const std::string& v);

}  // namespace itp::config
