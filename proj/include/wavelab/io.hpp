#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace wavelab::io {

// Deterministic CSV writer: fixed scientific formatting so identical runs
// produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  void add_row_mixed(const std::vector<std::string>& values);
  std::string str() const;
  void write(const std::string& path) const;
  static std::string format(double v);

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

// FNV-1a over the canonical text; stamped into every artifact.
std::uint64_t fnv1a(const std::string& text);
std::string hash_hex(const std::string& text);

// Flat TOML subset: [section] headers, key = value with strings, numbers,
// booleans and one-line arrays of numbers. Keys are "section.key".
using TomlValue = std::variant<std::string, double, bool, std::vector<double>>;
using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(const std::string& text);
TomlTable load_config(const std::string& path);  // .toml or .json by extension

double get_number(const TomlTable& t, const std::string& key, double fallback);
std::string get_string(const TomlTable& t, const std::string& key, const std::string& fallback);
std::vector<double> get_array(const TomlTable& t, const std::string& key,
                              const std::vector<double>& fallback);

// Canonical text form of a config (sorted keys), used for the config hash.
std::string canonical_config(const TomlTable& t);

}  // namespace wavelab::io
