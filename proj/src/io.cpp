#include "wavelab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wavelab::io {

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::string CsvWriter::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw std::invalid_argument("csv row width mismatch");
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format(values[i]);
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& values) {
  if (values.size() != columns_.size())
    throw std::invalid_argument("csv row width mismatch");
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += values[i];
  }
  rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

TomlValue parse_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) throw std::invalid_argument("empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw std::invalid_argument("unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') throw std::invalid_argument("unterminated array");
    std::vector<double> arr;
    std::string inner = v.substr(1, v.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string it = trim(item);
      if (!it.empty()) arr.push_back(std::stod(it));
    }
    return arr;
  }
  return std::stod(v);
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
  TomlTable out;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("bad section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    out[full] = parse_value(line.substr(eq + 1));
  }
  return out;
}

TomlTable load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    TomlTable out;
    const nlohmann::json j = nlohmann::json::parse(text);
    std::function<void(const nlohmann::json&, const std::string&)> walk =
        [&](const nlohmann::json& node, const std::string& prefix) {
          for (auto it = node.begin(); it != node.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            if (it->is_object()) {
              walk(*it, key);
            } else if (it->is_string()) {
              out[key] = it->get<std::string>();
            } else if (it->is_boolean()) {
              out[key] = it->get<bool>();
            } else if (it->is_array()) {
              out[key] = it->get<std::vector<double>>();
            } else {
              out[key] = it->get<double>();
            }
          }
        };
    walk(j, "");
    return out;
  }
  return parse_toml(text);
}

double get_number(const TomlTable& t, const std::string& key, double fallback) {
  auto it = t.find(key);
  if (it == t.end()) return fallback;
  if (auto* d = std::get_if<double>(&it->second)) return *d;
  throw std::invalid_argument("config key " + key + " is not a number");
}

std::string get_string(const TomlTable& t, const std::string& key, const std::string& fallback) {
  auto it = t.find(key);
  if (it == t.end()) return fallback;
  if (auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw std::invalid_argument("config key " + key + " is not a string");
}

std::vector<double> get_array(const TomlTable& t, const std::string& key,
                              const std::vector<double>& fallback) {
  auto it = t.find(key);
  if (it == t.end()) return fallback;
  if (auto* a = std::get_if<std::vector<double>>(&it->second)) return *a;
  if (auto* d = std::get_if<double>(&it->second)) return {*d};
  throw std::invalid_argument("config key " + key + " is not an array");
}

std::string canonical_config(const TomlTable& t) {
  std::string out;
  for (const auto& [k, v] : t) {  // std::map iterates sorted
    out += k;
    out += '=';
    if (auto* s = std::get_if<std::string>(&v)) {
      out += '"';
      out += *s;
      out += '"';
    } else if (auto* b = std::get_if<bool>(&v)) {
      out += *b ? "true" : "false";
    } else if (auto* d = std::get_if<double>(&v)) {
      out += CsvWriter::format(*d);
    } else if (auto* a = std::get_if<std::vector<double>>(&v)) {
      out += '[';
      for (std::size_t i = 0; i < a->size(); ++i) {
        if (i) out += ',';
        out += CsvWriter::format((*a)[i]);
      }
      out += ']';
    }
    out += '\n';
  }
  return out;
}

}  // namespace wavelab::io
