#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tileopt {

// Comma-separated numbers; `what` names the value in error messages.
std::vector<double> parse_number_list(const std::string& what, const std::string& text);

// Flat key=value configuration with dotted keys (kernel.family, grid.n, ...).
// Blank lines and lines starting with '#' are ignored. Every key must be one
// of the known keys; unset keys resolve to their defaults.
class Config {
 public:
  Config() = default;

  static Config from_text(std::string_view text);
  static Config from_file(const std::string& path);

  // Throws ValidationError for unknown keys.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;  // explicitly set

  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::optional<std::uint64_t> get_seed() const;
  std::vector<double> get_list(const std::string& key) const;

  // Every known key with its resolved value, sorted by key.
  nlohmann::json resolved() const;

  static const std::map<std::string, std::string>& defaults();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace tileopt
