#include "tileopt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tileopt/density.hpp"
#include "tileopt/errors.hpp"

namespace tileopt {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

const std::map<std::string, std::string>& Config::defaults() {
  static const std::map<std::string, std::string> table = {
      {"out", "out"},
      {"seed", ""},
      {"threads", "0"},
      {"kernel.family", "gaussian"},
      {"kernel.c", "1"},
      {"kernel.s", "0.5"},
      {"kernel.alpha", "1"},
      {"kernel.beta", "1"},
      {"kernel.radius", "1"},
      {"kernel.delta", "0"},
      {"kernel.samples", ""},
      {"kernel.step", "0.1"},
      {"lattice.kind", "integer"},
      {"lattice.dim", "2"},
      {"lattice.spacing", "1"},
      {"lattice.basis", ""},
      {"lattice.a", "1"},
      {"lattice.b", "0"},
      {"lattice.m", "1"},
      {"grid.n", "8"},
      {"grid.R", "1"},
      {"set.kind", "cell"},
      {"set.file", ""},
      {"set.exterior", "true"},
      {"solver.step_size", "0"},
      {"solver.max_iters", "5000"},
      {"solver.stop_tol", "1e-10"},
      {"solver.noise", "0.01"},
      {"solver.start", "uniform"},
      {"solver.oracle", "false"},
      {"search.m", "1"},
      {"search.grid_steps", "4"},
      {"search.refine_rounds", "1"},
      {"search.starts", "3"},
      {"sweep.rho2", "1"},
      {"sweep.rho3", "0.05:1.95:20"},
      {"sweep.phi2", "0.35:1.4:20"},
      {"sweep.phi3", "tied"},
      {"quad.coarse", "12"},
      {"quad.fine", "18"},
  };
  return table;
}

Config Config::from_text(std::string_view text) {
  Config c;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(number) + ": expected key=value");
    }
    c.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!defaults().contains(key)) throw ValidationError("unknown config key '" + key + "'");
  values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.contains(key); }

std::string Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const auto d = defaults().find(key);
  if (d == defaults().end()) throw ValidationError("unknown config key '" + key + "'");
  return d->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    const double x = parse_double(v);
    if (!std::isfinite(x)) throw ValidationError("");
    return x;
  } catch (const std::exception&) {
    throw ValidationError(key + " must be a finite number, got '" + v + "'");
  }
}

int Config::get_int(const std::string& key) const {
  const std::string v = get(key);
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValidationError(key + " must be an integer, got '" + v + "'");
  }
  return x;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(key + " must be true or false, got '" + v + "'");
}

std::optional<std::uint64_t> Config::get_seed() const {
  const std::string v = get("seed");
  if (v.empty()) return std::nullopt;
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValidationError("seed must be a nonnegative integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> parse_number_list(const std::string& what, const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const std::exception&) {
      throw ValidationError(what + " must be a comma-separated list of numbers");
    }
  }
  return out;
}

std::vector<double> Config::get_list(const std::string& key) const {
  return parse_number_list(key, get(key));
}

nlohmann::json Config::resolved() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : defaults()) j[key] = get(key);
  return j;
}

}  // namespace tileopt
