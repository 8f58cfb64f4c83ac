#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileopt/config.hpp"
#include "tileopt/kernel.hpp"
#include "tileopt/lattice.hpp"
#include "tileopt/polygon2d.hpp"

namespace tileopt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

enum class Command { check, perimeter, optimize, search, hexagon_sweep };

Command parse_command(const std::string& name);
std::string to_string(Command c);

struct RunConfig {
  Command command = Command::check;
  Config config;
};

// `<command> [--config file] [--key value | --key=value ...]`
RunConfig parse_arguments(const std::vector<std::string>& args);

Kernel kernel_from_config(const Config& c, int dim);
Lattice lattice_from_config(const Config& c);
SweepSpec sweep_from_config(const Config& c);
// "lo:hi:count" or a single value.
SweepAxis parse_sweep_axis(const std::string& key, const std::string& text);

// Runs the command, writes <out>/report.json and the command's CSV files,
// and returns the result document (without the timing field).
nlohmann::json run(const RunConfig& rc, std::ostream& log);

// Full CLI entry point: maps validation errors to exit 2 and numeric
// failures to exit 3.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tileopt
