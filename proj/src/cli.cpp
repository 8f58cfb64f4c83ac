#include "tileopt/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tileopt/density.hpp"
#include "tileopt/energy.hpp"
#include "tileopt/errors.hpp"
#include "tileopt/optimizer.hpp"
#include "tileopt/parallel.hpp"
#include "tileopt/search.hpp"

namespace tileopt {

namespace {

const char* const kUsage =
    "usage: tileopt check|perimeter|optimize|search|hexagon-sweep [--config <file>] "
    "[--key value ...]";

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericError("non-finite " + what);
}

std::filesystem::path output_dir(const Config& c) {
  std::filesystem::path dir(c.get("out"));
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

GridSpec grid_from_config(const Config& c) {
  return GridSpec(lattice_from_config(c), c.get_int("grid.n"), c.get_int("grid.R"));
}

SolverParams solver_from_config(const Config& c) {
  SolverParams p;
  p.step_size = c.get_double("solver.step_size");
  p.max_iters = c.get_int("solver.max_iters");
  p.stop_tol = c.get_double("solver.stop_tol");
  p.start_noise = c.get_double("solver.noise");
  p.seed = c.get_seed();
  return p;
}

QuadratureParams quad_from_config(const Config& c) {
  return QuadratureParams{c.get_int("quad.coarse"), c.get_int("quad.fine")};
}

nlohmann::json assumptions_json(const Kernel& k) {
  const AssumptionReport a = check_assumptions(k);
  return {{"satisfies_frac", a.satisfies_frac},
          {"integrable", a.integrable},
          {"strict_clause", to_string(a.strict_clause)},
          {"strictly_decreasing", a.strictly_decreasing},
          {"satisfies_int", a.satisfies_int()},
          {"message", a.message}};
}

nlohmann::json run_check(const Config& c, std::ostream& log) {
  const Lattice lattice = lattice_from_config(c);
  const Kernel k = kernel_from_config(c, lattice.dim());
  const AssumptionReport a = check_assumptions(k);
  log << "kernel: " << to_string(k.family()) << '\n'
      << "satisfies_frac: " << (a.satisfies_frac ? "true" : "false") << '\n'
      << "integrable: " << (a.integrable ? "true" : "false") << '\n'
      << "strict_clause: " << to_string(a.strict_clause) << '\n'
      << "strictly_decreasing: " << (a.strictly_decreasing ? "true" : "false") << '\n'
      << "satisfies_int: " << (a.satisfies_int() ? "true" : "false") << '\n';
  if (!a.message.empty()) log << "note: " << a.message << '\n';
  nlohmann::json result = {{"kernel", k.to_json()},
                           {"assumptions", assumptions_json(k)},
                           {"lattice", to_json(lattice)},
                           {"covolume", lattice.covolume()},
                           {"min_distance", min_distance(lattice)}};
  if (k.integrable()) result["kernel_l1"] = k.l1_norm();
  return result;
}

DensityField set_from_config(const Config& c, const GridSpec& spec) {
  const std::string kind = c.get("set.kind");
  if (kind == "cell") return indicator_of_cell(spec);
  if (kind == "voronoi") return voronoi_indicator(spec);
  if (kind == "file") {
    std::ifstream in(c.get("set.file"));
    if (!in) throw ValidationError("cannot read set.file '" + c.get("set.file") + "'");
    return read_density_csv(in);
  }
  throw ValidationError("set.kind must be cell, voronoi or file, got '" + kind + "'");
}

nlohmann::json run_perimeter(const Config& c, std::ostream& log) {
  const GridSpec spec = grid_from_config(c);
  const Kernel k = kernel_from_config(c, spec.dim());
  const DensityField set = set_from_config(c, spec);
  const SetPerimeter per = per_k_set(set, k, c.get_bool("set.exterior"));
  require_finite(per.value, "perimeter");
  nlohmann::json result = {{"grid", spec.to_json()},
                           {"kernel", k.to_json()},
                           {"mass", set.mass()},
                           {"per_k", per.to_json()},
                           {"value", per.value}};
  if (k.integrable()) {
    const EnergyBreakdown e = p_energy(set, k);
    require_finite(e.p_value, "relaxed perimeter");
    result["energy"] = e.to_json();
  }
  std::ostringstream csv;
  write_density_csv(csv, set);
  write_text(output_dir(c) / "density.csv", csv.str());
  log << "per_k: " << format_double(per.value) << '\n';
  return result;
}

nlohmann::json run_optimize(const Config& c, std::ostream& log) {
  const SolverParams params = solver_from_config(c);
  if (!params.seed) throw ValidationError("optimize needs a seed (set seed=<integer>)");
  const GridSpec spec = grid_from_config(c);
  const Kernel k = kernel_from_config(c, spec.dim());
  const std::string start = c.get("solver.start");
  const DensityField f0 = start == "uniform" ? initial_field(spec, *params.seed, params.start_noise)
                          : start == "cell"  ? indicator_of_cell(spec)
                          : start == "voronoi"
                              ? voronoi_indicator(spec)
                              : throw ValidationError("solver.start must be uniform, cell or voronoi");
  const InteractionOperator op(spec, k);
  const OptimizationReport report = ascend(f0, op, params);
  require_finite(report.j_trace.back(), "energy");
  const EnergyBreakdown energy = p_energy(report.final, op);
  const DensityField binary = threshold(report.final);
  const double j_threshold = j_energy(binary, op);
  nlohmann::json result = {{"grid", spec.to_json()},
                           {"kernel", k.to_json()},
                           {"assumptions", assumptions_json(k)},
                           {"stability_bound", stability_bound(op)},
                           {"report", report.to_json()},
                           {"energy", energy.to_json()},
                           {"thresholded_j", j_threshold},
                           {"thresholded_per_k", spec.lattice().covolume() * op.discrete_l1() - j_threshold}};
  if (c.get_bool("solver.oracle")) {
    const OracleResult oracle = exhaustive_binary_oracle(spec, k);
    result["oracle"] = {{"j_value", oracle.j_value}, {"candidates", oracle.candidates}};
  }
  std::ostringstream csv;
  write_density_csv(csv, report.final);
  write_text(output_dir(c) / "density.csv", csv.str());
  log << "j: " << format_double(report.j_trace.back()) << "  iterations: " << report.iterations
      << "  converged: " << (report.converged ? "true" : "false") << '\n';
  for (const auto& flag : report.flags) log << "flag: " << flag << '\n';
  return result;
}

nlohmann::json run_search(const Config& c, std::ostream& log) {
  SearchParams params;
  params.solver = solver_from_config(c);
  if (!params.solver.seed) throw ValidationError("search needs a seed (set seed=<integer>)");
  params.m = c.get_double("search.m");
  params.grid_steps = c.get_int("search.grid_steps");
  params.refine_rounds = c.get_int("search.refine_rounds");
  params.starts = c.get_int("search.starts");
  params.samples_per_axis = c.get_int("grid.n");
  params.window_hops = c.get_int("grid.R");
  const Kernel k = kernel_from_config(c, 2);
  const SearchResult s = search_lattices(k, params);
  std::ostringstream csv;
  write_landscape_csv(csv, s.landscape);
  write_text(output_dir(c) / "landscape.csv", csv.str());
  log << "best: a=" << format_double(s.best_point.a) << " b=" << format_double(s.best_point.b)
      << "  per_k=" << format_double(s.incumbent_trace.back()) << '\n';
  return {{"kernel", k.to_json()}, {"params", params.to_json()}, {"search", s.to_json()}};
}

nlohmann::json run_sweep(const Config& c, std::ostream& log) {
  const Kernel k = kernel_from_config(c, 2);
  const SweepSpec grid = sweep_from_config(c);
  const QuadratureParams quad = quad_from_config(c);
  const SweepResult sweep = hexagon_sweep(k, grid, quad);
  const SweepRow& best = sweep.rows[sweep.argmin];
  const SweepRow& reg = sweep.rows[sweep.regular_index];
  const SweepRow& sq = sweep.rows[sweep.square_index];
  std::ostringstream csv;
  write_sweep_csv(csv, sweep);
  write_text(output_dir(c) / "sweep.csv", csv.str());
  auto shape = [](const HexShape& h) {
    return nlohmann::json{{"rho2", h.rho2}, {"rho3", h.rho3}, {"phi2", h.phi2}, {"phi3", h.phi3}};
  };
  log << "regular: " << format_double(reg.per_k) << "  square: " << format_double(sq.per_k)
      << "  argmin regular: " << (sweep.argmin == sweep.regular_index ? "true" : "false") << '\n';
  return {{"kernel", k.to_json()},
          {"quadrature", quad.to_json()},
          {"samples", sweep.rows.size()},
          {"skipped", sweep.skipped},
          {"argmin", {{"shape", shape(best.shape)}, {"per_k", best.per_k}, {"error", best.error}}},
          {"regular_hexagon", {{"per_k", reg.per_k}, {"error", reg.error}}},
          {"square", {{"per_k", sq.per_k}, {"error", sq.error}}},
          {"argmin_is_regular", sweep.argmin == sweep.regular_index}};
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "check") return Command::check;
  if (name == "perimeter") return Command::perimeter;
  if (name == "optimize") return Command::optimize;
  if (name == "search") return Command::search;
  if (name == "hexagon-sweep") return Command::hexagon_sweep;
  throw ValidationError("unknown command '" + name + "'; " + kUsage);
}

std::string to_string(Command c) {
  switch (c) {
    case Command::check: return "check";
    case Command::perimeter: return "perimeter";
    case Command::optimize: return "optimize";
    case Command::search: return "search";
    case Command::hexagon_sweep: return "hexagon-sweep";
  }
  return "?";
}

RunConfig parse_arguments(const std::vector<std::string>& args) {
  if (args.empty()) throw ValidationError(kUsage);
  RunConfig rc;
  rc.command = parse_command(args[0]);
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) throw ValidationError("unexpected argument '" + a + "'");
    std::string key = a.substr(2);
    std::string value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size()) throw ValidationError("missing value for --" + key);
      value = args[++i];
    }
    if (key == "config") {
      config_path = value;
    } else {
      overrides.emplace_back(key, value);
    }
  }
  if (!config_path.empty()) rc.config = Config::from_file(config_path);
  for (const auto& [k, v] : overrides) rc.config.set(k, v);
  return rc;
}

Kernel kernel_from_config(const Config& c, int dim) {
  const std::string family = c.get("kernel.family");
  if (family == "fractional") {
    Kernel k = Kernel::fractional(c.get_double("kernel.c"), c.get_double("kernel.s"), dim);
    const double delta = c.get_double("kernel.delta");
    return delta > 0.0 ? regularize_fractional(k, delta) : k;
  }
  if (family == "gaussian") return Kernel::gaussian(c.get_double("kernel.alpha"), dim);
  if (family == "exponential") return Kernel::exponential(c.get_double("kernel.beta"), dim);
  if (family == "indicator") return Kernel::indicator(c.get_double("kernel.radius"), dim);
  if (family == "table") {
    return Kernel::table(c.get_list("kernel.samples"), c.get_double("kernel.step"), dim);
  }
  throw ValidationError("unknown kernel family '" + family +
                        "'; use fractional, gaussian, exponential, indicator or table");
}

Lattice lattice_from_config(const Config& c) {
  const std::string kind = c.get("lattice.kind");
  if (kind == "integer") {
    const int dim = c.get_int("lattice.dim");
    if (dim < 1 || dim > 3) throw ValidationError("lattice.dim must be 1, 2 or 3");
    return Lattice::integer(dim).scaled(c.get_double("lattice.spacing"));
  }
  if (kind == "hexagonal") return Lattice::hexagonal(c.get_double("lattice.spacing"));
  if (kind == "moduli") {
    const ModuliPoint2D p{c.get_double("lattice.a"), c.get_double("lattice.b"),
                          c.get_double("lattice.m")};
    if (!(p.m > 0.0) || !(p.a > 0.0)) throw ValidationError("lattice.a and lattice.m must be positive");
    return p.lattice();
  }
  if (kind == "basis") {
    // Columns separated by ';', entries by ','.
    std::vector<std::vector<double>> cols;
    std::istringstream in(c.get("lattice.basis"));
    std::string col;
    while (std::getline(in, col, ';')) cols.push_back(parse_number_list("lattice.basis", col));
    const int dim = static_cast<int>(cols.size());
    if (dim < 1 || dim > 3) throw ValidationError("lattice.basis needs 1 to 3 columns");
    Matrix b(dim, dim);
    for (int j = 0; j < dim; ++j) {
      if (static_cast<int>(cols[static_cast<std::size_t>(j)].size()) != dim) {
        throw ValidationError("lattice.basis columns must have " + std::to_string(dim) + " entries");
      }
      for (int i = 0; i < dim; ++i) b(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    return Lattice(b);
  }
  throw ValidationError("lattice.kind must be integer, hexagonal, moduli or basis, got '" + kind + "'");
}

SweepAxis parse_sweep_axis(const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 1) {
      const double v = parse_double(parts[0]);
      return SweepAxis{v, v, 1};
    }
    if (parts.size() == 3) {
      const int count = static_cast<int>(parse_double(parts[2]));
      if (count < 1 || static_cast<double>(count) != parse_double(parts[2])) throw ValidationError("");
      return SweepAxis{parse_double(parts[0]), parse_double(parts[1]), count};
    }
  } catch (const ValidationError&) {
  }
  throw ValidationError(key + " must be a number or lo:hi:count, got '" + text + "'");
}

SweepSpec sweep_from_config(const Config& c) {
  SweepSpec s;
  s.rho2 = parse_sweep_axis("sweep.rho2", c.get("sweep.rho2"));
  s.rho3 = parse_sweep_axis("sweep.rho3", c.get("sweep.rho3"));
  s.phi2 = parse_sweep_axis("sweep.phi2", c.get("sweep.phi2"));
  s.tie_phi3 = c.get("sweep.phi3") == "tied";
  if (!s.tie_phi3) s.phi3 = parse_sweep_axis("sweep.phi3", c.get("sweep.phi3"));
  return s;
}

nlohmann::json run(const RunConfig& rc, std::ostream& log) {
  const Config& c = rc.config;
  set_thread_count(c.get_int("threads"));
  // Validate shared keys before any computation.
  c.get_seed();
  nlohmann::json result;
  switch (rc.command) {
    case Command::check: result = run_check(c, log); break;
    case Command::perimeter: result = run_perimeter(c, log); break;
    case Command::optimize: result = run_optimize(c, log); break;
    case Command::search: result = run_search(c, log); break;
    case Command::hexagon_sweep: result = run_sweep(c, log); break;
  }
  return {{"command", to_string(rc.command)}, {"config", c.resolved()}, {"result", result}};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig rc = parse_arguments(args);
    const auto start = std::chrono::steady_clock::now();
    nlohmann::json report = run(rc, out);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report["timing"] = {{"wall_seconds", elapsed.count()}};
    const auto path = output_dir(rc.config) / "report.json";
    write_text(path, report.dump(2) + "\n");
    out << "report: " << path.string() << '\n';
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace tileopt
