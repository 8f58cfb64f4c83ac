#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "tileopt/kernel.hpp"
#include "tileopt/lattice.hpp"
#include "tileopt/optimizer.hpp"

namespace tileopt {

struct SearchParams {
  double m = 1.0;
  int grid_steps = 4;
  int refine_rounds = 1;
  int starts = 3;
  int samples_per_axis = 8;
  int window_hops = 1;
  double floor_factor = 1e-3;  // min_distance floor, in units of sqrt(m)
  SolverParams solver;

  nlohmann::json to_json() const;
};

struct LandscapeRow {
  ModuliPoint2D point;
  double covolume = 0.0;
  double j_best = 0.0;
  double per_k = 0.0;      // m ||K||_1 - J with the grid's quadrature of ||K||_1
  double kernel_l1 = 0.0;  // that quadrature
  double binarity = 0.0;
  bool converged = false;
  bool refined = false;    // produced by the local refinement
};

struct SearchResult {
  Lattice best_lattice;
  ModuliPoint2D best_point;
  OptimizationReport best_report;
  std::vector<LandscapeRow> landscape;
  std::vector<double> incumbent_trace;  // incumbent Per_K after each evaluation
  double nondegeneracy = 0.0;           // min over visited lattices of min_distance
  bool nondegenerate = false;

  nlohmann::json to_json() const;
};

struct PointEvaluation {
  LandscapeRow row;
  OptimizationReport report;
};

// Multi-start inner solve at one moduli point.
PointEvaluation evaluate_moduli_point(const ModuliPoint2D& p, const Kernel& k,
                                      const SearchParams& params);

SearchResult search_lattices(const Kernel& k, const SearchParams& params);

// True iff min J > 0 and every lattice has min_distance >= floor.
// Throws ValidationError "no samples" on empty input.
bool nondegeneracy_check(const std::vector<Lattice>& visited, const std::vector<double>& j_values,
                         double floor);

void write_landscape_csv(std::ostream& out, const std::vector<LandscapeRow>& rows);

}  // namespace tileopt
