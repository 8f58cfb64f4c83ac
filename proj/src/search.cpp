#include "tileopt/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "tileopt/density.hpp"
#include "tileopt/energy.hpp"
#include "tileopt/errors.hpp"

namespace tileopt {

namespace {

constexpr std::uint64_t kStartStride = 0x9E3779B97F4A7C15ULL;

ModuliPoint2D from_shear(double beta, double a, double m) { return {a, beta * a, m}; }

}  // namespace

nlohmann::json SearchParams::to_json() const {
  return {{"m", m},
          {"grid_steps", grid_steps},
          {"refine_rounds", refine_rounds},
          {"starts", starts},
          {"samples_per_axis", samples_per_axis},
          {"window_hops", window_hops},
          {"floor_factor", floor_factor},
          {"solver", solver.to_json()}};
}

nlohmann::json SearchResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : landscape) {
    rows.push_back({{"a", r.point.a},
                    {"b", r.point.b},
                    {"covolume", r.covolume},
                    {"j_best", r.j_best},
                    {"per_k", r.per_k},
                    {"binarity", r.binarity},
                    {"converged", r.converged},
                    {"refined", r.refined}});
  }
  return {{"best_point", {{"a", best_point.a}, {"b", best_point.b}, {"m", best_point.m}}},
          {"best_lattice", tileopt::to_json(best_lattice)},
          {"best_report", best_report.to_json()},
          {"landscape", rows},
          {"incumbent_trace", incumbent_trace},
          {"nondegeneracy", nondegeneracy},
          {"nondegenerate", nondegenerate}};
}

PointEvaluation evaluate_moduli_point(const ModuliPoint2D& p, const Kernel& k,
                                      const SearchParams& params) {
  if (!params.solver.seed) throw ValidationError("search needs a seed");
  if (params.starts < 1) throw ValidationError("search needs at least one start");
  const GridSpec spec(p.lattice(), params.samples_per_axis, params.window_hops);
  const InteractionOperator op(spec, k);
  std::optional<OptimizationReport> best;
  for (int s = 0; s < params.starts; ++s) {
    const std::uint64_t seed = *params.solver.seed + kStartStride * static_cast<std::uint64_t>(s);
    OptimizationReport r =
        ascend(initial_field(spec, seed, params.solver.start_noise), op, params.solver);
    if (!best || r.j_trace.back() > best->j_trace.back()) best = std::move(r);
  }
  LandscapeRow row;
  row.point = p;
  row.covolume = spec.lattice().covolume();
  row.j_best = best->j_trace.back();
  row.kernel_l1 = op.discrete_l1();
  row.per_k = p.m * row.kernel_l1 - row.j_best;
  row.binarity = best->binarity;
  row.converged = best->converged;
  if (!std::isfinite(row.per_k)) throw NumericError("non-finite Per_K at a moduli point");
  return PointEvaluation{row, std::move(*best)};
}

SearchResult search_lattices(const Kernel& k, const SearchParams& params) {
  if (!(params.m > 0.0)) throw ValidationError("covolume m must be positive");
  if (k.dim() != 2) throw ValidationError("lattice search is two-dimensional");
  if (!k.integrable()) throw ValidationError("lattice search needs an integrable kernel");

  const std::vector<ModuliPoint2D> grid = moduli_grid(params.m, params.grid_steps);
  std::vector<PointEvaluation> evals;
  evals.reserve(grid.size());
  for (const auto& p : grid) evals.push_back(evaluate_moduli_point(p, k, params));

  SearchResult result{grid.front().lattice(), grid.front(), evals.front().report, {}, {}, 0.0,
                      false};
  std::size_t best = 0;
  for (std::size_t i = 0; i < evals.size(); ++i) {
    if (evals[i].row.per_k < evals[best].row.per_k) best = i;
  }
  for (auto& e : evals) {
    result.landscape.push_back(e.row);
    result.incumbent_trace.push_back(evals[best].row.per_k);
  }
  ModuliPoint2D incumbent = evals[best].row.point;
  double incumbent_value = evals[best].row.per_k;
  OptimizationReport incumbent_report = std::move(evals[best].report);

  auto evaluate = [&](const ModuliPoint2D& p) {
    PointEvaluation e = evaluate_moduli_point(p, k, params);
    e.row.refined = true;
    result.landscape.push_back(e.row);
    if (e.row.per_k < incumbent_value) {
      incumbent = p;
      incumbent_value = e.row.per_k;
      incumbent_report = std::move(e.report);
    }
    result.incumbent_trace.push_back(incumbent_value);
    return e.row.per_k;
  };

  // Coordinate golden-section in (b / a, a) around the incumbent; the bracket
  // halves every round.
  const double m = params.m;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double beta_half = 0.5 / std::max(1, params.grid_steps);
  double a_half = (moduli_a_max(m, 0.5) - moduli_a_floor(m)) / std::max(1, params.grid_steps);
  for (int round = 0; round < params.refine_rounds; ++round) {
    for (int coord = 0; coord < 2; ++coord) {
      const double beta0 = incumbent.b / incumbent.a;
      const double a0 = incumbent.a;
      double lo = 0.0;
      double hi = 0.0;
      if (coord == 0) {
        lo = std::max(0.0, beta0 - beta_half);
        hi = std::min(0.5, beta0 + beta_half);
      } else {
        lo = std::max(moduli_a_floor(m), a0 - a_half);
        hi = std::min(moduli_a_max(m, beta0), a0 + a_half);
      }
      if (!(hi > lo)) continue;
      auto point_at = [&](double x) {
        if (coord == 0) return from_shear(x, std::min(a0, moduli_a_max(m, x)), m);
        return from_shear(beta0, x, m);
      };
      double x1 = hi - phi * (hi - lo);
      double x2 = lo + phi * (hi - lo);
      double f1 = evaluate(point_at(x1));
      double f2 = evaluate(point_at(x2));
      for (int it = 0; it < 4; ++it) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - phi * (hi - lo);
          f1 = evaluate(point_at(x1));
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + phi * (hi - lo);
          f2 = evaluate(point_at(x2));
        }
      }
    }
    beta_half *= 0.5;
    a_half *= 0.5;
  }

  result.best_point = incumbent;
  result.best_lattice = incumbent.lattice();
  result.best_report = std::move(incumbent_report);

  std::vector<Lattice> visited;
  std::vector<double> j_values;
  result.nondegeneracy = std::numeric_limits<double>::infinity();
  for (const auto& r : result.landscape) {
    visited.push_back(r.point.lattice());
    j_values.push_back(r.j_best);
    result.nondegeneracy = std::min(result.nondegeneracy, min_distance(visited.back()));
  }
  result.nondegenerate =
      nondegeneracy_check(visited, j_values, params.floor_factor * std::sqrt(params.m));
  return result;
}

bool nondegeneracy_check(const std::vector<Lattice>& visited, const std::vector<double>& j_values,
                         double floor) {
  if (visited.empty() || j_values.empty()) throw ValidationError("no samples");
  if (visited.size() != j_values.size()) {
    throw ValidationError("lattice and energy lists differ in length");
  }
  if (*std::min_element(j_values.begin(), j_values.end()) <= 0.0) return false;
  for (const auto& g : visited) {
    if (min_distance(g) < floor) return false;
  }
  return true;
}

void write_landscape_csv(std::ostream& out, const std::vector<LandscapeRow>& rows) {
  out << "a,b,covolume,j_best,per_k,binarity,converged\n";
  for (const auto& r : rows) {
    out << format_double(r.point.a) << ',' << format_double(r.point.b) << ','
        << format_double(r.covolume) << ',' << format_double(r.j_best) << ','
        << format_double(r.per_k) << ',' << format_double(r.binarity) << ','
        << (r.converged ? 1 : 0) << '\n';
  }
}

}  // namespace tileopt
