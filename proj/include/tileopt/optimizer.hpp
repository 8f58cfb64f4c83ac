#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileopt/density.hpp"
#include "tileopt/energy.hpp"
#include "tileopt/kernel.hpp"

namespace tileopt {

struct SolverParams {
  double step_size = 0.0;  // 0 selects 0.9 of the stability bound
  int max_iters = 5000;
  double stop_tol = 1e-10;
  std::optional<std::uint64_t> seed;
  double start_noise = 0.01;
  int checkpoint_every = 0;  // 0 disables checkpoints

  nlohmann::json to_json() const;
};

inline constexpr int kStallWindow = 10;
inline constexpr double kClassTol = 1e-6;
inline constexpr double kMaxOracleCandidates = 1e7;

struct FirstOrderResiduals {
  double res_d = 0.0;
  double res_s = 0.0;
  double res_n = 0.0;
  std::size_t d_points = 0;
  std::size_t s_points = 0;
  std::size_t n_points = 0;

  double max() const;
  nlohmann::json to_json() const;
};

struct OptimizationReport {
  explicit OptimizationReport(DensityField f) : final(std::move(f)) {}

  std::vector<double> j_trace;
  DensityField final;
  FirstOrderResiduals first_order_residuals;
  std::vector<double> second_order_samples;
  double binarity = 0.0;
  double support_radius = 0.0;
  bool converged = false;
  int iterations = 0;
  double step_size = 0.0;
  std::vector<std::string> flags;

  bool has_flag(const std::string& flag) const;
  // j_trace is decimated to at most `max_trace` entries (first and last kept).
  nlohmann::json to_json(std::size_t max_trace = 200) const;
};

inline const std::string kStrictClauseUnverified = "strict clause unverified";

// 1 / (w^2 max_x sum_y K(x - y)): the largest step for which projected ascent
// of the discrete quadratic form cannot overshoot.
double stability_bound(const InteractionOperator& op);

// project_exact(uniform + noise), noise uniform in [-noise, noise].
DensityField initial_field(const GridSpec& spec, std::uint64_t seed, double noise = 0.01);

// Projects every orbit of `values` onto the capped simplex.
void project_orbits(const GridSpec& spec, std::vector<double>& values);

using Checkpoint = std::function<void(int iteration, const DensityField& f)>;

// Projected gradient ascent of J over exact-mode densities.
OptimizationReport ascend(const DensityField& f0, const Kernel& k, const SolverParams& params,
                          const Checkpoint& checkpoint = {});
OptimizationReport ascend(const DensityField& f0, const InteractionOperator& op,
                          const SolverParams& params, const Checkpoint& checkpoint = {});

FirstOrderResiduals first_order_residuals(const DensityField& f, const PotentialField& v,
                                          double tol = kClassTol);

// Values w^2 (2 K(0) - 2 K(g)) of random two-point variations inside D.
std::vector<double> second_order_probe(const DensityField& f, const Kernel& k, int trials,
                                       std::uint64_t seed, double tol = kClassTol);

struct OracleResult {
  DensityField best;
  double j_value = 0.0;
  std::size_t candidates = 0;
};

// Exhaustive maximization of J over binary exact-mode fields.
OracleResult exhaustive_binary_oracle(const GridSpec& spec, const Kernel& k);

}  // namespace tileopt
