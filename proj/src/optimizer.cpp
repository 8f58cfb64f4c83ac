#include "tileopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tileopt/errors.hpp"
#include "tileopt/parallel.hpp"

namespace tileopt {

namespace {

double quadratic_form(std::span<const double> f, std::span<const double> u, double w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * u[i];
  return w * w * sum;
}

enum class PointClass { s, n, d };

PointClass classify(double v, double tol) {
  if (v >= 1.0 - tol) return PointClass::s;
  if (v <= tol) return PointClass::n;
  return PointClass::d;
}

std::string scientific(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

nlohmann::json SolverParams::to_json() const {
  nlohmann::json j = {{"step_size", step_size},
                      {"max_iters", max_iters},
                      {"stop_tol", stop_tol},
                      {"start_noise", start_noise},
                      {"checkpoint_every", checkpoint_every}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

double FirstOrderResiduals::max() const { return std::max({res_d, res_s, res_n}); }

nlohmann::json FirstOrderResiduals::to_json() const {
  return {{"res_D", res_d},       {"res_S", res_s},       {"res_N", res_n},
          {"d_points", d_points}, {"s_points", s_points}, {"n_points", n_points}};
}

bool OptimizationReport::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

nlohmann::json OptimizationReport::to_json(std::size_t max_trace) const {
  nlohmann::json trace = nlohmann::json::array();
  const std::size_t len = j_trace.size();
  if (len <= max_trace || max_trace < 2) {
    for (double v : j_trace) trace.push_back({{"iteration", trace.size()}, {"j", v}});
  } else {
    for (std::size_t i = 0; i < max_trace; ++i) {
      const std::size_t idx = i * (len - 1) / (max_trace - 1);
      trace.push_back({{"iteration", idx}, {"j", j_trace[idx]}});
    }
  }
  return {{"j_trace", trace},
          {"j_final", j_trace.empty() ? 0.0 : j_trace.back()},
          {"first_order_residuals", first_order_residuals.to_json()},
          {"second_order_samples", second_order_samples},
          {"binarity", binarity},
          {"support_radius", support_radius},
          {"converged", converged},
          {"iterations", iterations},
          {"step_size", step_size},
          {"flags", flags}};
}

double stability_bound(const InteractionOperator& op) {
  const double w = op.spec().weight();
  return 1.0 / (w * w * op.max_row_sum());
}

void project_orbits(const GridSpec& spec, std::vector<double>& values) {
  parallel_for(spec.orbit_count(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> buf(spec.orbit_size());
    for (std::size_t o = begin; o < end; ++o) {
      const auto& members = spec.orbit(o);
      for (std::size_t i = 0; i < members.size(); ++i) buf[i] = values[members[i]];
      project_exact_inplace(buf);
      for (std::size_t i = 0; i < members.size(); ++i) values[members[i]] = buf[i];
    }
  });
}

DensityField initial_field(const GridSpec& spec, std::uint64_t seed, double noise) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  std::vector<double> values(spec.size());
  const double base = 1.0 / static_cast<double>(spec.orbit_size());
  for (double& v : values) v = base + jitter(rng);
  project_orbits(spec, values);
  return DensityField(spec, std::move(values), ConstraintMode::exact);
}

OptimizationReport ascend(const DensityField& f0, const Kernel& k, const SolverParams& params,
                          const Checkpoint& checkpoint) {
  return ascend(f0, InteractionOperator(f0.spec(), k), params, checkpoint);
}

OptimizationReport ascend(const DensityField& f0, const InteractionOperator& op,
                          const SolverParams& params, const Checkpoint& checkpoint) {
  if (f0.mode() != ConstraintMode::exact) throw ValidationError("ascend needs an exact-mode start");
  if (!f0.is_valid()) throw ValidationError("starting density violates the orbit constraints");
  if (op.singular_diagonal()) {
    throw ValidationError("optimizer needs an integrable kernel; set kernel.delta");
  }
  if (params.max_iters < 0) throw ValidationError("max_iters must be nonnegative");
  if (!(params.stop_tol >= 0.0)) throw ValidationError("stop_tol must be nonnegative");
  if (params.step_size < 0.0) throw ValidationError("step_size must be positive");

  const GridSpec& spec = f0.spec();
  const double w = spec.weight();
  const double bound = stability_bound(op);
  const double step = params.step_size > 0.0 ? params.step_size : 0.9 * bound;
  if (step > bound * (1.0 + 1e-12)) {
    throw ValidationError("step too large: " + scientific(step) + " exceeds stability bound " +
                          scientific(bound));
  }

  std::vector<double> f = f0.values();
  std::vector<double> u = op.apply(f);
  double j = quadratic_form(f, u, w);

  OptimizationReport report(f0);
  report.step_size = step;
  report.j_trace.push_back(j);

  std::vector<double> trial(f.size());
  std::vector<double> trial_u(f.size());
  int stall = 0;
  int iter = 0;
  while (iter < params.max_iters) {
    // Halving only triggers for kernels whose interaction matrix is not PSD,
    // or when rounding makes a stationary step look like a decrease.
    double t = step;
    bool accepted = false;
    double trial_j = j;
    for (int halving = 0; halving < 60 && !accepted; ++halving, t *= 0.5) {
      const double scale = 2.0 * w * w * t;
      for (std::size_t i = 0; i < f.size(); ++i) trial[i] = f[i] + scale * u[i];
      project_orbits(spec, trial);
      op.apply(trial, trial_u);
      trial_j = quadratic_form(trial, trial_u, w);
      accepted = trial_j >= j;
    }
    if (!accepted) {
      report.converged = true;
      break;
    }
    ++iter;
    const double gain = (trial_j - j) / std::max(std::abs(trial_j), 1e-300);
    f.swap(trial);
    u.swap(trial_u);
    j = trial_j;
    report.j_trace.push_back(j);
    if (checkpoint && params.checkpoint_every > 0 && iter % params.checkpoint_every == 0) {
      checkpoint(iter, DensityField(spec, f, ConstraintMode::exact));
    }
    stall = gain < params.stop_tol ? stall + 1 : 0;
    if (stall >= kStallWindow) {
      report.converged = true;
      break;
    }
  }
  if (!std::isfinite(j)) throw NumericError("non-finite energy during ascent");

  report.iterations = iter;
  report.final = DensityField(spec, std::move(f), ConstraintMode::exact);
  if (checkpoint) checkpoint(iter, report.final);

  PotentialField v{spec, std::move(u), 0.0};
  for (double& x : v.values) x *= w;
  report.first_order_residuals = first_order_residuals(report.final, v);
  report.second_order_samples =
      second_order_probe(report.final, op.kernel(), 32, params.seed.value_or(0));
  report.binarity = binarity_deficit(report.final);
  report.support_radius = support_radius(report.final);
  if (check_assumptions(op.kernel()).strict_clause != ClauseStatus::holds) {
    report.flags.push_back(kStrictClauseUnverified);
  }
  if (!report.converged) report.flags.push_back("iteration limit reached");
  return report;
}

FirstOrderResiduals first_order_residuals(const DensityField& f, const PotentialField& v,
                                          double tol) {
  const GridSpec& spec = f.spec();
  if (v.values.size() != spec.size()) throw ValidationError("potential does not match the grid");
  FirstOrderResiduals r;
  for (std::size_t o = 0; o < spec.orbit_count(); ++o) {
    const auto& members = spec.orbit(o);
    for (std::size_t x : members) {
      const PointClass cx = classify(f[x], tol);
      switch (cx) {
        case PointClass::s: ++r.s_points; break;
        case PointClass::n: ++r.n_points; break;
        case PointClass::d: ++r.d_points; break;
      }
      for (std::size_t y : members) {
        if (y == x) continue;
        const PointClass cy = classify(f[y], tol);
        const double diff = v.values[x] - v.values[y];
        if (cx == PointClass::d && cy == PointClass::d) {
          r.res_d = std::max(r.res_d, std::abs(diff));
        } else if (cx == PointClass::s) {
          r.res_s = std::max(r.res_s, -diff);
        } else if (cx == PointClass::n && cy != PointClass::n) {
          r.res_n = std::max(r.res_n, diff);
        }
      }
    }
  }
  return r;
}

std::vector<double> second_order_probe(const DensityField& f, const Kernel& k, int trials,
                                       std::uint64_t seed, double tol) {
  const GridSpec& spec = f.spec();
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t o = 0; o < spec.orbit_count(); ++o) {
    std::vector<std::size_t> d;
    for (std::size_t x : spec.orbit(o)) {
      if (classify(f[x], tol) == PointClass::d) d.push_back(x);
    }
    if (d.size() >= 2) groups.push_back(std::move(d));
  }
  std::vector<double> out;
  if (groups.empty() || trials <= 0) return out;
  std::mt19937_64 rng(seed);
  const double w = spec.weight();
  const double k0 = k.profile(0.0);
  for (int t = 0; t < trials; ++t) {
    const auto& g = groups[std::uniform_int_distribution<std::size_t>(0, groups.size() - 1)(rng)];
    const std::size_t a = std::uniform_int_distribution<std::size_t>(0, g.size() - 1)(rng);
    std::size_t b = std::uniform_int_distribution<std::size_t>(0, g.size() - 2)(rng);
    if (b >= a) ++b;
    const double kg = k(spec.position(g[a]) - spec.position(g[b]));
    out.push_back(w * w * (2.0 * k0 - 2.0 * kg));
  }
  return out;
}

OracleResult exhaustive_binary_oracle(const GridSpec& spec, const Kernel& k) {
  const std::size_t orbits = spec.orbit_count();
  const std::size_t size = spec.orbit_size();
  const double candidates =
      std::pow(static_cast<double>(size), static_cast<double>(orbits));
  if (candidates > kMaxOracleCandidates) {
    throw ValidationError("exhaustive oracle limited to 1e7 candidates; this grid has " +
                          scientific(candidates) + " (orbit size " + std::to_string(size) +
                          ", " + std::to_string(orbits) + " orbits)");
  }
  if (!k.integrable()) throw ValidationError("exhaustive oracle needs an integrable kernel");

  const InteractionOperator op(spec, k);
  const std::size_t p = spec.size();
  std::vector<double> a(p * p);
  {
    std::vector<double> e(p, 0.0);
    std::vector<double> col(p);
    for (std::size_t y = 0; y < p; ++y) {
      e[y] = 1.0;
      op.apply(e, col);
      e[y] = 0.0;
      std::copy(col.begin(), col.end(), a.begin() + static_cast<std::ptrdiff_t>(y * p));
    }
  }
  auto entry = [&](std::size_t x, std::size_t y) { return a[y * p + x]; };

  // Odometer over the member chosen in each orbit; each digit change moves one
  // unit of mass, and J / w^2 changes by 2 (u_b - u_a) + A_aa + A_bb - 2 A_ab.
  std::vector<std::size_t> digit(orbits, 0);
  std::vector<double> u(p, 0.0);
  double q = 0.0;
  for (std::size_t o = 0; o < orbits; ++o) {
    const std::size_t x = spec.orbit(o)[0];
    q += 2.0 * u[x] + entry(x, x);
    for (std::size_t y = 0; y < p; ++y) u[y] += entry(y, x);
  }
  std::vector<std::size_t> best_digit = digit;
  double best_q = q;
  auto move = [&](std::size_t o, std::size_t from, std::size_t to) {
    const std::size_t xa = spec.orbit(o)[from];
    const std::size_t xb = spec.orbit(o)[to];
    q += 2.0 * (u[xb] - u[xa]) + entry(xa, xa) + entry(xb, xb) - 2.0 * entry(xa, xb);
    for (std::size_t y = 0; y < p; ++y) u[y] += entry(y, xb) - entry(y, xa);
  };
  std::size_t count = 1;
  while (true) {
    std::size_t o = 0;
    while (o < orbits && digit[o] + 1 == size) {
      move(o, digit[o], 0);
      digit[o] = 0;
      ++o;
    }
    if (o == orbits) break;
    move(o, digit[o], digit[o] + 1);
    ++digit[o];
    ++count;
    if (q > best_q) {
      best_q = q;
      best_digit = digit;
    }
  }

  std::vector<double> values(p, 0.0);
  for (std::size_t o = 0; o < orbits; ++o) values[spec.orbit(o)[best_digit[o]]] = 1.0;
  DensityField best(spec, std::move(values), ConstraintMode::exact);
  const double j = j_energy(best, op);
  return OracleResult{std::move(best), j, count};
}

}  // namespace tileopt
