#include <doctest.h>

#include <cmath>
#include <functional>

#include "tileopt/energy.hpp"
#include "tileopt/errors.hpp"
#include "tileopt/optimizer.hpp"

using namespace tileopt;

namespace {

double brute_j(const GridSpec& spec, const std::vector<double>& v, const Kernel& k) {
  double total = 0.0;
  for (std::size_t x = 0; x < spec.size(); ++x) {
    if (v[x] == 0.0) continue;
    for (std::size_t y = 0; y < spec.size(); ++y) {
      if (v[y] == 0.0) continue;
      total += v[x] * v[y] * k(Vector(spec.position(x) - spec.position(y)));
    }
  }
  return spec.weight() * spec.weight() * total;
}

// Plain recursive enumeration of every binary exact-mode field.
double brute_binary_max(const GridSpec& spec, const Kernel& k, std::size_t* count) {
  std::vector<double> v(spec.size(), 0.0);
  double best = -1.0;
  std::function<void(std::size_t)> rec = [&](std::size_t o) {
    if (o == spec.orbit_count()) {
      ++*count;
      best = std::max(best, brute_j(spec, v, k));
      return;
    }
    for (std::size_t x : spec.orbit(o)) {
      v[x] = 1.0;
      rec(o + 1);
      v[x] = 0.0;
    }
  };
  rec(0);
  return best;
}

SolverParams quick(std::uint64_t seed) {
  SolverParams p;
  p.seed = seed;
  p.max_iters = 2000;
  return p;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("stability bound") {
    const GridSpec spec(Lattice::integer(2), 4, 1);
    const InteractionOperator op(spec, Kernel::gaussian(1.0, 2));
    const double w = spec.weight();
    CHECK(stability_bound(op) == doctest::Approx(1.0 / (w * w * op.max_row_sum())));
    SolverParams p = quick(1);
    p.step_size = 2.0 * stability_bound(op);
    try {
      ascend(initial_field(spec, 1), op, p);
      FAIL("expected a step-size error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).rfind("step too large", 0) == 0);
    }
  }

  TEST_CASE("initial field is feasible and seeded") {
    const GridSpec spec(Lattice::integer(2), 4, 1);
    const DensityField a = initial_field(spec, 5);
    const DensityField b = initial_field(spec, 5);
    const DensityField c = initial_field(spec, 6);
    CHECK(a.is_valid());
    CHECK(a.values() == b.values());
    CHECK(a.values() != c.values());
  }

  TEST_CASE("ascent is monotone and ends near a first-order point") {
    const GridSpec spec(Lattice::integer(2), 4, 1);
    const Kernel k = Kernel::gaussian(1.0, 2);
    const OptimizationReport r = ascend(initial_field(spec, 3), k, quick(3));
    REQUIRE(r.j_trace.size() >= 2);
    for (std::size_t i = 1; i < r.j_trace.size(); ++i) CHECK(r.j_trace[i] >= r.j_trace[i - 1]);
    CHECK(r.final.is_valid());
    CHECK(r.converged);
    CHECK_FALSE(r.has_flag(kStrictClauseUnverified));
    CHECK(r.first_order_residuals.max() <= 1e-3);
    for (double s : r.second_order_samples) CHECK(s >= 0.0);
  }

  TEST_CASE("checkpoints fire at the requested cadence") {
    const GridSpec spec(Lattice::integer(1), 4, 1);
    SolverParams p = quick(1);
    p.checkpoint_every = 5;
    p.max_iters = 20;
    p.stop_tol = 0.0;
    std::vector<int> seen;
    ascend(initial_field(spec, 1), Kernel::exponential(1.0, 1), p,
           [&](int it, const DensityField& f) {
             seen.push_back(it);
             CHECK(f.is_valid());
           });
    REQUIRE_FALSE(seen.empty());
    for (int it : seen) CHECK(it % 5 == 0);
  }

  TEST_CASE("exhaustive oracle against plain enumeration") {
    const GridSpec spec(Lattice::integer(1), 4, 1);
    const Kernel k = Kernel::exponential(1.0, 1);
    const OracleResult o = exhaustive_binary_oracle(spec, k);
    std::size_t count = 0;
    const double best = brute_binary_max(spec, k, &count);
    CHECK(o.candidates == 81);
    CHECK(count == 81);
    CHECK(o.j_value == doctest::Approx(best).epsilon(1e-12));
    CHECK(brute_j(spec, o.best.values(), k) == doctest::Approx(best).epsilon(1e-12));
    CHECK(binarity_deficit(o.best) == 0.0);

    // The relaxed maximum of a convex quadratic sits at a vertex.
    const OptimizationReport r = ascend(initial_field(spec, 2), k, quick(2));
    CHECK(r.j_trace.back() <= o.j_value * (1.0 + 1e-9));
  }

  TEST_CASE("oracle with a single translate") {
    const GridSpec spec(Lattice::integer(2), 3, 0);
    const OracleResult o = exhaustive_binary_oracle(spec, Kernel::gaussian(1.0, 2));
    CHECK(o.candidates == 1);
    CHECK(o.best.values() == std::vector<double>(9, 1.0));
  }

  TEST_CASE("oracle refuses large grids") {
    const GridSpec spec(Lattice::integer(2), 8, 1);
    CHECK_THROWS_AS(exhaustive_binary_oracle(spec, Kernel::gaussian(1.0, 2)), ValidationError);
  }

  TEST_CASE("second-order probe values") {
    const GridSpec spec(Lattice::integer(1), 2, 1);
    const Kernel k = Kernel::gaussian(1.0, 1);
    const DensityField u = uniform_field(spec);
    const auto samples = second_order_probe(u, k, 16, 7);
    REQUIRE(samples.size() == 16);
    const double w = spec.weight();
    for (double s : samples) {
      // Orbit partners sit at distance 1 or 2.
      const bool one = std::abs(s - w * w * (2.0 - 2.0 * std::exp(-1.0))) < 1e-14;
      const bool two = std::abs(s - w * w * (2.0 - 2.0 * std::exp(-4.0))) < 1e-14;
      CHECK((one || two));
    }
    CHECK(second_order_probe(indicator_of_cell(spec), k, 16, 7).empty());
  }

  TEST_CASE("flags for kernels without the strict clause") {
    const GridSpec spec(Lattice::integer(1), 4, 1);
    SolverParams p = quick(1);
    p.max_iters = 3;
    p.stop_tol = 0.0;
    const OptimizationReport r = ascend(initial_field(spec, 1), Kernel::indicator(0.6, 1), p);
    CHECK(r.has_flag(kStrictClauseUnverified));
    CHECK(r.has_flag("iteration limit reached"));
  }

  TEST_CASE("first-order residuals classify points") {
    const GridSpec spec(Lattice::integer(1), 2, 1);
    const DensityField cell = indicator_of_cell(spec);
    const PotentialField pot = potential(cell, Kernel::gaussian(1.0, 1));
    const FirstOrderResiduals r = first_order_residuals(cell, pot);
    CHECK(r.s_points == 2);
    CHECK(r.n_points == 4);
    CHECK(r.d_points == 0);
    CHECK(r.res_s == 0.0);
    CHECK(r.res_n == 0.0);
  }

  TEST_CASE("unregularized fractional kernels are rejected") {
    const GridSpec spec(Lattice::integer(2), 4, 1);
    CHECK_THROWS_AS(ascend(initial_field(spec, 1), Kernel::fractional(1.0, 0.5, 2), quick(1)),
                    ValidationError);
  }
}
