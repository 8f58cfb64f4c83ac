#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tileopt/density.hpp"
#include "tileopt/energy.hpp"
#include "tileopt/errors.hpp"
#include "tileopt/optimizer.hpp"

using namespace tileopt;

namespace {

constexpr double kPi = std::numbers::pi;

DensityField random_exact(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(spec.size());
  for (double& x : v) x = u(rng);
  project_orbits(spec, v);
  return DensityField(spec, v, ConstraintMode::exact);
}

// Brute-force pair sum w^2 sum_{x,y} f(x) g(y) K(x - y) from positions.
double pair_sum(const DensityField& f, const std::vector<double>& g, const Kernel& k) {
  const GridSpec& spec = f.spec();
  double total = 0.0;
  for (std::size_t x = 0; x < spec.size(); ++x) {
    for (std::size_t y = 0; y < spec.size(); ++y) {
      total += f[x] * g[y] * k(Vector(spec.position(x) - spec.position(y)));
    }
  }
  return spec.weight() * spec.weight() * total;
}

}  // namespace

TEST_SUITE("energy") {
  TEST_CASE("trivial fields") {
    const GridSpec spec(Lattice::integer(2), 4, 1);
    const Kernel k = Kernel::gaussian(1.0, 2);
    CHECK(j_energy(DensityField::zeros(spec), k) == 0.0);
    CHECK(p_energy(DensityField::zeros(spec), k).p_value == 0.0);
    std::vector<double> v(spec.size(), 0.0);
    v[17] = 1.0;
    const DensityField point(spec, v, ConstraintMode::relaxed);
    CHECK(j_energy(point, k) == doctest::Approx(spec.weight() * spec.weight()));
    const PotentialField pot = potential(point, k);
    for (std::size_t x = 0; x < spec.size(); x += 7) {
      CHECK(pot.values[x] ==
            doctest::Approx(spec.weight() * k(Vector(spec.position(x) - spec.position(17)))));
    }
    for (double g : gradient_j(DensityField::zeros(spec), k)) CHECK(g == 0.0);
  }

  TEST_CASE("operator matches the brute-force pair sum") {
    for (const Lattice& lat : {Lattice::integer(2), Lattice(Matrix{{1.0, 0.4}, {0.0, 0.8}})}) {
      const GridSpec spec(lat, 3, 1);
      const DensityField f = random_exact(spec, 3);
      for (const Kernel& k : {Kernel::gaussian(1.0, 2), Kernel::exponential(2.0, 2),
                              Kernel::indicator(0.7, 2)}) {
        CHECK(j_energy(f, k) == doctest::Approx(pair_sum(f, f.values(), k)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("identity between the relaxed perimeter and J") {
    const GridSpec spec(Lattice::integer(2), 6, 1);
    const Kernel k = Kernel::gaussian(1.0, 2);
    const InteractionOperator op(spec, k);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const EnergyBreakdown e = p_energy(random_exact(spec, s), op);
      CHECK(e.identity_residual <= 1e-10 * std::max(1.0, std::abs(e.p_value)));
      CHECK(e.j_value >= 0.0);
      CHECK(e.p_value >= 0.0);
      CHECK(e.mass == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(op.discrete_l1() == doctest::Approx(kPi).epsilon(1e-12));
  }

  TEST_CASE("unit interval with an exponential kernel") {
    const Kernel k = Kernel::exponential(1.0, 1);
    const double per_exact = 2.0 * (1.0 - std::exp(-1.0));
    const double j_exact = 2.0 * std::exp(-1.0);
    double prev_err = 1.0;
    for (int n : {16, 32, 64}) {
      const GridSpec spec(Lattice::integer(1), n, 2);
      const DensityField f = indicator_of_cell(spec);
      const double j = j_energy(f, k);
      const EnergyBreakdown e = p_energy(f, k);
      const SetPerimeter per = per_k_set(f, k);
      CHECK(std::abs(per.value - e.p_value) <= 1e-12);
      const double err = std::abs(per.value - per_exact);
      CHECK(err < prev_err);
      prev_err = err;
      CHECK(std::abs(j - j_exact) < 2.0 / (n * n));
    }
    CHECK(prev_err < 1e-4);
  }

  TEST_CASE("set perimeter invariances") {
    const GridSpec spec(Lattice::integer(2), 4, 1);
    const Kernel k = Kernel::exponential(1.5, 2);
    const DensityField empty(spec, std::vector<double>(spec.size(), 0.0), ConstraintMode::relaxed);
    CHECK(per_k_set(empty, k).value == 0.0);
    const DensityField full(spec, std::vector<double>(spec.size(), 1.0), ConstraintMode::relaxed);
    CHECK(per_k_set(full, k, false).value == 0.0);
    CHECK(per_k_set(full, k, true).exterior > 0.0);

    // Lattice translate of a set inside the window.
    const std::size_t e = static_cast<std::size_t>(spec.extent());
    std::vector<double> a(spec.size(), 0.0);
    std::vector<double> b(spec.size(), 0.0);
    for (std::size_t j = 4; j < 7; ++j) {
      for (std::size_t i = 3; i < 6; ++i) {
        a[j * e + i] = 1.0;
        b[j * e + i + 4] = 1.0;  // shifted by one lattice vector (n = 4 samples)
      }
    }
    const double pa = per_k_set(DensityField(spec, a, ConstraintMode::relaxed), k).value;
    const double pb = per_k_set(DensityField(spec, b, ConstraintMode::relaxed), k).value;
    CHECK(std::abs(pa - pb) <= 1e-12 * pa);
    CHECK_THROWS_AS(per_k_set(uniform_field(spec), k), ValidationError);
  }

  TEST_CASE("fractional set perimeter scales like lambda^(N - s)") {
    const Kernel k = Kernel::fractional(1.0, 0.5, 2);
    auto square_perimeter = [&](double lambda) {
      const GridSpec spec(Lattice::integer(2).scaled(lambda), 12, 1);
      return per_k_set(indicator_of_cell(spec), k).value;
    };
    const double base = square_perimeter(1.0);
    for (double lambda : {0.5, 2.0}) {
      CHECK(square_perimeter(lambda) ==
            doctest::Approx(std::pow(lambda, 1.5) * base).epsilon(0.01));
    }
    CHECK_THROWS_AS(j_energy(indicator_of_cell(GridSpec(Lattice::integer(2), 4, 1)), k),
                    ValidationError);
  }

  TEST_CASE("gradient matches central differences") {
    const GridSpec spec(Lattice::integer(2), 5, 1);
    const Kernel k = Kernel::gaussian(1.0, 2);
    const DensityField f = random_exact(spec, 8);
    const auto grad = gradient_j(f, k);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> pick(0, spec.size() - 1);
    const double eps = 1e-5;
    for (int t = 0; t < 20; ++t) {
      const std::size_t x = pick(rng);
      std::vector<double> plus = f.values();
      std::vector<double> minus = f.values();
      plus[x] += eps;
      minus[x] -= eps;
      const double fd = (j_energy(DensityField(spec, plus, ConstraintMode::relaxed), k) -
                         j_energy(DensityField(spec, minus, ConstraintMode::relaxed), k)) /
                        (2 * eps);
      CHECK(std::abs(fd - grad[x]) <= 1e-6 * std::abs(grad[x]));
    }
  }

  TEST_CASE("gradient of a constant field is symmetric under x -> -x") {
    const GridSpec spec(Lattice::integer(2), 4, 1);
    const auto grad = gradient_j(uniform_field(spec), Kernel::exponential(1.0, 2));
    const int e = spec.extent();
    for (std::size_t x = 0; x < spec.size(); ++x) {
      const auto k = spec.coords(x);
      const std::size_t mirror = spec.flat({e - 1 - k[0], e - 1 - k[1], 0});
      CHECK(grad[x] == doctest::Approx(grad[mirror]).epsilon(1e-13));
    }
  }

  TEST_CASE("orbit sums of the potential recover the kernel norm") {
    const Lattice z2 = Lattice::integer(2);
    const Kernel k = Kernel::gaussian(1.0, 2);
    const PeriodizedKernel pk = periodize(k, z2, 1e-12);
    const GridSpec spec(z2, 6, 1);
    const OrbitPotentialSums s = orbit_potential_sums(random_exact(spec, 2), pk);
    for (double v : s.sums) CHECK(std::abs(v - kPi) <= s.truncation_bound + 1e-10);

    // Direct check against the window potential of a compact field.
    const DensityField cell = indicator_of_cell(GridSpec(z2, 6, 3));
    const PotentialField pot = potential(cell, k, pk);
    for (double v : pot.values) {
      CHECK(v > 0.0);
      CHECK(v <= kPi + pot.truncation_bound);
    }
    const DecayDiagnostic d = decay_diagnostic(pot);
    CHECK(d.decays());
  }
}
