#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tileopt/errors.hpp"
#include "tileopt/lattice.hpp"

using namespace tileopt;

namespace {

Matrix basis2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, c, b, d;  // columns (a, b) and (c, d)
  return m;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("covolume of simple bases") {
    CHECK(covolume(basis2(1, 0, 0, 1)) == doctest::Approx(1.0));
    CHECK(covolume(basis2(1, 0, 0.5, std::sqrt(3.0) / 2)) == doctest::Approx(std::sqrt(3.0) / 2));
    CHECK(covolume(basis2(2, 0, 1, 3)) == doctest::Approx(6.0));
    CHECK_THROWS_AS(Lattice(basis2(1, 2, 2, 4)), ValidationError);
  }

  TEST_CASE("reduction of a disguised integer lattice") {
    const Lattice r = reduce(Lattice(basis2(1, 0, 1, 1)));
    CHECK(r.generator(0).norm() == doctest::Approx(1.0));
    CHECK(r.generator(1).norm() == doctest::Approx(1.0));
    CHECK(r.covolume() == doctest::Approx(1.0));
  }

  TEST_CASE("reduction finds the shortest vector") {
    const Lattice g(basis2(1, 0, 0.5, 0.1));
    const Lattice r = reduce(g);
    double shortest = std::numeric_limits<double>::infinity();
    for (const auto& p : oracle::ball_points(g.basis(), 2.0, 40)) {
      if (p.norm() > 0) shortest = std::min(shortest, p.norm());
    }
    // (1, 0) - 2 (0.5, 0.1) = (0, -0.2)
    CHECK(shortest == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.generator(0).norm() == doctest::Approx(shortest).epsilon(1e-12));
    CHECK(min_distance(g) == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("hexagonal basis reduces to two unit vectors at 60 degrees") {
    const Lattice h = Lattice::hexagonal(1.0);
    const Lattice r = reduce(h);
    CHECK(r.generator(0).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.generator(1).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r.generator(0).dot(r.generator(1))) == doctest::Approx(0.5).epsilon(1e-14));
    const Matrix u = h.inverse() * r.basis();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(u(i, j) - std::round(u(i, j))) < 1e-12);
    CHECK(min_distance(h) == doctest::Approx(1.0));
  }

  TEST_CASE("reduced bases obey the product bound and keep the lattice") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int dim = 2; dim <= 3; ++dim) {
      for (int t = 0; t < 200; ++t) {
        Matrix b(dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) b(i, j) = u(rng);
        if (std::abs(b.determinant()) < 0.05) continue;
        const Lattice g(b);
        const Lattice r = reduce(g);
        double prod = 1.0;
        for (int i = 0; i < dim; ++i) prod *= r.generator(i).norm();
        CHECK(prod <= reduction_product_constant(dim) * g.covolume() * (1 + 1e-12));
        CHECK(r.covolume() == doctest::Approx(g.covolume()).epsilon(1e-12));
        // Unimodular change of basis: integer coordinates both ways.
        const Matrix u1 = g.inverse() * r.basis();
        const Matrix u2 = r.inverse() * g.basis();
        CHECK((u1 - u1.array().round().matrix()).norm() < 1e-8);
        CHECK((u2 - u2.array().round().matrix()).norm() < 1e-8);
        CHECK(min_distance(r) == doctest::Approx(min_distance(g)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("ball enumeration matches a brute-force box") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 50; ++t) {
      const Matrix b = basis2(u(rng), u(rng), u(rng), u(rng));
      if (std::abs(b.determinant()) < 0.2) continue;
      const Lattice g(b);
      const double r = 2.5;
      CHECK(lattice_points_in_ball(g, r).size() == oracle::ball_points(b, r, 60).size());
    }
    CHECK(lattice_points_in_ball(Lattice::integer(2), 1.0).size() == 5);
    CHECK(lattice_points_in_ball(Lattice::integer(2), std::sqrt(2.0)).size() == 9);
  }

  TEST_CASE("distance to lattice matches brute force") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const Lattice g(basis2(1.0, 0.2, 0.3, 0.8));
    for (int t = 0; t < 100; ++t) {
      Vector x(2);
      x << u(rng), u(rng);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : oracle::ball_points(g.basis(), 10.0, 30)) best = std::min(best, (x - p).norm());
      CHECK(distance_to_lattice(g, x) == doctest::Approx(best).epsilon(1e-12));
    }
  }

  TEST_CASE("voronoi cells") {
    const Polygon sq = voronoi_cell_2d(Lattice::integer(2));
    CHECK(sq.size() == 4);
    CHECK(sq.area() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& p : sq.vertices()) {
      CHECK(std::abs(p.x()) == doctest::Approx(0.5));
      CHECK(std::abs(p.y()) == doctest::Approx(0.5));
    }
    const Interval iv = voronoi_cell_1d(Lattice::integer(1));
    CHECK(iv.lo == doctest::Approx(-0.5));
    CHECK(iv.hi == doctest::Approx(0.5));

    const Polygon hex = voronoi_cell_2d(Lattice::hexagonal(1.0));
    CHECK(hex.size() == 6);
    CHECK(hex.area() == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    // Inradius 1/2: every edge midpoint at distance 1/2 from the origin.
    for (std::size_t i = 0; i < 6; ++i) {
      const Point2 mid = 0.5 * (hex[i] + hex[(i + 1) % 6]);
      CHECK(mid.norm() == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(hex.centrally_symmetric(1e-12));
  }

  TEST_CASE("voronoi cell area equals covolume on random lattices") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      const Matrix b = basis2(u(rng), u(rng), u(rng), u(rng));
      if (std::abs(b.determinant()) < 0.05) continue;
      const Lattice g(b);
      const Polygon cell = voronoi_cell_2d(g);
      CHECK(cell.area() == doctest::Approx(g.covolume()).epsilon(1e-9));
      CHECK(cell.centrally_symmetric(1e-9 * cell.diameter()));
    }
    CHECK_THROWS_AS(voronoi_cell(Lattice::integer(3)), ValidationError);
  }

  TEST_CASE("kuratowski distance") {
    const Lattice z2 = Lattice::integer(2);
    CHECK(kuratowski_distance(z2, z2, 3.0) == 0.0);
    CHECK(kuratowski_distance(z2, Lattice(basis2(1, 0, 1, 1)), 3.0) == doctest::Approx(0.0));
    const Lattice scaled = z2.scaled(1.1);
    const double d = kuratowski_distance(z2, scaled, 1.5);
    CHECK(d == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(kuratowski_distance(scaled, z2, 1.5) == doctest::Approx(d));
  }

  TEST_CASE("moduli grid") {
    for (int steps : {1, 4}) {
      const auto grid = moduli_grid(1.0, steps);
      bool square = false;
      bool hex = false;
      for (const auto& p : grid) {
        CHECK(p.in_reduced_cell(1e-12));
        CHECK(p.lattice().covolume() == doctest::Approx(1.0).epsilon(1e-14));
        square = square || (p.b == 0.0 && std::abs(p.a - 1.0) < 1e-15);
        hex = hex || (std::abs(p.a - std::sqrt(2.0 / std::sqrt(3.0))) < 1e-15 &&
                      std::abs(p.b - p.a / 2) < 1e-15);
      }
      CHECK(square);
      CHECK(hex);
    }
    const ModuliPoint2D h = ModuliPoint2D::hexagonal(1.0);
    CHECK(min_distance(h.lattice()) == doctest::Approx(h.a).epsilon(1e-12));
  }

  TEST_CASE("json round trip") {
    const Lattice g(basis2(1.0, 0.25, -0.5, 2.0));
    const Lattice back = lattice_from_json(to_json(g));
    CHECK((back.basis() - g.basis()).norm() == 0.0);
    CHECK(back.covolume() == g.covolume());
  }
}
