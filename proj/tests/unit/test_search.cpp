#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tileopt/errors.hpp"
#include "tileopt/search.hpp"

using namespace tileopt;

TEST_SUITE("search") {
  TEST_CASE("nondegeneracy check") {
    const std::vector<Lattice> lats{Lattice::integer(2), Lattice::hexagonal(1.0)};
    CHECK(nondegeneracy_check(lats, {0.5, 0.4}, 1e-3));
    CHECK_FALSE(nondegeneracy_check(lats, {0.5, 0.0}, 1e-3));
    CHECK_FALSE(nondegeneracy_check({Lattice(Matrix{{1e-4, 0.0}, {0.0, 1e4}})}, {0.3}, 1e-3));
    CHECK_THROWS_AS(nondegeneracy_check({}, {}, 1e-3), ValidationError);
    CHECK_THROWS_AS(nondegeneracy_check(lats, {0.5}, 1e-3), ValidationError);
  }

  TEST_CASE("single moduli point") {
    SearchParams p;
    p.samples_per_axis = 4;
    p.starts = 2;
    p.solver.seed = 1;
    p.solver.max_iters = 400;
    const Kernel k = Kernel::gaussian(1.0, 2);
    const PointEvaluation e = evaluate_moduli_point(ModuliPoint2D::square(1.0), k, p);
    CHECK(e.row.covolume == doctest::Approx(1.0));
    CHECK(e.row.per_k == doctest::Approx(e.row.covolume * e.row.kernel_l1 - e.row.j_best));
    CHECK(e.row.j_best > 0.0);
    CHECK(e.row.per_k > 0.0);
    CHECK(e.report.j_trace.back() == doctest::Approx(e.row.j_best));
  }

  TEST_CASE("small search") {
    SearchParams p;
    p.grid_steps = 2;
    p.refine_rounds = 1;
    p.starts = 1;
    p.samples_per_axis = 4;
    p.solver.seed = 3;
    p.solver.max_iters = 300;
    const SearchResult r = search_lattices(Kernel::gaussian(1.0, 2), p);
    REQUIRE_FALSE(r.landscape.empty());
    REQUIRE(r.incumbent_trace.size() == r.landscape.size());
    for (std::size_t i = 1; i < r.incumbent_trace.size(); ++i) {
      CHECK(r.incumbent_trace[i] <= r.incumbent_trace[i - 1]);
    }
    double best = 1e300;
    for (const LandscapeRow& row : r.landscape) {
      CHECK(row.point.in_reduced_cell(1e-9));
      CHECK(row.covolume == doctest::Approx(1.0).epsilon(1e-12));
      best = std::min(best, row.per_k);
    }
    CHECK(r.incumbent_trace.back() == best);
    CHECK(r.nondegenerate);
    CHECK(r.best_lattice.covolume() == doctest::Approx(1.0).epsilon(1e-12));

    std::ostringstream csv;
    write_landscape_csv(csv, r.landscape);
    const std::string text = csv.str();
    CHECK(text.rfind("a,b,covolume,j_best,per_k,binarity,converged\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') ==
          static_cast<long>(r.landscape.size()) + 1);
  }
}
