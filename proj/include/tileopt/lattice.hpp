#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tileopt/geometry.hpp"

namespace tileopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Full-rank lattice G = B Z^N generated by the columns of B, N in {1, 2, 3}.
// Immutable; the covolume |det B| is computed once on construction.
class Lattice {
 public:
  // Throws ValidationError("degenerate lattice") for singular or non-square bases.
  explicit Lattice(Matrix basis);

  static Lattice integer(int dim);
  // Regular triangular lattice with nearest-neighbour distance `spacing`.
  static Lattice hexagonal(double spacing = 1.0);

  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }
  Vector generator(int i) const { return basis_.col(i); }
  double covolume() const { return covolume_; }
  const Matrix& inverse() const { return inverse_; }

  Vector point(const Eigen::VectorXi& coeffs) const;
  Lattice scaled(double factor) const;
  // Diameter of the fundamental parallelotope spanned by the basis.
  double cell_diameter() const;

 private:
  Matrix basis_;
  Matrix inverse_;
  double covolume_ = 0.0;
};

double covolume(const Matrix& basis);

// Lagrange-Gauss reduction for N = 2, greedy (Minkowski) reduction for N = 3.
// Reduced vectors are sorted by length and carry a lexicographically positive
// leading coordinate.
Lattice reduce(const Lattice& lattice);

// Constant C_N with prod |v_i| <= C_N covolume for every reduced basis.
double reduction_product_constant(int dim);

// All lattice points g with |g| <= radius (the origin included), ordered by
// norm with ties broken lexicographically on coefficients.
std::vector<Vector> lattice_points_in_ball(const Lattice& lattice, double radius);

// All lattice points g with |x + g| <= radius.
std::vector<Vector> lattice_shifts_near(const Lattice& lattice, const Vector& x, double radius);

// Length of the shortest nonzero lattice vector.
double min_distance(const Lattice& lattice);

// Distance from x to the nearest lattice point.
double distance_to_lattice(const Lattice& lattice, const Vector& x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

Polygon voronoi_cell_2d(const Lattice& lattice);
Interval voronoi_cell_1d(const Lattice& lattice);
// Interval for N = 1, Polygon for N = 2. Throws ValidationError otherwise.
std::variant<Interval, Polygon> voronoi_cell(const Lattice& lattice);

// Local Hausdorff distance on B(0, radius): the larger of
// sup_{p in G1, |p| <= r} dist(p, G2) and the same with the roles swapped.
double kuratowski_distance(const Lattice& g1, const Lattice& g2, double radius);

// Point of the reduced fundamental cell of 2D lattices with covolume m:
// basis v1 = (a, 0), v2 = (b, m / a).
struct ModuliPoint2D {
  double a = 1.0;
  double b = 0.0;
  double m = 1.0;

  Lattice lattice() const;
  bool in_reduced_cell(double tol = 1e-12) const;

  static ModuliPoint2D square(double m);
  static ModuliPoint2D hexagonal(double m);
};

// Largest admissible a at shear ratio b / a = beta in the reduced cell.
double moduli_a_max(double m, double beta);
// Smallest a sampled by the moduli grid (degenerate lattices are excluded).
double moduli_a_floor(double m);

// Tensor grid over (b / a, a) in the reduced moduli cell, with the square and
// hexagonal lattices always present.
std::vector<ModuliPoint2D> moduli_grid(double m, int steps);

// Distance in moduli coordinates (a / sqrt(m), b / sqrt(m)).
double moduli_distance(const ModuliPoint2D& p, const ModuliPoint2D& q);

// {"dim": N, "basis": [[...], ...]} with one list per basis vector.
nlohmann::json to_json(const Lattice& lattice);
Lattice lattice_from_json(const nlohmann::json& j);

}  // namespace tileopt
