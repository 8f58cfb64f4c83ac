#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileopt/geometry.hpp"
#include "tileopt/kernel.hpp"

namespace tileopt {

// Line through `point` with unit `direction`.
struct Axis {
  Point2 point = Point2::Zero();
  Point2 direction = Point2(1.0, 0.0);

  static Axis through(const Point2& point, const Point2& direction);
  // Mirror line exchanging a and b.
  static Axis perpendicular_bisector(const Point2& a, const Point2& b);
};

// Centrally symmetric hexagon with vertices A, B, C, -A, -B, -C (counterclockwise).
// A collinear triple is allowed and encodes a parallelogram.
struct HexParams {
  Point2 a;
  Point2 b;
  Point2 c;

  std::vector<Point2> vertices() const;  // A, B, C, D, E, F
  bool degenerate(double tol = 1e-12) const;
  Polygon polygon() const;
  double area() const;
  HexParams normalized() const;  // unit area, counterclockwise
};

// Shape coordinates of a centrally symmetric hexagon modulo rigid motion and
// scale: edges e1 = (1, 0), e2 = rho2 (cos phi2, sin phi2),
// e3 = rho3 (cos(phi2 + phi3), sin(phi2 + phi3)), then -e1, -e2, -e3.
// Convex when phi2, phi3 >= 0 and phi2 + phi3 <= pi.
struct HexShape {
  double rho2 = 1.0;
  double rho3 = 1.0;
  double phi2 = 0.0;
  double phi3 = 0.0;

  bool valid(double tol = 1e-12) const;
  HexParams params() const;  // unit area

  static HexShape regular();
  static HexShape square();
};

// Random unit-area centrally symmetric hexagon with turning angles at least
// `min_turn`, randomly rotated.
HexParams random_hexagon(std::mt19937_64& rng, double min_turn = 0.15);

// Regular hexagon of the given area, one vertex on the positive x axis.
Polygon regular_hexagon(double area = 1.0);

struct Symmetrized {
  Polygon polygon;
  std::vector<Point2> images;  // image of each input vertex on the output boundary
};

// Exact Steiner symmetrization of a convex polygon: every chord perpendicular
// to the axis is recentred on it. Output vertices sit at the projections of
// the input vertices onto the axis.
Polygon steiner_symmetrize(const Polygon& poly, const Axis& axis);
Symmetrized steiner_symmetrize_tracked(const Polygon& poly, const Axis& axis);

struct TwoStepResult {
  Polygon input;
  Polygon first;
  Polygon second;
  Axis first_axis;
  Axis second_axis;
};

// First symmetrization about the perpendicular bisector of AE, second about
// the perpendicular bisector of F'D' (images of F and D after the first step).
Polygon two_step_regularize(const HexParams& hex);
TwoStepResult two_step_regularize_traced(const HexParams& hex);

// Max vertex distance to the regular hexagon of equal area after aligning
// centroids and optimizing the rotation. Polygons without six proper vertices
// are compared vertex set against vertex set.
double regular_hexagon_mismatch(const Polygon& poly);

struct QuadratureParams {
  int coarse_order = 12;
  int fine_order = 18;

  nlohmann::json to_json() const;
};

struct PerimeterEstimate {
  double value = 0.0;
  double error = 0.0;
};

// Per_K of a convex polygon. Integrable kernels use area ||K||_1 minus the
// self-interaction, fractional kernels the polar form
//   (C / s) int_P sum_i d_i(x)^{-s} int_{a_i}^{b_i} cos^s(phi) dphi dx.
// The error is the difference between the two quadrature levels.
PerimeterEstimate per_k_polygon(const Polygon& poly, const Kernel& k,
                                const QuadratureParams& quad = {});

// int_0^b cos^s(phi) dphi for |b| <= pi / 2.
double cos_power_integral(double b, double s);

struct SweepAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

struct SweepSpec {
  SweepAxis rho2{1.0, 1.0, 1};
  SweepAxis rho3{0.05, 1.95, 20};
  SweepAxis phi2{0.35, 1.40, 20};
  SweepAxis phi3{0.35, 1.40, 20};
  bool tie_phi3 = true;  // phi3 follows phi2
};

struct SweepRow {
  HexShape shape;
  double per_k = 0.0;
  double error = 0.0;
  bool is_regular = false;
  bool is_square = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t argmin = 0;
  std::size_t regular_index = 0;
  std::size_t square_index = 0;
  std::size_t skipped = 0;  // invalid or regular-congruent grid samples
};

SweepResult hexagon_sweep(const Kernel& k, const SweepSpec& grid, const QuadratureParams& quad = {});

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace tileopt
