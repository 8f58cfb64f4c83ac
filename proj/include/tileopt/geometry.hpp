#pragma once

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace tileopt {

using Point2 = Eigen::Vector2d;

inline double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Convex polygon with counterclockwise vertices. Collinear vertices are kept
// (a parallelogram can be carried as a hexagon with two aligned triples).
class Polygon {
 public:
  Polygon() = default;
  // Orients the input counterclockwise. Throws ValidationError if fewer than
  // three vertices, zero area, or not convex.
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }
  double area() const { return area_; }
  Point2 centroid() const;
  double diameter() const;
  bool contains(const Point2& p, double tol = 0.0) const;

  Polygon translated(const Point2& t) const;
  Polygon scaled(double factor) const;
  Polygon rotated(double angle) const;
  // Drops repeated and collinear vertices.
  Polygon simplified(double tol = 1e-12) const;
  bool centrally_symmetric(double tol) const;

 private:
  std::vector<Point2> vertices_;
  double area_ = 0.0;
};

double shoelace_area(const std::vector<Point2>& vertices);

// Clips `poly` to the half-plane {x : normal . x <= offset}.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, const Point2& normal,
                                    double offset);

nlohmann::json to_json(const Polygon& poly);
Polygon polygon_from_json(const nlohmann::json& j);

}  // namespace tileopt
