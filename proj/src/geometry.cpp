#include "tileopt/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "tileopt/errors.hpp"

namespace tileopt {

double shoelace_area(const std::vector<Point2>& v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    twice += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * twice;
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw ValidationError("polygon needs at least three vertices");
  area_ = shoelace_area(vertices_);
  if (area_ < 0) {
    std::reverse(vertices_.begin(), vertices_.end());
    area_ = -area_;
  }
  if (!(area_ > 0.0)) throw ValidationError("degenerate polygon (zero area)");
  const double scale = diameter();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e0 = vertices_[(i + 1) % n] - vertices_[i];
    const Point2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (cross(e0, e1) < -1e-12 * scale * scale) {
      throw ValidationError("polygon is not convex");
    }
  }
}

Point2 Polygon::centroid() const {
  Point2 c = Point2::Zero();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % n];
    c += (a + b) * cross(a, b);
  }
  return c / (6.0 * area_);
}

double Polygon::diameter() const {
  double d = 0.0;
  for (const auto& a : vertices_) {
    for (const auto& b : vertices_) d = std::max(d, (a - b).norm());
  }
  return d;
}

bool Polygon::contains(const Point2& p, double tol) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = vertices_[(i + 1) % n] - vertices_[i];
    const double len = e.norm();
    if (len == 0.0) continue;
    if (cross(e, p - vertices_[i]) / len < -tol) return false;
  }
  return true;
}

Polygon Polygon::translated(const Point2& t) const {
  std::vector<Point2> v = vertices_;
  for (auto& p : v) p += t;
  return Polygon(std::move(v));
}

Polygon Polygon::scaled(double factor) const {
  std::vector<Point2> v = vertices_;
  for (auto& p : v) p *= factor;
  return Polygon(std::move(v));
}

Polygon Polygon::rotated(double angle) const {
  const Eigen::Rotation2Dd rot(angle);
  std::vector<Point2> v = vertices_;
  for (auto& p : v) p = rot * p;
  return Polygon(std::move(v));
}

Polygon Polygon::simplified(double tol) const {
  const double scale = std::max(diameter(), 1e-300);
  std::vector<Point2> v;
  for (const auto& p : vertices_) {
    if (v.empty() || (p - v.back()).norm() > tol * scale) v.push_back(p);
  }
  while (v.size() > 1 && (v.front() - v.back()).norm() <= tol * scale) v.pop_back();
  bool changed = true;
  while (changed && v.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point2& prev = v[(i + v.size() - 1) % v.size()];
      const Point2& next = v[(i + 1) % v.size()];
      const Point2 d = next - prev;
      const double dist = std::abs(cross(d, v[i] - prev)) / std::max(d.norm(), 1e-300);
      if (dist <= tol * scale) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return Polygon(std::move(v));
}

bool Polygon::centrally_symmetric(double tol) const {
  const Point2 c = centroid();
  for (const auto& p : vertices_) {
    const Point2 mirror = 2.0 * c - p;
    bool found = false;
    for (const auto& q : vertices_) {
      if ((q - mirror).norm() <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, const Point2& normal,
                                    double offset) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const double da = normal.dot(a) - offset;
    const double db = normal.dot(b) - offset;
    if (da <= 0) out.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

nlohmann::json to_json(const Polygon& poly) {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& p : poly.vertices()) verts.push_back({p.x(), p.y()});
  return {{"vertices", verts}};
}

Polygon polygon_from_json(const nlohmann::json& j) {
  std::vector<Point2> v;
  for (const auto& p : j.at("vertices")) {
    v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  return Polygon(std::move(v));
}

}  // namespace tileopt
