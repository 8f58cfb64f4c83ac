#include "tileopt/polygon2d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/beta.hpp>

#include "tileopt/density.hpp"
#include "tileopt/errors.hpp"
#include "tileopt/parallel.hpp"
#include "tileopt/quadrature.hpp"

namespace tileopt {

namespace {

constexpr double kPi = std::numbers::pi;

Point2 rot90(const Point2& v) { return Point2(-v.y(), v.x()); }

struct Node2 {
  Point2 x;
  double w;
};

// Gauss rule on the triangle (p0, p1, p2), collapsed at p0.
void append_triangle_rule(const Point2& p0, const Point2& p1, const Point2& p2, int order,
                          std::vector<Node2>& out) {
  const GaussRule& g = gauss_legendre(order);
  const double jac = std::abs(cross(p1 - p0, p2 - p1));
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double u = 0.5 * (g.nodes[i] + 1.0);
    const double wu = 0.5 * g.weights[i];
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double t = 0.5 * (g.nodes[j] + 1.0);
      const double wt = 0.5 * g.weights[j];
      out.push_back({p0 + u * (p1 - p0) + u * t * (p2 - p1), wu * wt * u * jac});
    }
  }
}

// int_P K(x - y) dy through triangles collapsed at x.
double inner_integral(const Polygon& poly, const Kernel& k, const Point2& x, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double support = k.support_radius();
  const std::size_t n = poly.size();
  double total = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const Point2 a = poly[e] - x;
    const Point2 d = poly[(e + 1) % n] - poly[e];
    const double jac = std::abs(cross(a, d));
    if (jac == 0.0) continue;
    double edge_sum = 0.0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double t = 0.5 * (g.nodes[j] + 1.0);
      const double len = (a + t * d).norm();
      // A compactly supported kernel has a kink at the support radius.
      const double u_end = std::isfinite(support) && support < len ? support / len : 1.0;
      double radial = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double u = 0.5 * u_end * (g.nodes[i] + 1.0);
        radial += 0.5 * u_end * g.weights[i] * k.profile(u * len) * u;
      }
      edge_sum += 0.5 * g.weights[j] * radial;
    }
    total += jac * edge_sum;
  }
  return total;
}

double integrable_perimeter(const Polygon& poly, const Kernel& k, int order) {
  const Point2 c = poly.centroid();
  std::vector<Node2> nodes;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    append_triangle_rule(c, poly[i], poly[(i + 1) % poly.size()], order, nodes);
  }
  std::vector<double> partial(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      partial[i] = nodes[i].w * inner_integral(poly, k, nodes[i].x, order);
    }
  });
  double self = 0.0;
  for (double v : partial) self += v;
  return poly.area() * k.l1_norm() - self;
}

// sum_i d_i^{-s} int_{a_i}^{b_i} cos^s, the angular part of the polar form at x.
double polar_integrand(const Polygon& poly, double s, const Point2& x) {
  const std::size_t n = poly.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = poly[(i + 1) % n] - poly[i];
    const double len = e.norm();
    const Point2 t = e / len;
    const Point2 normal(t.y(), -t.x());
    const double d = (poly[i] - x).dot(normal);
    if (!(d > 0.0)) continue;
    const double a = std::atan2((poly[i] - x).dot(t), d);
    const double b = std::atan2((poly[(i + 1) % n] - x).dot(t), d);
    sum += std::pow(d, -s) * (cos_power_integral(b, s) - cos_power_integral(a, s));
  }
  return sum;
}

double fractional_perimeter(const Polygon& poly, double c_frac, double s, int order) {
  const int q = std::max(2, order / 2);
  const int levels = std::max(2, order / 2);
  const Point2 c = poly.centroid();
  const std::vector<double> t_breaks = graded_breaks(levels, 0.25);
  const std::vector<double> s_breaks = two_sided_graded_breaks(levels, 0.25);
  std::vector<double> tn, tw, sn, sw;
  for (std::size_t i = 0; i + 1 < t_breaks.size(); ++i) {
    append_gauss(t_breaks[i], t_breaks[i + 1], q, tn, tw);
  }
  for (std::size_t i = 0; i + 1 < s_breaks.size(); ++i) {
    append_gauss(s_breaks[i], s_breaks[i + 1], q, sn, sw);
  }
  // tau = t^{1/(1-s)} absorbs the d^{-s} blow-up at the outer edge.
  const double power = 1.0 / (1.0 - s);
  std::vector<Node2> nodes;
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const Point2 v0 = poly[e];
    const Point2 v1 = poly[(e + 1) % poly.size()];
    const double jac = std::abs(cross(v0 - c, v1 - v0));
    for (std::size_t i = 0; i < tn.size(); ++i) {
      const double tau = std::pow(tn[i], power);
      const double dtau = power * std::pow(tn[i], power - 1.0);
      for (std::size_t j = 0; j < sn.size(); ++j) {
        const Point2 x = c + (1.0 - tau) * ((v0 - c) + sn[j] * (v1 - v0));
        nodes.push_back({x, tw[i] * sw[j] * dtau * (1.0 - tau) * jac});
      }
    }
  }
  std::vector<double> partial(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      partial[i] = nodes[i].w * polar_integrand(poly, s, nodes[i].x);
    }
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return c_frac / s * total;
}

// Upper and lower chord ends at each distinct axial coordinate.
struct Chords {
  std::vector<double> alpha;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> cluster;  // per input vertex
};

Chords chord_profile(const std::vector<double>& alpha, const std::vector<double>& beta,
                     double tol) {
  const std::size_t n = alpha.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return alpha[a] < alpha[b] || (alpha[a] == alpha[b] && a < b);
  });
  Chords c;
  c.cluster.assign(n, 0);
  std::vector<double> snapped(n);
  for (std::size_t idx : order) {
    if (c.alpha.empty() || alpha[idx] - c.alpha.back() > tol) c.alpha.push_back(alpha[idx]);
    c.cluster[idx] = c.alpha.size() - 1;
    snapped[idx] = c.alpha.back();
  }
  const std::size_t m = c.alpha.size();
  c.lo.assign(m, std::numeric_limits<double>::infinity());
  c.hi.assign(m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    c.lo[c.cluster[i]] = std::min(c.lo[c.cluster[i]], beta[i]);
    c.hi[c.cluster[i]] = std::max(c.hi[c.cluster[i]], beta[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double a0 = snapped[i];
    const double a1 = snapped[j];
    if (a0 == a1) continue;
    const std::size_t k0 = std::min(c.cluster[i], c.cluster[j]);
    const std::size_t k1 = std::max(c.cluster[i], c.cluster[j]);
    for (std::size_t k = k0 + 1; k < k1; ++k) {
      const double r = (c.alpha[k] - a0) / (a1 - a0);
      const double b = beta[i] + r * (beta[j] - beta[i]);
      c.lo[k] = std::min(c.lo[k], b);
      c.hi[k] = std::max(c.hi[k], b);
    }
  }
  return c;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

Axis Axis::through(const Point2& point, const Point2& direction) {
  const double len = direction.norm();
  if (!(len > 0.0)) throw ValidationError("axis direction must be nonzero");
  return Axis{point, direction / len};
}

Axis Axis::perpendicular_bisector(const Point2& a, const Point2& b) {
  return through(0.5 * (a + b), rot90(b - a));
}

std::vector<Point2> HexParams::vertices() const {
  std::vector<Point2> v{a, b, c, -a, -b, -c};
  if (shoelace_area(v) < 0.0) v = {a, -c, -b, -a, c, b};
  return v;
}

bool HexParams::degenerate(double tol) const {
  const std::vector<Point2> v = vertices();
  double scale = 0.0;
  for (const auto& p : v) scale = std::max(scale, p.norm());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 e0 = v[(i + 1) % 6] - v[i];
    const Point2 e1 = v[(i + 2) % 6] - v[(i + 1) % 6];
    if (std::abs(cross(e0, e1)) <= tol * scale * scale) return true;
  }
  return false;
}

Polygon HexParams::polygon() const { return Polygon(vertices()); }

double HexParams::area() const { return std::abs(shoelace_area(vertices())); }

HexParams HexParams::normalized() const {
  const std::vector<Point2> v = vertices();
  const double ar = std::abs(shoelace_area(v));
  if (!(ar > 0.0)) throw ValidationError("degenerate hexagon (zero area)");
  const double f = 1.0 / std::sqrt(ar);
  return HexParams{v[0] * f, v[1] * f, v[2] * f};
}

bool HexShape::valid(double tol) const {
  if (!(rho2 > 0.0) || !(rho3 > 0.0)) return false;
  if (phi2 < -tol || phi3 < -tol || kPi - phi2 - phi3 < -tol) return false;
  const double ar = std::sin(phi2) * rho2 + std::sin(phi2 + phi3) * rho3 + rho2 * rho3 * std::sin(phi3);
  return ar > tol;
}

HexParams HexShape::params() const {
  if (!valid()) throw ValidationError("hexagon shape parameters do not describe a convex hexagon");
  const Point2 e1(1.0, 0.0);
  const Point2 e2 = rho2 * Point2(std::cos(phi2), std::sin(phi2));
  const Point2 e3 = rho3 * Point2(std::cos(phi2 + phi3), std::sin(phi2 + phi3));
  const Point2 a = -0.5 * (e1 + e2 + e3);
  return HexParams{a, a + e1, a + e1 + e2}.normalized();
}

HexShape HexShape::regular() { return {1.0, 1.0, kPi / 3.0, kPi / 3.0}; }

HexShape HexShape::square() { return {0.5, 0.5, kPi / 2.0, 0.0}; }

HexParams random_hexagon(std::mt19937_64& rng, double min_turn) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  do {
    double u1 = unit(rng);
    double u2 = unit(rng);
    if (u1 > u2) std::swap(u1, u2);
    t1 = kPi * u1;
    t2 = kPi * (u2 - u1);
    t3 = kPi * (1.0 - u2);
  } while (t1 < min_turn || t2 < min_turn || t3 < min_turn);
  const double rho2 = std::exp(std::log(0.4) + unit(rng) * std::log(2.5 / 0.4));
  const double rho3 = std::exp(std::log(0.4) + unit(rng) * std::log(2.5 / 0.4));
  const HexParams base = HexShape{rho2, rho3, t1, t2}.params();
  const Eigen::Rotation2Dd rot(2.0 * kPi * unit(rng));
  return HexParams{rot * base.a, rot * base.b, rot * base.c};
}

Polygon regular_hexagon(double area) {
  const double r = std::sqrt(2.0 * area / (3.0 * std::sqrt(3.0)));
  std::vector<Point2> v;
  for (int i = 0; i < 6; ++i) {
    v.emplace_back(r * std::cos(i * kPi / 3.0), r * std::sin(i * kPi / 3.0));
  }
  return Polygon(std::move(v));
}

Symmetrized steiner_symmetrize_tracked(const Polygon& poly, const Axis& axis) {
  const Point2 t = axis.direction.normalized();
  const Point2 n = rot90(t);
  const std::size_t count = poly.size();
  std::vector<double> alpha(count);
  std::vector<double> beta(count);
  for (std::size_t i = 0; i < count; ++i) {
    alpha[i] = (poly[i] - axis.point).dot(t);
    beta[i] = (poly[i] - axis.point).dot(n);
  }
  const double tol = 1e-13 * poly.diameter();
  const Chords c = chord_profile(alpha, beta, tol);
  auto at = [&](double a, double b) -> Point2 { return axis.point + a * t + b * n; };

  std::vector<Point2> out;
  const std::size_t m = c.alpha.size();
  for (std::size_t k = 0; k < m; ++k) out.push_back(at(c.alpha[k], -0.5 * (c.hi[k] - c.lo[k])));
  for (std::size_t k = m; k-- > 0;) {
    const double half = 0.5 * (c.hi[k] - c.lo[k]);
    if ((k == 0 || k == m - 1) && half <= tol) continue;
    out.push_back(at(c.alpha[k], half));
  }
  Symmetrized result{Polygon(std::move(out)), {}};
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = c.cluster[i];
    result.images.push_back(at(c.alpha[k], beta[i] - 0.5 * (c.hi[k] + c.lo[k])));
  }
  return result;
}

Polygon steiner_symmetrize(const Polygon& poly, const Axis& axis) {
  return steiner_symmetrize_tracked(poly, axis).polygon;
}

TwoStepResult two_step_regularize_traced(const HexParams& hex) {
  const std::vector<Point2> v = hex.vertices();
  const Polygon input(v);
  const Axis first_axis = Axis::perpendicular_bisector(v[0], v[4]);  // A, E
  const Symmetrized first = steiner_symmetrize_tracked(input, first_axis);
  const Point2 f1 = first.images[5];
  const Point2 d1 = first.images[3];
  if ((f1 - d1).norm() <= 1e-14 * input.diameter()) {
    throw NumericError("F' and D' coincide after the first symmetrization");
  }
  const Axis second_axis = Axis::perpendicular_bisector(f1, d1);
  const Polygon second = steiner_symmetrize(first.polygon, second_axis);
  return TwoStepResult{input, first.polygon.simplified(), second.simplified(), first_axis,
                       second_axis};
}

Polygon two_step_regularize(const HexParams& hex) { return two_step_regularize_traced(hex).second; }

double regular_hexagon_mismatch(const Polygon& poly) {
  const Polygon p = poly.simplified();
  const Point2 c = p.centroid();
  const double r = std::sqrt(2.0 * p.area() / (3.0 * std::sqrt(3.0)));
  std::vector<Point2> verts;
  for (const auto& q : p.vertices()) verts.push_back(q - c);
  auto targets = [&](double theta) {
    std::vector<Point2> out;
    for (int k = 0; k < 6; ++k) {
      out.emplace_back(r * std::cos(theta + k * kPi / 3.0), r * std::sin(theta + k * kPi / 3.0));
    }
    return out;
  };
  auto nearest = [](const Point2& x, const std::vector<Point2>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : set) best = std::min(best, (x - y).norm());
    return best;
  };
  auto objective = [&](double theta) {
    const auto tg = targets(theta);
    double sum = 0.0;
    for (const auto& x : verts) sum += nearest(x, tg);
    return sum;
  };
  const int scan = 720;
  const double period = kPi / 3.0;
  double best_theta = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan; ++i) {
    const double theta = period * i / scan;
    const double value = objective(theta);
    if (value < best_value) {
      best_value = value;
      best_theta = theta;
    }
  }
  const double h = period / scan;
  const double theta = golden_section(objective, best_theta - h, best_theta + h, 120);
  const auto tg = targets(theta);
  double mismatch = 0.0;
  for (const auto& x : verts) mismatch = std::max(mismatch, nearest(x, tg));
  for (const auto& y : tg) mismatch = std::max(mismatch, nearest(y, verts));
  return mismatch;
}

nlohmann::json QuadratureParams::to_json() const {
  return {{"coarse_order", coarse_order}, {"fine_order", fine_order}};
}

double cos_power_integral(double b, double s) {
  if (b == 0.0) return 0.0;
  const double half = 0.5 * kPi;
  const double x = std::min(1.0, std::pow(std::sin(std::min(std::abs(b), half)), 2));
  const double p = 0.5;
  const double q = 0.5 * (1.0 + s);
  using Fast = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
  const double value = 0.5 * boost::math::beta(p, q, Fast()) * boost::math::ibeta(p, q, x, Fast());
  return b < 0.0 ? -value : value;
}

PerimeterEstimate per_k_polygon(const Polygon& poly, const Kernel& k, const QuadratureParams& quad) {
  if (k.dim() != 2) throw ValidationError("polygon perimeters need a 2D kernel");
  if (quad.coarse_order < 2 || quad.fine_order <= quad.coarse_order) {
    throw ValidationError("quadrature orders must satisfy 2 <= coarse < fine");
  }
  const Polygon p = poly.simplified();
  double coarse = 0.0;
  double fine = 0.0;
  if (k.family() == KernelFamily::fractional && !k.regularized()) {
    const double c = k.params()[0];
    const double s = k.params()[1];
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("fractional order s must lie in (0, 1)");
    coarse = fractional_perimeter(p, c, s, quad.coarse_order);
    fine = fractional_perimeter(p, c, s, quad.fine_order);
  } else {
    coarse = integrable_perimeter(p, k, quad.coarse_order);
    fine = integrable_perimeter(p, k, quad.fine_order);
  }
  if (!std::isfinite(fine)) throw NumericError("non-finite polygon perimeter");
  return PerimeterEstimate{fine, std::abs(fine - coarse)};
}

std::vector<double> SweepAxis::values() const {
  if (count < 1) throw ValidationError("sweep axis count must be positive");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

SweepResult hexagon_sweep(const Kernel& k, const SweepSpec& grid, const QuadratureParams& quad) {
  SweepResult result;
  const auto phi3_values = grid.tie_phi3 ? std::vector<double>{0.0} : grid.phi3.values();
  for (double rho2 : grid.rho2.values()) {
    for (double rho3 : grid.rho3.values()) {
      for (double phi2 : grid.phi2.values()) {
        for (double phi3 : phi3_values) {
          const HexShape shape{rho2, rho3, phi2, grid.tie_phi3 ? phi2 : phi3};
          if (!shape.valid() || regular_hexagon_mismatch(shape.params().polygon()) < 1e-9) {
            ++result.skipped;
            continue;
          }
          result.rows.push_back(SweepRow{shape, 0.0, 0.0, false, false});
        }
      }
    }
  }
  result.regular_index = result.rows.size();
  result.rows.push_back(SweepRow{HexShape::regular(), 0.0, 0.0, true, false});
  result.square_index = result.rows.size();
  result.rows.push_back(SweepRow{HexShape::square(), 0.0, 0.0, false, true});

  for (auto& row : result.rows) {
    const PerimeterEstimate est = per_k_polygon(row.shape.params().polygon(), k, quad);
    row.per_k = est.value;
    row.error = est.error;
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].per_k < result.rows[result.argmin].per_k) result.argmin = i;
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "rho2,rho3,phi2,phi3,per_k,error_estimate,is_regular_hexagon,is_square\n";
  for (const auto& r : sweep.rows) {
    out << format_double(r.shape.rho2) << ',' << format_double(r.shape.rho3) << ','
        << format_double(r.shape.phi2) << ',' << format_double(r.shape.phi3) << ','
        << format_double(r.per_k) << ',' << format_double(r.error) << ','
        << (r.is_regular ? 1 : 0) << ',' << (r.is_square ? 1 : 0) << '\n';
  }
}

}  // namespace tileopt
