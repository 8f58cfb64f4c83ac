#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of them reuse the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// Projection onto {x in [0,1]^k : sum x = 1} by enumerating every active set:
// each coordinate is pinned at 0, pinned at 1, or free with a common shift.
inline std::vector<double> capped_simplex_projection(const std::vector<double>& v) {
  const std::size_t k = v.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= 3;
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> state(k);
    std::size_t c = code;
    int ones = 0;
    int free = 0;
    double free_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 1) ++ones;
      if (state[i] == 2) {
        ++free;
        free_sum += v[i];
      }
    }
    std::vector<double> x(k, 0.0);
    if (free == 0) {
      if (ones != 1) continue;
    } else {
      const double mu = (1.0 - ones - free_sum) / free;
      bool ok = true;
      for (std::size_t i = 0; i < k; ++i) {
        if (state[i] == 2) {
          x[i] = v[i] + mu;
          if (x[i] < -1e-15 || x[i] > 1.0 + 1e-15) ok = false;
        }
      }
      if (!ok) continue;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (state[i] == 1) x[i] = 1.0;
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < k; ++i) dist += (x[i] - v[i]) * (x[i] - v[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

// Lattice points B c with |B c| <= r, from a large coefficient box.
inline std::vector<Eigen::VectorXd> ball_points(const Eigen::MatrixXd& basis, double r, int box) {
  const int n = static_cast<int>(basis.cols());
  std::vector<Eigen::VectorXd> out;
  std::vector<int> c(static_cast<std::size_t>(n), -box);
  while (true) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) p += basis.col(i) * c[static_cast<std::size_t>(i)];
    if (p.norm() <= r) out.push_back(p);
    int i = 0;
    while (i < n && c[static_cast<std::size_t>(i)] == box) c[static_cast<std::size_t>(i++)] = -box;
    if (i == n) break;
    ++c[static_cast<std::size_t>(i)];
  }
  return out;
}

// Per_K of the unit square for K = exp(-|h|^2):
// area * pi - (int_0^1 int_0^1 exp(-(x-y)^2))^2.
inline double gaussian_unit_square_perimeter() {
  const double pi = std::numbers::pi;
  const double one_d = std::sqrt(pi) * std::erf(1.0) + std::exp(-1.0) - 1.0;
  return pi - one_d * one_d;
}

using P2 = Eigen::Vector2d;

inline double cross2(const P2& a, const P2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Fractional perimeter of a convex polygon (counterclockwise vertices) through
// the boundary double integral
//   Per_s = C / s^2 sum_{i,j} (n_i . n_j) int_{e_i} int_{e_j} |x - y|^{-s}.
inline double fractional_boundary_perimeter(const std::vector<P2>& v, double c, double s) {
  const std::size_t n = v.size();
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const P2 a0 = v[i];
    const P2 a1 = v[(i + 1) % n];
    const double li = (a1 - a0).norm();
    const P2 ni = P2((a1 - a0).y(), -(a1 - a0).x()) / li;
    for (std::size_t j = 0; j < n; ++j) {
      const P2 b0 = v[j];
      const P2 b1 = v[(j + 1) % n];
      const double lj = (b1 - b0).norm();
      const P2 nj = P2((b1 - b0).y(), -(b1 - b0).x()) / lj;
      const double dot = ni.dot(nj);
      if (std::abs(dot) < 1e-15) continue;
      double integral = 0.0;
      if (i == j) {
        integral = 2.0 * std::pow(li, 2.0 - s) / ((1.0 - s) * (2.0 - s));
      } else {
        auto outer = [&](double a) {
          const P2 x = a0 + a * (a1 - a0);
          auto inner = [&](double b) { return std::pow((x - (b0 + b * (b1 - b0))).norm(), -s); };
          return ts.integrate(inner, 0.0, 1.0, 1e-12);
        };
        integral = ts.integrate(outer, 0.0, 1.0, 1e-11) * li * lj;
      }
      total += dot * integral;
    }
  }
  return c / (s * s) * total;
}

// Per_K of a convex polygon for K = exp(-alpha |h|^2) through the polar form
//   int_P int_0^{2 pi} T(rho_x(theta)) dtheta dx,  T(r) = exp(-alpha r^2) / (2 alpha),
// with rho_x(theta) the distance from x to the boundary along direction theta.
inline double gaussian_polar_perimeter(const std::vector<P2>& v, double alpha) {
  using boost::math::quadrature::gauss;
  const std::size_t n = v.size();
  auto boundary_distance = [&](const P2& x, const P2& dir) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const P2 e = v[(i + 1) % n] - v[i];
      const double denom = cross2(dir, e);
      if (std::abs(denom) < 1e-300) continue;
      const double t = cross2(v[i] - x, e) / denom;
      const double u = cross2(v[i] - x, dir) / denom;
      if (t > 0 && u >= -1e-14 && u <= 1.0 + 1e-14) best = std::min(best, t);
    }
    return best;
  };
  auto angular = [&](const P2& x) {
    std::vector<double> cuts;
    for (const auto& p : v) cuts.push_back(std::atan2((p - x).y(), (p - x).x()));
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(cuts.front() + 2.0 * std::numbers::pi);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      // Steep layers near the piece ends when x is close to an edge.
      sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double th) {
            const double r = boundary_distance(x, P2(std::cos(th), std::sin(th)));
            return std::exp(-alpha * r * r) / (2.0 * alpha);
          },
          cuts[k], cuts[k + 1], 15, 1e-11);
    }
    return sum;
  };
  // Outer integral: the angular integrand is direction-dependent near every
  // polygon vertex, so split P into triangles (v_k, m, c) with the vertex as a
  // collapsed apex; c is the vertex average and m an adjacent edge midpoint.
  P2 c = P2::Zero();
  for (const auto& p : v) c += p;
  c /= static_cast<double>(n);
  auto apex_triangle = [&](const P2& p0, const P2& p1, const P2& p2) {
    const double jac = std::abs(cross2(p1 - p0, p2 - p0));
    return gauss<double, 15>::integrate(
        [&](double u) {
          return gauss<double, 15>::integrate(
              [&](double t) { return angular(p0 + u * (p1 - p0) + u * t * (p2 - p1)) * u * jac; },
              0.0, 1.0);
        },
        0.0, 1.0);
  };
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const P2& p = v[k];
    const P2 next_mid = 0.5 * (p + v[(k + 1) % n]);
    const P2 prev_mid = 0.5 * (p + v[(k + n - 1) % n]);
    total += apex_triangle(p, next_mid, c) + apex_triangle(p, c, prev_mid);
  }
  return total;
}

}  // namespace oracle
