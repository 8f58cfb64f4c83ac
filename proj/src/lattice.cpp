#include "tileopt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tileopt/errors.hpp"

namespace tileopt {

namespace {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

void require_valid_dim(const Matrix& basis) {
  if (basis.rows() != basis.cols() || basis.cols() < 1 || basis.cols() > 3) {
    throw ValidationError("degenerate lattice: basis must be square with N in {1, 2, 3}");
  }
  if (!basis.allFinite()) throw ValidationError("degenerate lattice: non-finite basis entry");
}

// Visits every integer vector c with lo <= c <= hi (componentwise).
template <typename Fn>
void for_each_in_box(const Eigen::VectorXi& lo, const Eigen::VectorXi& hi, Fn&& fn) {
  const int n = static_cast<int>(lo.size());
  for (int i = 0; i < n; ++i) {
    if (lo[i] > hi[i]) return;
  }
  Eigen::VectorXi c = lo;
  while (true) {
    fn(c);
    int i = 0;
    for (; i < n; ++i) {
      if (++c[i] <= hi[i]) break;
      c[i] = lo[i];
    }
    if (i == n) return;
  }
}

// Coefficient box containing every c with |B c + x| <= radius.
void coefficient_box(const Lattice& lattice, const Vector& x, double radius,
                     Eigen::VectorXi& lo, Eigen::VectorXi& hi) {
  const int n = lattice.dim();
  const Matrix& inv = lattice.inverse();
  const Vector center = -(inv * x);
  lo.resize(n);
  hi.resize(n);
  for (int i = 0; i < n; ++i) {
    const double spread = radius * inv.row(i).norm();
    const double l = std::ceil(center[i] - spread - 1e-9);
    const double h = std::floor(center[i] + spread + 1e-9);
    if (std::abs(l) > 1e7 || std::abs(h) > 1e7) {
      throw NumericError("lattice enumeration box too large");
    }
    lo[i] = static_cast<int>(l);
    hi[i] = static_cast<int>(h);
  }
}

void normalize_sign(Matrix& basis, IntMatrix& u) {
  for (int j = 0; j < basis.cols(); ++j) {
    const double scale = basis.col(j).norm();
    for (int i = 0; i < basis.rows(); ++i) {
      if (std::abs(basis(i, j)) > 1e-14 * scale) {
        if (basis(i, j) < 0) {
          basis.col(j) *= -1.0;
          u.col(j) *= -1;
        }
        break;
      }
    }
  }
}

long long round_to_ll(double v) {
  if (!std::isfinite(v) || std::abs(v) > 1e15) throw NumericError("reduction diverged");
  return std::llround(v);
}

// Integer combination of the columns of `span` closest to `target`, searching
// the unit neighbourhood of the rounded least-squares coefficients.
Eigen::VectorXi closest_combination(const Matrix& span, const Vector& target) {
  const int k = static_cast<int>(span.cols());
  const Vector y = (span.transpose() * span).ldlt().solve(span.transpose() * target);
  Eigen::VectorXi base(k);
  for (int i = 0; i < k; ++i) base[i] = static_cast<int>(round_to_ll(y[i]));
  Eigen::VectorXi best = base;
  double best_norm = (target - span * base.cast<double>()).squaredNorm();
  const Eigen::VectorXi lo = base.array() - 1;
  const Eigen::VectorXi hi = base.array() + 1;
  for_each_in_box(lo, hi, [&](const Eigen::VectorXi& c) {
    const double d = (target - span * c.cast<double>()).squaredNorm();
    if (d < best_norm - 1e-15 * best_norm) {
      best_norm = d;
      best = c;
    }
  });
  return best;
}

}  // namespace

double covolume(const Matrix& basis) {
  require_valid_dim(basis);
  const double det = std::abs(basis.determinant());
  const double scale = basis.colwise().norm().prod();
  if (!(det > 1e-14 * scale)) throw ValidationError("degenerate lattice");
  return det;
}

Lattice::Lattice(Matrix basis) : basis_(std::move(basis)) {
  covolume_ = tileopt::covolume(basis_);
  inverse_ = basis_.inverse();
}

Lattice Lattice::integer(int dim) { return Lattice(Matrix::Identity(dim, dim)); }

Lattice Lattice::hexagonal(double spacing) {
  Matrix b(2, 2);
  b << spacing, 0.5 * spacing, 0.0, 0.5 * std::sqrt(3.0) * spacing;
  return Lattice(b);
}

Vector Lattice::point(const Eigen::VectorXi& coeffs) const {
  return basis_ * coeffs.cast<double>();
}

Lattice Lattice::scaled(double factor) const { return Lattice(basis_ * factor); }

double Lattice::cell_diameter() const {
  const int n = dim();
  double best = 0.0;
  Eigen::VectorXi lo = Eigen::VectorXi::Constant(n, -1);
  Eigen::VectorXi hi = Eigen::VectorXi::Constant(n, 1);
  for_each_in_box(lo, hi, [&](const Eigen::VectorXi& s) {
    if ((s.array() == 0).any()) return;
    best = std::max(best, (basis_ * s.cast<double>()).norm());
  });
  return best;
}

double reduction_product_constant(int dim) {
  switch (dim) {
    case 1:
      return 1.0;
    case 2:
      return 2.0 / std::sqrt(3.0);
    case 3:
      return 2.0;
    default:
      throw ValidationError("unsupported dimension");
  }
}

Lattice reduce(const Lattice& lattice) {
  const int n = lattice.dim();
  const Matrix& b0 = lattice.basis();
  IntMatrix u = IntMatrix::Identity(n, n);
  auto current = [&]() -> Matrix { return b0 * u.cast<double>(); };

  if (n == 2) {
    Matrix b = current();
    if (b.col(0).squaredNorm() > b.col(1).squaredNorm()) {
      u.col(0).swap(u.col(1));
      b = current();
    }
    for (int iter = 0; iter < 10000; ++iter) {
      const double mu = b.col(0).dot(b.col(1)) / b.col(0).squaredNorm();
      const long long r = round_to_ll(mu);
      if (r != 0) {
        u.col(1) -= r * u.col(0);
        b = current();
      }
      if (b.col(1).squaredNorm() < b.col(0).squaredNorm() * (1.0 - 1e-14)) {
        u.col(0).swap(u.col(1));
        b = current();
        continue;
      }
      break;
    }
  } else if (n == 3) {
    auto order_by_length = [&]() {
      Matrix b = current();
      std::vector<int> idx{0, 1, 2};
      std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
        return b.col(i).squaredNorm() < b.col(j).squaredNorm();
      });
      IntMatrix sorted(n, n);
      for (int j = 0; j < n; ++j) sorted.col(j) = u.col(idx[j]);
      u = sorted;
    };
    order_by_length();
    int k = 1;
    for (int iter = 0; iter < 10000 && k < n; ++iter) {
      Matrix b = current();
      const Matrix span = b.leftCols(k);
      const Eigen::VectorXi c = closest_combination(span, b.col(k));
      for (int i = 0; i < k; ++i) u.col(k) -= static_cast<long long>(c[i]) * u.col(i);
      b = current();
      const double len = b.col(k).squaredNorm();
      int pos = k;
      while (pos > 0 && len < b.col(pos - 1).squaredNorm() * (1.0 - 1e-14)) --pos;
      if (pos < k) {
        Eigen::Matrix<long long, Eigen::Dynamic, 1> moved = u.col(k);
        for (int j = k; j > pos; --j) u.col(j) = u.col(j - 1);
        u.col(pos) = moved;
        k = std::max(1, pos);
      } else {
        ++k;
      }
    }
  }

  Matrix reduced = current();
  normalize_sign(reduced, u);
  return Lattice(reduced);
}

std::vector<Vector> lattice_shifts_near(const Lattice& lattice, const Vector& x, double radius) {
  Eigen::VectorXi lo, hi;
  coefficient_box(lattice, x, radius, lo, hi);
  std::vector<std::pair<Eigen::VectorXi, Vector>> found;
  const double r2 = radius * radius * (1.0 + 1e-12);
  for_each_in_box(lo, hi, [&](const Eigen::VectorXi& c) {
    Vector g = lattice.point(c);
    if ((g + x).squaredNorm() <= r2) found.emplace_back(c, std::move(g));
  });
  std::stable_sort(found.begin(), found.end(), [&](const auto& p, const auto& q) {
    const double np = (p.second + x).squaredNorm();
    const double nq = (q.second + x).squaredNorm();
    if (np != nq) return np < nq;
    return std::lexicographical_compare(p.first.begin(), p.first.end(), q.first.begin(),
                                        q.first.end());
  });
  std::vector<Vector> out;
  out.reserve(found.size());
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

std::vector<Vector> lattice_points_in_ball(const Lattice& lattice, double radius) {
  return lattice_shifts_near(lattice, Vector::Zero(lattice.dim()), radius);
}

double min_distance(const Lattice& lattice) {
  const Lattice r = reduce(lattice);
  const double bound = r.generator(0).norm();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : lattice_points_in_ball(r, bound)) {
    const double len = g.norm();
    if (len > 0.0) best = std::min(best, len);
  }
  return best;
}

double distance_to_lattice(const Lattice& lattice, const Vector& x) {
  const Lattice r = reduce(lattice);
  double reach = 0.0;
  for (int i = 0; i < r.dim(); ++i) reach += 0.5 * r.generator(i).norm();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : lattice_shifts_near(r, -x, reach)) best = std::min(best, (g - x).norm());
  return best;
}

Interval voronoi_cell_1d(const Lattice& lattice) {
  if (lattice.dim() != 1) throw ValidationError("voronoi_cell_1d needs a 1D lattice");
  const double half = 0.5 * std::abs(lattice.basis()(0, 0));
  return {-half, half};
}

Polygon voronoi_cell_2d(const Lattice& lattice) {
  if (lattice.dim() != 2) throw ValidationError("voronoi_cell_2d needs a 2D lattice");
  const Lattice r = reduce(lattice);
  const double longest = std::max(r.generator(0).norm(), r.generator(1).norm());
  const double cutoff = 2.0 * longest;
  std::vector<Point2> poly{{-cutoff, -cutoff}, {cutoff, -cutoff}, {cutoff, cutoff},
                           {-cutoff, cutoff}};
  for (const auto& g : lattice_points_in_ball(r, cutoff)) {
    const double len2 = g.squaredNorm();
    if (len2 == 0.0) continue;
    poly = clip_half_plane(poly, Point2(g[0], g[1]), 0.5 * len2);
  }
  return Polygon(std::move(poly)).simplified(1e-12);
}

std::variant<Interval, Polygon> voronoi_cell(const Lattice& lattice) {
  if (lattice.dim() == 1) return voronoi_cell_1d(lattice);
  if (lattice.dim() == 2) return voronoi_cell_2d(lattice);
  throw ValidationError("Voronoi cells are supported for N in {1, 2}");
}

double kuratowski_distance(const Lattice& g1, const Lattice& g2, double radius) {
  if (!(radius > 0)) throw ValidationError("radius must be positive");
  if (g1.dim() != g2.dim()) throw ValidationError("lattices of different dimension");
  double worst = 0.0;
  for (const auto& p : lattice_points_in_ball(g1, radius)) {
    worst = std::max(worst, distance_to_lattice(g2, p));
  }
  for (const auto& q : lattice_points_in_ball(g2, radius)) {
    worst = std::max(worst, distance_to_lattice(g1, q));
  }
  return worst;
}

Lattice ModuliPoint2D::lattice() const {
  Matrix basis(2, 2);
  basis << a, b, 0.0, m / a;
  return Lattice(basis);
}

bool ModuliPoint2D::in_reduced_cell(double tol) const {
  if (!(a > 0) || !(m > 0)) return false;
  const double h = m / a;
  return b >= -tol * a && b <= 0.5 * a * (1.0 + tol) && a * a <= (b * b + h * h) * (1.0 + tol);
}

ModuliPoint2D ModuliPoint2D::square(double m) { return {std::sqrt(m), 0.0, m}; }

ModuliPoint2D ModuliPoint2D::hexagonal(double m) {
  const double a = std::sqrt(2.0 * m / std::sqrt(3.0));
  return {a, 0.5 * a, m};
}

double moduli_a_max(double m, double beta) {
  return std::pow(m * m / (1.0 - beta * beta), 0.25);
}

double moduli_a_floor(double m) { return 0.6 * std::sqrt(m); }

std::vector<ModuliPoint2D> moduli_grid(double m, int steps) {
  if (!(m > 0)) throw ValidationError("covolume m must be positive");
  if (steps < 1) throw ValidationError("moduli grid needs steps >= 1");
  std::vector<ModuliPoint2D> grid;
  const double floor = moduli_a_floor(m);
  for (int i = 0; i <= steps; ++i) {
    const double beta = 0.5 * i / steps;
    const double top = moduli_a_max(m, beta);
    for (int j = 0; j <= steps; ++j) {
      if (j == steps && i == 0) {
        grid.push_back(ModuliPoint2D::square(m));
      } else if (j == steps && i == steps) {
        grid.push_back(ModuliPoint2D::hexagonal(m));
      } else {
        const double a = floor + (top - floor) * j / steps;
        grid.push_back({a, beta * a, m});
      }
    }
  }
  return grid;
}

double moduli_distance(const ModuliPoint2D& p, const ModuliPoint2D& q) {
  const double sp = std::sqrt(p.m);
  const double sq = std::sqrt(q.m);
  return std::hypot(p.a / sp - q.a / sq, p.b / sp - q.b / sq);
}

nlohmann::json to_json(const Lattice& lattice) {
  nlohmann::json basis = nlohmann::json::array();
  for (int j = 0; j < lattice.dim(); ++j) {
    nlohmann::json col = nlohmann::json::array();
    for (int i = 0; i < lattice.dim(); ++i) col.push_back(lattice.basis()(i, j));
    basis.push_back(col);
  }
  return {{"dim", lattice.dim()}, {"basis", basis}};
}

Lattice lattice_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const auto& cols = j.at("basis");
    if (dim < 1 || dim > 3 || static_cast<int>(cols.size()) != dim) {
      throw ValidationError("lattice JSON: basis must hold `dim` vectors");
    }
    Matrix basis(dim, dim);
    for (int c = 0; c < dim; ++c) {
      if (static_cast<int>(cols[c].size()) != dim) {
        throw ValidationError("lattice JSON: basis vector has wrong length");
      }
      for (int r = 0; r < dim; ++r) basis(r, c) = cols[c][r].get<double>();
    }
    return Lattice(basis);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("lattice JSON: ") + e.what());
  }
}

}  // namespace tileopt
