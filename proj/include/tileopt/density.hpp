#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "tileopt/lattice.hpp"

namespace tileopt {

// Sampling of a window made of (2R+1)^N lattice translates of the fundamental
// parallelotope, n cell-centred samples per axis and translate.
//
// A grid point is addressed by its window coordinates k in [0, (2R+1) n)^N,
// with lattice coordinates u = (k - R n + 1/2) / n and position x = B u.
// Points sharing k mod n form an orbit: the lattice translates of one base point.
class GridSpec {
 public:
  GridSpec(Lattice lattice, int samples_per_axis, int window_hops);

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  int samples_per_axis() const { return n_; }
  int window_hops() const { return hops_; }
  int extent() const { return extent_; }  // (2R + 1) n points per axis

  std::size_t size() const { return size_; }
  std::size_t orbit_count() const { return orbit_count_; }
  std::size_t orbit_size() const { return orbit_size_; }
  double weight() const { return weight_; }  // covolume / n^N
  double window_measure() const;
  // Largest |x| over the window parallelotope.
  double window_circumradius() const;

  std::array<int, 3> coords(std::size_t flat) const;
  std::size_t flat(const std::array<int, 3>& k) const;
  std::size_t orbit_of(std::size_t flat) const;
  // Flat indices of the orbit members, in increasing order.
  const std::vector<std::size_t>& orbit(std::size_t orbit_id) const { return orbits_[orbit_id]; }
  // Flat index of base point `orbit_id` in the central translate.
  std::size_t central_point(std::size_t orbit_id) const;

  Vector lattice_coords(std::size_t flat) const;
  Vector position(std::size_t flat) const;
  // Lattice spanned by the sample spacing B / n.
  Lattice sample_lattice() const;

  nlohmann::json to_json() const;
  static GridSpec from_json(const nlohmann::json& j);

 private:
  Lattice lattice_;
  int n_;
  int hops_;
  int extent_;
  std::size_t size_;
  std::size_t orbit_count_;
  std::size_t orbit_size_;
  double weight_;
  std::array<std::size_t, 3> stride_{};
  std::vector<std::vector<std::size_t>> orbits_;
};

enum class ConstraintMode { exact, relaxed };

std::string to_string(ConstraintMode mode);

inline constexpr double kConstraintTol = 1e-12;
inline constexpr double kBinarityTol = 1e-6;

// Discrete fundamental density on a grid window. Exact mode enforces unit orbit
// sums (the periodization of f is 1); relaxed mode enforces orbit sums <= 1.
class DensityField {
 public:
  DensityField(GridSpec spec, std::vector<double> values, ConstraintMode mode);

  static DensityField zeros(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  ConstraintMode mode() const { return mode_; }

  double mass() const;  // w * sum of values, fixed summation order
  // Throws NumericError naming the violated invariant.
  void validate(double tol = kConstraintTol) const;
  bool is_valid(double tol = kConstraintTol) const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
  ConstraintMode mode_;
};

// 1 on the central translate, 0 elsewhere.
DensityField indicator_of_cell(const GridSpec& spec);
// 1 on the orbit member nearest the origin (the Voronoi cell), ties to the smallest index.
DensityField voronoi_indicator(const GridSpec& spec);
// 1/k on every orbit of size k.
DensityField uniform_field(const GridSpec& spec);

// Euclidean projection onto the capped simplex {v in [0,1]^k : sum v = 1}.
std::vector<double> project_exact(std::span<const double> values);
void project_exact_inplace(std::span<double> values);

// Sum of f over the orbit of base point `base_point_index` in [0, n^N).
double periodization(const DensityField& f, std::size_t base_point_index);

// Per orbit: 1 at the largest value (ties to the smallest flat index), 0 elsewhere.
DensityField threshold(const DensityField& f);

// w * #{x : tol < f(x) < 1 - tol}.
double binarity_deficit(const DensityField& f, double tol = kBinarityTol);

// max |x| over points with f(x) > tol; 0 for an empty support.
double support_radius(const DensityField& f, double tol = kBinarityTol);

// CSV dump: a "# {GridSpec JSON}" header line, a column line, then one row per
// grid point with x coordinates, value and orbit id. Values use the shortest
// round-trip decimal form.
void write_density_csv(std::ostream& out, const DensityField& f);
DensityField read_density_csv(std::istream& in);

std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace tileopt
