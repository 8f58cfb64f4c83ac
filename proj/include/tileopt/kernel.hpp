#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileopt/lattice.hpp"

namespace tileopt {

enum class KernelFamily { fractional, gaussian, exponential, indicator, table };

std::string to_string(KernelFamily family);

// Outcome of checking the strict clause liminf_{z->0+} [K(z) - K(z + x)] > 0.
enum class ClauseStatus { holds, fails, unverified };

std::string to_string(ClauseStatus status);

struct AssumptionReport {
  bool satisfies_frac = false;      // K >= C |h|^{-N-s} with min(1,|h|) K integrable
  bool integrable = false;          // K in L^1 with positive norm
  ClauseStatus strict_clause = ClauseStatus::unverified;
  bool strictly_decreasing = false;  // radial profile strictly decreasing on its support
  std::string message;

  bool satisfies_int() const { return integrable && strict_clause == ClauseStatus::holds; }
};

// Radial, symmetric, nonnegative interaction kernel on R^N.
//
//   fractional   K(h) = C |h|^{-N-s}, optionally clamped at radius delta
//   gaussian     K(h) = exp(-alpha |h|^2)
//   exponential  K(h) = exp(-beta |h|)
//   indicator    K(h) = 1 for |h| <= r, else 0
//   table        linear interpolation of samples at radii 0, dr, 2 dr, ...; 0 beyond
class Kernel {
 public:
  static Kernel fractional(double c, double s, int dim);
  static Kernel gaussian(double alpha, int dim);
  static Kernel exponential(double beta, int dim);
  static Kernel indicator(double radius, int dim);
  static Kernel table(std::vector<double> samples, double step, int dim);

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& samples() const { return samples_; }
  // Clamp radius of a regularized fractional kernel; 0 when unregularized.
  double delta() const { return delta_; }
  bool regularized() const { return delta_ > 0.0; }

  // Radial profile K(r). Throws for an unregularized fractional kernel at r = 0.
  double profile(double r) const;
  double operator()(const Vector& h) const { return profile(h.norm()); }

  bool integrable() const;
  // +infinity for unregularized fractional kernels.
  double l1_norm() const;
  // Radius beyond which K vanishes; +infinity if not compactly supported.
  double support_radius() const;

  // Closed-form radial moments: int_a^inf K(u) u^k du, k in {0, 1, 2}.
  double tail_moment(double a, int k) const;
  // omega_N int_a^inf K(u) (u + c)^{N-1} du, where omega_N is the area of the
  // unit sphere in R^N (2 for N = 1).
  double radial_tail(double a, double c = 0.0) const;
  // int_r^inf K(t) t dt: mass of the 2D kernel outside a disc, per radian.
  double polar_tail(double r) const;

  nlohmann::json to_json() const;

 private:
  KernelFamily family_ = KernelFamily::gaussian;
  int dim_ = 2;
  std::vector<double> params_;   // family-specific: (C, s) / (alpha) / (beta) / (r) / (dr)
  std::vector<double> samples_;  // table kernels only
  double delta_ = 0.0;

  friend Kernel regularize_fractional(const Kernel& k, double delta);
};

double unit_sphere_area(int dim);

// K_delta(h) = min(K(h), K(delta e_1)) for a fractional kernel.
Kernel regularize_fractional(const Kernel& k, double delta);

AssumptionReport check_assumptions(const Kernel& k);

// Lattice periodization sum_{g in G, |x + g| <= cutoff} K(x + g).
//
// For radially nonincreasing K the omitted terms satisfy
//   sum_{|x+g| > R} K(x + g) <= (1/m) omega_N int_{R - d}^inf K(u) (u + d/2)^{N-1} du
// where d is the diameter of the fundamental parallelotope and m the covolume:
// each omitted term is dominated by the average of K(|y| - d/2) over its own
// translate of the cell. Compactly supported kernels have an exact zero tail
// once R reaches the support radius.
class PeriodizedKernel {
 public:
  PeriodizedKernel(Kernel kernel, Lattice lattice, double cutoff_radius);

  const Kernel& kernel() const { return kernel_; }
  const Lattice& lattice() const { return lattice_; }
  double cutoff_radius() const { return cutoff_; }
  double tail_bound() const { return tail_bound_; }
  std::size_t term_count() const { return shifts_.size(); }

  double operator()(const Vector& x) const;

  static double tail_bound_for(const Kernel& k, const Lattice& lattice, double cutoff);

 private:
  Kernel kernel_;
  Lattice lattice_;
  double cutoff_;
  double tail_bound_;
  std::vector<Vector> shifts_;  // lattice points near the origin, covering the cutoff
  double reach_;                // cutoff plus the reduced-cell reach
};

// Smallest cutoff whose tail bound is at most `tail_tolerance`.
PeriodizedKernel periodize(const Kernel& k, const Lattice& lattice, double tail_tolerance);

}  // namespace tileopt
