#pragma once

#include <array>
#include <span>
#include <vector>

#include <json.hpp>

#include "tileopt/density.hpp"
#include "tileopt/kernel.hpp"

namespace tileopt {

// Kernel values at every grid offset of a window, T[d] = K(B d / n), so that
// sums over pairs of grid points become discrete convolutions.
//
// For an unregularized fractional kernel the diagonal T[0] is infinite; the
// operator stores 0 there and refuses uses that need it (self-interaction).
class InteractionOperator {
 public:
  InteractionOperator(const GridSpec& spec, const Kernel& kernel);

  const GridSpec& spec() const { return spec_; }
  const Kernel& kernel() const { return kernel_; }
  bool singular_diagonal() const { return singular_; }
  double diagonal() const;  // K(0)

  // out[x] = sum_y K(x - y) values[y] over the window (diagonal included).
  void apply(std::span<const double> values, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> values) const;

  // sum_y K(x - y) over the window, per x.
  const std::vector<double>& row_sums() const { return row_sums_; }
  double max_row_sum() const;
  // w * sum_{z in B Z^N / n} K(z): the sample-lattice quadrature of ||K||_1.
  double discrete_l1() const;
  // sum over grid-lattice points y outside the window of K(x - y), per x.
  const std::vector<double>& exterior_sums() const;

 private:
  GridSpec spec_;
  Kernel kernel_;
  bool singular_ = false;
  std::array<int, 3> ext_{1, 1, 1};
  std::array<std::size_t, 3> tstride_{1, 1, 1};
  std::vector<double> table_;
  std::vector<double> row_sums_;
  double lattice_sum_ = 0.0;
  mutable std::vector<double> exterior_;
};

// The identity P = ||f||_1 ||K||_1 - J, evaluated with the discrete
// ||K||_1 of the sampling lattice so the identity holds exactly up to rounding.
struct EnergyBreakdown {
  double j_value = 0.0;
  double p_value = 0.0;
  double mass = 0.0;
  double kernel_l1 = 0.0;           // discrete (sample-lattice) norm
  double kernel_l1_analytic = 0.0;  // closed form
  double identity_residual = 0.0;

  nlohmann::json to_json() const;
};

struct SetPerimeter {
  double interior = 0.0;  // pairs inside the window
  double exterior = 0.0;  // complement points outside the window
  double value = 0.0;     // interior + exterior (exterior omitted when disabled)
  bool exterior_included = true;
  bool exterior_estimated = false;  // continuum tail estimate (non-integrable kernels)

  nlohmann::json to_json() const;
};

struct PotentialField {
  GridSpec spec;
  std::vector<double> values;
  double truncation_bound = 0.0;
};

struct OrbitPotentialSums {
  std::vector<double> sums;  // sum_g V(x + g), one per base point
  double truncation_bound = 0.0;
};

// w^2 sum_{x,y} f(x) f(y) K(x - y). Throws for unregularized fractional kernels.
double j_energy(const DensityField& f, const Kernel& k);
double j_energy(const DensityField& f, const InteractionOperator& op);

EnergyBreakdown p_energy(const DensityField& f, const Kernel& k);
EnergyBreakdown p_energy(const DensityField& f, const InteractionOperator& op);

// Nonlocal perimeter of the set {f = 1} of a binary field.
SetPerimeter per_k_set(const DensityField& indicator, const Kernel& k,
                       bool include_exterior = true);

PotentialField potential(const DensityField& f, const Kernel& k);
PotentialField potential(const DensityField& f, const InteractionOperator& op);
PotentialField potential(const DensityField& f, const Kernel& k, const PeriodizedKernel& pk);

// sum_{g in G} V(x + g) at every base point, through the periodized kernel.
OrbitPotentialSums orbit_potential_sums(const DensityField& f, const PeriodizedKernel& pk);

// 2 w^2 sum_y f(y) K(x - y): exact gradient of the discrete quadratic form.
std::vector<double> gradient_j(const DensityField& f, const Kernel& k);
std::vector<double> gradient_j(const DensityField& f, const InteractionOperator& op);

// Surrogate for decay of V at infinity: largest V over the window corners
// against V at the point closest to the origin.
struct DecayDiagnostic {
  double corner_max = 0.0;
  double center = 0.0;
  bool decays() const { return corner_max <= center; }
};
DecayDiagnostic decay_diagnostic(const PotentialField& v);

}  // namespace tileopt
