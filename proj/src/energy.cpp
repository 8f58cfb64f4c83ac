#include "tileopt/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tileopt/errors.hpp"
#include "tileopt/parallel.hpp"

namespace tileopt {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Calls fn(c, z) for integer vectors c with |B c| <= radius, z = B c.
template <typename Fn>
void for_each_point(const Lattice& lattice, double radius, Fn&& fn) {
  const int dim = lattice.dim();
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const double spread = radius * lattice.inverse().row(a).norm();
    lo[a] = static_cast<int>(std::floor(-spread));
    hi[a] = static_cast<int>(std::ceil(spread));
  }
  const double r2 = radius * radius;
  Vector z(dim);
  std::array<int, 3> c{0, 0, 0};
  for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2]) {
    for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1]) {
      for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0]) {
        z.setZero();
        for (int a = 0; a < dim; ++a) z += lattice.basis().col(a) * c[a];
        if (z.squaredNorm() <= r2) fn(c, z);
      }
    }
  }
}

double cutoff_for_tail(const Kernel& k, const Lattice& lattice, double tolerance) {
  if (std::isfinite(k.support_radius())) return k.support_radius();
  const double d = reduce(lattice).cell_diameter();
  double hi = d + 1.0;
  while (PeriodizedKernel::tail_bound_for(k, lattice, hi) > tolerance) {
    hi = d + 2.0 * (hi - d);
    if (hi > 1e6) throw NumericError("lattice sum cutoff diverged");
  }
  return hi;
}

void require_nonsingular(const InteractionOperator& op) {
  if (op.singular_diagonal()) {
    throw ValidationError(
        "density energies need an integrable kernel; regularize the fractional kernel "
        "(kernel.delta) first");
  }
}

}  // namespace

InteractionOperator::InteractionOperator(const GridSpec& spec, const Kernel& kernel)
    : spec_(spec), kernel_(kernel) {
  if (kernel_.dim() != spec_.dim()) throw ValidationError("kernel/lattice dimension mismatch");
  singular_ = !kernel_.integrable();
  const int dim = spec_.dim();
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    ext_[a] = a < dim ? spec_.extent() : 1;
    tstride_[a] = total;
    total *= static_cast<std::size_t>(2 * ext_[a] - 1);
  }
  table_.assign(total, 0.0);
  const Matrix step = spec_.lattice().basis() / static_cast<double>(spec_.samples_per_axis());
  Vector d(dim);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    bool zero = true;
    for (int a = 0; a < dim; ++a) {
      const std::size_t span = static_cast<std::size_t>(2 * ext_[a] - 1);
      d[a] = static_cast<double>(static_cast<int>(rest % span) - (ext_[a] - 1));
      zero = zero && d[a] == 0.0;
      rest /= span;
    }
    if (zero && singular_) continue;
    table_[idx] = kernel_.profile((step * d).norm());
  }

  row_sums_.assign(spec_.size(), 0.0);
  const std::vector<double> ones(spec_.size(), 1.0);
  apply(ones, row_sums_);

  if (!singular_) {
    const Lattice sample = spec_.sample_lattice();
    const double scale = kernel_.l1_norm() / spec_.weight();
    const double cutoff = cutoff_for_tail(kernel_, sample, 1e-17 * scale);
    CompensatedSum sum;
    for_each_point(reduce(sample), cutoff, [&](const auto&, const Vector& z) {
      sum.add(kernel_.profile(z.norm()));
    });
    lattice_sum_ = sum.value();
  }
}

double InteractionOperator::diagonal() const {
  if (singular_) return std::numeric_limits<double>::infinity();
  return kernel_.profile(0.0);
}

void InteractionOperator::apply(std::span<const double> values, std::span<double> out) const {
  if (values.size() != spec_.size() || out.size() != spec_.size()) {
    throw ValidationError("operator applied to a field of the wrong size");
  }
  const int e0 = ext_[0];
  const int e1 = ext_[1];
  const int e2 = ext_[2];
  const double* table = table_.data();
  const double* f = values.data();
  parallel_for(spec_.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const int x0 = static_cast<int>(x % static_cast<std::size_t>(e0));
      const int x1 = static_cast<int>((x / static_cast<std::size_t>(e0)) % static_cast<std::size_t>(e1));
      const int x2 = static_cast<int>(x / (static_cast<std::size_t>(e0) * static_cast<std::size_t>(e1)));
      double acc = 0.0;
      for (int y2 = 0; y2 < e2; ++y2) {
        for (int y1 = 0; y1 < e1; ++y1) {
          // T is symmetric, so T[y - x] walks forward as y0 increases.
          const double* trow = table + static_cast<std::size_t>(y2 - x2 + e2 - 1) * tstride_[2] +
                               static_cast<std::size_t>(y1 - x1 + e1 - 1) * tstride_[1] +
                               static_cast<std::size_t>(e0 - 1 - x0);
          const double* frow = f + (static_cast<std::size_t>(y2) * static_cast<std::size_t>(e1) +
                                    static_cast<std::size_t>(y1)) *
                                       static_cast<std::size_t>(e0);
          double row = 0.0;
          for (int y0 = 0; y0 < e0; ++y0) row += trow[y0] * frow[y0];
          acc += row;
        }
      }
      out[x] = acc;
    }
  });
}

std::vector<double> InteractionOperator::apply(std::span<const double> values) const {
  std::vector<double> out(spec_.size());
  apply(values, out);
  return out;
}

double InteractionOperator::max_row_sum() const {
  return *std::max_element(row_sums_.begin(), row_sums_.end());
}

double InteractionOperator::discrete_l1() const {
  if (singular_) return std::numeric_limits<double>::infinity();
  return spec_.weight() * lattice_sum_;
}

const std::vector<double>& InteractionOperator::exterior_sums() const {
  if (!exterior_.empty()) return exterior_;
  exterior_.assign(spec_.size(), 0.0);
  if (!singular_) {
    for (std::size_t x = 0; x < spec_.size(); ++x) {
      exterior_[x] = std::max(0.0, lattice_sum_ - row_sums_[x]);
    }
    return exterior_;
  }
  // Direct enumeration of grid-lattice points outside the window, plus the
  // continuum estimate of everything beyond the cutoff.
  const Lattice sample = spec_.sample_lattice();
  const double cutoff = 4.0 * spec_.window_circumradius() + sample.cell_diameter();
  const double beyond = kernel_.radial_tail(cutoff) / spec_.weight();
  const int dim = spec_.dim();
  const int e = spec_.extent();
  parallel_for(spec_.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const auto k = spec_.coords(x);
      CompensatedSum sum;
      for_each_point(sample, cutoff, [&](const std::array<int, 3>& c, const Vector& z) {
        bool inside = true;
        for (int a = 0; a < dim; ++a) {
          const int ky = k[a] + c[a];
          inside = inside && ky >= 0 && ky < e;
        }
        if (!inside) sum.add(kernel_.profile(z.norm()));
      });
      exterior_[x] = sum.value() + beyond;
    }
  });
  return exterior_;
}

nlohmann::json EnergyBreakdown::to_json() const {
  return {{"j_value", j_value},
          {"p_value", p_value},
          {"mass", mass},
          {"kernel_l1", kernel_l1},
          {"kernel_l1_analytic", kernel_l1_analytic},
          {"identity_residual", identity_residual}};
}

nlohmann::json SetPerimeter::to_json() const {
  return {{"interior", interior},
          {"exterior", exterior},
          {"value", value},
          {"exterior_included", exterior_included},
          {"exterior_estimated", exterior_estimated}};
}

double j_energy(const DensityField& f, const InteractionOperator& op) {
  require_nonsingular(op);
  const std::vector<double> u = op.apply(f.values());
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += f[i] * u[i];
  const double w = f.spec().weight();
  return w * w * sum;
}

double j_energy(const DensityField& f, const Kernel& k) {
  return j_energy(f, InteractionOperator(f.spec(), k));
}

EnergyBreakdown p_energy(const DensityField& f, const InteractionOperator& op) {
  require_nonsingular(op);
  const double w = f.spec().weight();
  std::vector<double> complement(f.spec().size());
  for (std::size_t i = 0; i < complement.size(); ++i) complement[i] = 1.0 - f[i];
  const std::vector<double> u = op.apply(complement);
  const std::vector<double>& ext = op.exterior_sums();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += f[i] * (u[i] + ext[i]);

  EnergyBreakdown e;
  e.p_value = w * w * sum;
  e.j_value = j_energy(f, op);
  e.mass = f.mass();
  e.kernel_l1 = op.discrete_l1();
  e.kernel_l1_analytic = op.kernel().l1_norm();
  e.identity_residual = std::abs(e.p_value - (e.mass * e.kernel_l1 - e.j_value));
  return e;
}

EnergyBreakdown p_energy(const DensityField& f, const Kernel& k) {
  return p_energy(f, InteractionOperator(f.spec(), k));
}

SetPerimeter per_k_set(const DensityField& indicator, const Kernel& k, bool include_exterior) {
  for (double v : indicator.values()) {
    if (v != 0.0 && v != 1.0) throw ValidationError("per_k_set needs a binary field");
  }
  const InteractionOperator op(indicator.spec(), k);
  const double w = indicator.spec().weight();
  std::vector<double> complement(indicator.spec().size());
  for (std::size_t i = 0; i < complement.size(); ++i) complement[i] = 1.0 - indicator[i];
  const std::vector<double> u = op.apply(complement);
  double interior = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) interior += indicator[i] * u[i];

  SetPerimeter out;
  out.interior = w * w * interior;
  out.exterior_included = include_exterior;
  out.exterior_estimated = op.singular_diagonal();
  if (include_exterior) {
    const std::vector<double>& ext = op.exterior_sums();
    double exterior = 0.0;
    for (std::size_t i = 0; i < ext.size(); ++i) exterior += indicator[i] * ext[i];
    out.exterior = w * w * exterior;
  }
  out.value = out.interior + out.exterior;
  return out;
}

PotentialField potential(const DensityField& f, const InteractionOperator& op) {
  require_nonsingular(op);
  PotentialField v{f.spec(), op.apply(f.values()), 0.0};
  for (double& x : v.values) x *= f.spec().weight();
  return v;
}

PotentialField potential(const DensityField& f, const Kernel& k) {
  return potential(f, InteractionOperator(f.spec(), k));
}

PotentialField potential(const DensityField& f, const Kernel& k, const PeriodizedKernel& pk) {
  PotentialField v = potential(f, k);
  v.truncation_bound = f.mass() * pk.tail_bound();
  return v;
}

OrbitPotentialSums orbit_potential_sums(const DensityField& f, const PeriodizedKernel& pk) {
  const GridSpec& spec = f.spec();
  const int dim = spec.dim();
  const int n = spec.samples_per_axis();
  const std::size_t count = spec.orbit_count();
  // pk is G-periodic, so pk(x_j - y) only depends on (j - k_y) mod n.
  std::vector<double> table(count);
  for (std::size_t r = 0; r < count; ++r) {
    Vector u(dim);
    std::size_t rest = r;
    for (int a = 0; a < dim; ++a) {
      u[a] = static_cast<double>(rest % static_cast<std::size_t>(n)) / n;
      rest /= static_cast<std::size_t>(n);
    }
    table[r] = pk(spec.lattice().basis() * u);
  }
  OrbitPotentialSums out;
  out.sums.assign(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const auto kj = spec.coords(spec.central_point(j));
    double sum = 0.0;
    for (std::size_t y = 0; y < spec.size(); ++y) {
      if (f[y] == 0.0) continue;
      const auto ky = spec.coords(y);
      std::size_t r = 0;
      std::size_t mul = 1;
      for (int a = 0; a < dim; ++a) {
        const int diff = ((kj[a] - ky[a]) % n + n) % n;
        r += mul * static_cast<std::size_t>(diff);
        mul *= static_cast<std::size_t>(n);
      }
      sum += f[y] * table[r];
    }
    out.sums[j] = spec.weight() * sum;
  }
  out.truncation_bound = f.mass() * pk.tail_bound();
  return out;
}

std::vector<double> gradient_j(const DensityField& f, const InteractionOperator& op) {
  require_nonsingular(op);
  std::vector<double> g = op.apply(f.values());
  const double w = f.spec().weight();
  for (double& x : g) x *= 2.0 * w * w;
  return g;
}

std::vector<double> gradient_j(const DensityField& f, const Kernel& k) {
  return gradient_j(f, InteractionOperator(f.spec(), k));
}

DecayDiagnostic decay_diagnostic(const PotentialField& v) {
  const GridSpec& spec = v.spec;
  const int e = spec.extent();
  DecayDiagnostic d;
  std::size_t nearest = 0;
  double nearest_norm = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double r = spec.position(i).norm();
    if (r < nearest_norm) {
      nearest_norm = r;
      nearest = i;
    }
    const auto k = spec.coords(i);
    bool corner = true;
    for (int a = 0; a < spec.dim(); ++a) corner = corner && (k[a] == 0 || k[a] == e - 1);
    if (corner) d.corner_max = std::max(d.corner_max, v.values[i]);
  }
  d.center = v.values[nearest];
  return d;
}

}  // namespace tileopt
