#include "tileopt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tileopt/errors.hpp"

namespace tileopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(int dim) {
  if (dim < 1 || dim > 3) throw ValidationError("kernel dimension must be 1, 2 or 3");
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + " must be positive and finite");
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// int_lo^hi f(u) u^k du for f linear on [lo, hi], 3-point Gauss (exact for degree <= 5).
double linear_segment_moment(double lo, double hi, double f_lo, double f_hi, int k) {
  static const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double u = mid + half * nodes[i];
    const double t = (hi > lo) ? (u - lo) / (hi - lo) : 0.0;
    sum += weights[i] * ((1.0 - t) * f_lo + t * f_hi) * std::pow(u, k);
  }
  return half * sum;
}

double table_moment(const std::vector<double>& samples, double step, double a, int k) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double lo = step * static_cast<double>(i);
    const double hi = step * static_cast<double>(i + 1);
    if (hi <= a) continue;
    const double start = std::max(lo, a);
    const double f_start = samples[i] + (samples[i + 1] - samples[i]) * (start - lo) / step;
    total += linear_segment_moment(start, hi, f_start, samples[i + 1], k);
  }
  return total;
}

std::vector<double> nonincreasing_envelope(std::vector<double> samples) {
  for (std::size_t i = samples.size(); i-- > 1;) {
    samples[i - 1] = std::max(samples[i - 1], samples[i]);
  }
  return samples;
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::fractional:
      return "fractional";
    case KernelFamily::gaussian:
      return "gaussian";
    case KernelFamily::exponential:
      return "exponential";
    case KernelFamily::indicator:
      return "indicator";
    case KernelFamily::table:
      return "table";
  }
  return "unknown";
}

std::string to_string(ClauseStatus status) {
  switch (status) {
    case ClauseStatus::holds:
      return "holds";
    case ClauseStatus::fails:
      return "fails";
    case ClauseStatus::unverified:
      return "unverified";
  }
  return "unknown";
}

double unit_sphere_area(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi;
    default:
      throw ValidationError("unsupported dimension");
  }
}

Kernel Kernel::fractional(double c, double s, int dim) {
  require_dim(dim);
  require_positive(c, "fractional constant C");
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("fractional order s must lie in (0, 1)");
  Kernel k;
  k.family_ = KernelFamily::fractional;
  k.dim_ = dim;
  k.params_ = {c, s};
  return k;
}

Kernel Kernel::gaussian(double alpha, int dim) {
  require_dim(dim);
  require_positive(alpha, "gaussian alpha");
  Kernel k;
  k.family_ = KernelFamily::gaussian;
  k.dim_ = dim;
  k.params_ = {alpha};
  return k;
}

Kernel Kernel::exponential(double beta, int dim) {
  require_dim(dim);
  require_positive(beta, "exponential beta");
  Kernel k;
  k.family_ = KernelFamily::exponential;
  k.dim_ = dim;
  k.params_ = {beta};
  return k;
}

Kernel Kernel::indicator(double radius, int dim) {
  require_dim(dim);
  require_positive(radius, "indicator radius");
  Kernel k;
  k.family_ = KernelFamily::indicator;
  k.dim_ = dim;
  k.params_ = {radius};
  return k;
}

Kernel Kernel::table(std::vector<double> samples, double step, int dim) {
  require_dim(dim);
  require_positive(step, "table step");
  if (samples.size() < 2) throw ValidationError("table kernel needs at least two samples");
  bool positive = false;
  for (double v : samples) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("table kernel samples must be finite and nonnegative");
    }
    positive = positive || v > 0.0;
  }
  if (!positive) throw ValidationError("table kernel must have a positive sample");
  Kernel k;
  k.family_ = KernelFamily::table;
  k.dim_ = dim;
  k.params_ = {step};
  k.samples_ = std::move(samples);
  return k;
}

double Kernel::profile(double r) const {
  r = std::abs(r);
  switch (family_) {
    case KernelFamily::fractional: {
      const double reff = std::max(r, delta_);
      if (reff == 0.0) throw ValidationError("fractional kernel is singular at origin");
      return params_[0] * std::pow(reff, -dim_ - params_[1]);
    }
    case KernelFamily::gaussian:
      return std::exp(-params_[0] * r * r);
    case KernelFamily::exponential:
      return std::exp(-params_[0] * r);
    case KernelFamily::indicator:
      return r <= params_[0] ? 1.0 : 0.0;
    case KernelFamily::table: {
      const double step = params_[0];
      const double pos = r / step;
      const std::size_t n = samples_.size();
      if (pos >= static_cast<double>(n - 1)) {
        return pos == static_cast<double>(n - 1) ? samples_.back() : 0.0;
      }
      const auto i = static_cast<std::size_t>(pos);
      const double t = pos - static_cast<double>(i);
      return (1.0 - t) * samples_[i] + t * samples_[i + 1];
    }
  }
  return 0.0;
}

bool Kernel::integrable() const {
  return !(family_ == KernelFamily::fractional && delta_ == 0.0);
}

double Kernel::l1_norm() const {
  if (!integrable()) return kInf;
  return unit_sphere_area(dim_) * tail_moment(0.0, dim_ - 1);
}

double Kernel::support_radius() const {
  if (family_ == KernelFamily::indicator) return params_[0];
  if (family_ == KernelFamily::table) {
    std::size_t last = samples_.size() - 1;
    while (last > 0 && samples_[last] == 0.0) --last;
    // Linear interpolation reaches zero at the next sample radius.
    return params_[0] * static_cast<double>(std::min(last + 1, samples_.size() - 1));
  }
  return kInf;
}

double Kernel::tail_moment(double a, int k) const {
  a = std::max(a, 0.0);
  switch (family_) {
    case KernelFamily::gaussian: {
      const double al = params_[0];
      const double m0 = 0.5 * std::sqrt(std::numbers::pi / al) * std::erfc(std::sqrt(al) * a);
      const double e = std::exp(-al * a * a);
      if (k == 0) return m0;
      if (k == 1) return e / (2.0 * al);
      return a * e / (2.0 * al) + m0 / (2.0 * al);
    }
    case KernelFamily::exponential: {
      const double b = params_[0];
      const double e = std::exp(-b * a);
      if (k == 0) return e / b;
      if (k == 1) return e * (a / b + 1.0 / (b * b));
      return e * (a * a / b + 2.0 * a / (b * b) + 2.0 / (b * b * b));
    }
    case KernelFamily::indicator: {
      const double r = params_[0];
      if (a >= r) return 0.0;
      return (std::pow(r, k + 1) - std::pow(a, k + 1)) / (k + 1);
    }
    case KernelFamily::table:
      return table_moment(samples_, params_[0], a, k);
    case KernelFamily::fractional: {
      const double c = params_[0];
      const double s = params_[1];
      const double expo = k - dim_ - s + 1.0;  // exponent after integration
      if (expo >= 0.0) return kInf;
      double total = 0.0;
      const double start = std::max(a, delta_);
      if (start == 0.0) return kInf;
      total += c * std::pow(start, expo) / (-expo);
      if (a < delta_) {
        total += c * std::pow(delta_, -dim_ - s) *
                 (std::pow(delta_, k + 1) - std::pow(a, k + 1)) / (k + 1);
      }
      return total;
    }
  }
  return 0.0;
}

double Kernel::radial_tail(double a, double c) const {
  if (a < 0.0) return kInf;
  double total = 0.0;
  for (int j = 0; j < dim_; ++j) {
    const double coeff = binomial(dim_ - 1, j) * std::pow(c, dim_ - 1 - j);
    double moment;
    if (family_ == KernelFamily::table) {
      moment = table_moment(nonincreasing_envelope(samples_), params_[0], a, j);
    } else {
      moment = tail_moment(a, j);
    }
    total += coeff * moment;
  }
  return unit_sphere_area(dim_) * total;
}

double Kernel::polar_tail(double r) const { return tail_moment(r, 1); }

nlohmann::json Kernel::to_json() const {
  nlohmann::json j{{"family", to_string(family_)}, {"dim", dim_}};
  switch (family_) {
    case KernelFamily::fractional:
      j["C"] = params_[0];
      j["s"] = params_[1];
      j["delta"] = delta_;
      break;
    case KernelFamily::gaussian:
      j["alpha"] = params_[0];
      break;
    case KernelFamily::exponential:
      j["beta"] = params_[0];
      break;
    case KernelFamily::indicator:
      j["radius"] = params_[0];
      break;
    case KernelFamily::table:
      j["step"] = params_[0];
      j["samples"] = samples_;
      break;
  }
  return j;
}

Kernel regularize_fractional(const Kernel& k, double delta) {
  if (k.family() != KernelFamily::fractional) {
    throw ValidationError("regularization applies to fractional kernels only");
  }
  require_positive(delta, "regularization delta");
  Kernel out = k;
  out.delta_ = delta;
  return out;
}

AssumptionReport check_assumptions(const Kernel& k) {
  AssumptionReport rep;
  rep.integrable = k.integrable() && k.l1_norm() > 0.0;
  switch (k.family()) {
    case KernelFamily::fractional:
      if (!k.regularized()) {
        rep.satisfies_frac = true;
        rep.strictly_decreasing = true;
        rep.strict_clause = ClauseStatus::holds;
        rep.message =
            "fractional lower bound holds: K(h) = C|h|^{-N-s} with C > 0 and s in (0, 1); K is not "
            "integrable, so the integrable-kernel condition does not apply";
      } else {
        rep.strict_clause = ClauseStatus::fails;
        rep.message =
            "regularized fractional kernel: integrable but constant on |h| < delta; the strict "
            "clause liminf [K(z) - K(z+x)] > 0 fails (locally constant around the origin), and "
            "the fractional lower bound fails near the origin";
      }
      break;
    case KernelFamily::gaussian:
    case KernelFamily::exponential:
      rep.strictly_decreasing = true;
      rep.strict_clause = ClauseStatus::holds;
      rep.message = "integrable-kernel condition holds: strictly decreasing radial profile";
      break;
    case KernelFamily::indicator:
      rep.strict_clause = ClauseStatus::fails;
      rep.message =
          "integrable, but the strict clause liminf [K(z) - K(z+x)] > 0 fails: the kernel is "
          "locally constant around the origin (K(z) = K(z+x) = 1 whenever |z|, |z+x| <= r)";
      break;
    case KernelFamily::table: {
      const auto& s = k.samples();
      std::size_t last = s.size() - 1;
      while (last > 0 && s[last] == 0.0) --last;
      bool decreasing = true;
      for (std::size_t i = 0; i < last; ++i) decreasing = decreasing && s[i] > s[i + 1];
      rep.strictly_decreasing = decreasing;
      if (decreasing) {
        rep.strict_clause = ClauseStatus::holds;
        rep.message = "integrable-kernel condition holds: tabulated profile strictly decreasing on its support";
      } else if (s[0] == s[1]) {
        rep.strict_clause = ClauseStatus::fails;
        rep.message =
            "strict clause liminf [K(z) - K(z+x)] > 0 fails: tabulated profile is locally "
            "constant around the origin";
      } else {
        rep.strict_clause = ClauseStatus::unverified;
        rep.message =
            "tabulated profile is not strictly decreasing; the strict clause is "
            "unverified";
      }
      break;
    }
  }
  return rep;
}

PeriodizedKernel::PeriodizedKernel(Kernel kernel, Lattice lattice, double cutoff_radius)
    : kernel_(std::move(kernel)),
      lattice_(reduce(lattice)),
      cutoff_(cutoff_radius),
      tail_bound_(tail_bound_for(kernel_, lattice_, cutoff_radius)) {
  if (!kernel_.integrable()) {
    throw ValidationError("periodization requires integrable kernel");
  }
  if (kernel_.dim() != lattice_.dim()) throw ValidationError("kernel/lattice dimension mismatch");
  double cell_reach = 0.0;
  for (int i = 0; i < lattice_.dim(); ++i) cell_reach += 0.5 * lattice_.generator(i).norm();
  reach_ = cutoff_ + cell_reach;
  shifts_ = lattice_points_in_ball(lattice_, reach_);
}

double PeriodizedKernel::tail_bound_for(const Kernel& k, const Lattice& lattice, double cutoff) {
  if (!k.integrable()) throw ValidationError("periodization requires integrable kernel");
  if (cutoff >= k.support_radius()) return 0.0;
  const double d = reduce(lattice).cell_diameter();
  return k.radial_tail(cutoff - d, 0.5 * d) / lattice.covolume();
}

double PeriodizedKernel::operator()(const Vector& x) const {
  // Shift x next to the origin; the sum is G-periodic.
  Vector c = lattice_.inverse() * x;
  for (int i = 0; i < c.size(); ++i) c[i] = std::round(c[i]);
  const Vector x0 = x - lattice_.basis() * c;
  const double r2 = cutoff_ * cutoff_;
  double sum = 0.0;
  for (const auto& g : shifts_) {
    const Vector y = x0 + g;
    const double n2 = y.squaredNorm();
    if (n2 <= r2) sum += kernel_.profile(std::sqrt(n2));
  }
  return sum;
}

PeriodizedKernel periodize(const Kernel& k, const Lattice& lattice, double tail_tolerance) {
  if (!k.integrable()) throw ValidationError("periodization requires integrable kernel");
  if (!(tail_tolerance > 0.0)) throw ValidationError("tail tolerance must be positive");
  if (std::isfinite(k.support_radius())) {
    return PeriodizedKernel(k, lattice, k.support_radius());
  }
  const double d = reduce(lattice).cell_diameter();
  double lo = d;
  double hi = d + 1.0;
  while (PeriodizedKernel::tail_bound_for(k, lattice, hi) > tail_tolerance) {
    lo = hi;
    hi = d + 2.0 * (hi - d);
    if (hi > 1e6) throw NumericError("periodization cutoff diverged");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (PeriodizedKernel::tail_bound_for(k, lattice, mid) > tail_tolerance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return PeriodizedKernel(k, lattice, hi);
}

}  // namespace tileopt
