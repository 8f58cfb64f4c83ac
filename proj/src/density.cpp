#include "tileopt/density.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tileopt/errors.hpp"

namespace tileopt {

GridSpec::GridSpec(Lattice lattice, int samples_per_axis, int window_hops)
    : lattice_(std::move(lattice)), n_(samples_per_axis), hops_(window_hops) {
  if (n_ < 1) throw ValidationError("grid.n must be a positive integer");
  if (hops_ < 0) throw ValidationError("grid.R must be a nonnegative integer");
  const int dim = lattice_.dim();
  extent_ = (2 * hops_ + 1) * n_;
  size_ = 1;
  orbit_count_ = 1;
  orbit_size_ = 1;
  for (int a = 0; a < dim; ++a) {
    stride_[a] = size_;
    size_ *= static_cast<std::size_t>(extent_);
    orbit_count_ *= static_cast<std::size_t>(n_);
    orbit_size_ *= static_cast<std::size_t>(2 * hops_ + 1);
  }
  if (size_ > 50'000'000) throw ValidationError("grid too large");
  weight_ = lattice_.covolume() / static_cast<double>(orbit_count_);
  orbits_.assign(orbit_count_, {});
  for (std::size_t i = 0; i < size_; ++i) orbits_[orbit_of(i)].push_back(i);
}

double GridSpec::window_measure() const {
  return static_cast<double>(orbit_size_) * lattice_.covolume();
}

double GridSpec::window_circumradius() const {
  const int dim = this->dim();
  double best = 0.0;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Vector u(dim);
    for (int a = 0; a < dim; ++a) u[a] = (mask >> a & 1) ? hops_ + 1.0 : -static_cast<double>(hops_);
    best = std::max(best, (lattice_.basis() * u).norm());
  }
  return best;
}

std::array<int, 3> GridSpec::coords(std::size_t flat) const {
  std::array<int, 3> k{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    k[a] = static_cast<int>(flat % static_cast<std::size_t>(extent_));
    flat /= static_cast<std::size_t>(extent_);
  }
  return k;
}

std::size_t GridSpec::flat(const std::array<int, 3>& k) const {
  std::size_t f = 0;
  for (int a = 0; a < dim(); ++a) f += stride_[a] * static_cast<std::size_t>(k[a]);
  return f;
}

std::size_t GridSpec::orbit_of(std::size_t flat) const {
  const auto k = coords(flat);
  std::size_t id = 0;
  std::size_t mul = 1;
  for (int a = 0; a < dim(); ++a) {
    id += mul * static_cast<std::size_t>(k[a] % n_);
    mul *= static_cast<std::size_t>(n_);
  }
  return id;
}

std::size_t GridSpec::central_point(std::size_t orbit_id) const {
  std::array<int, 3> k{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    k[a] = static_cast<int>(orbit_id % static_cast<std::size_t>(n_)) + hops_ * n_;
    orbit_id /= static_cast<std::size_t>(n_);
  }
  return flat(k);
}

Vector GridSpec::lattice_coords(std::size_t flat) const {
  const auto k = coords(flat);
  Vector u(dim());
  for (int a = 0; a < dim(); ++a) {
    u[a] = (k[a] - hops_ * n_ + 0.5) / static_cast<double>(n_);
  }
  return u;
}

Vector GridSpec::position(std::size_t flat) const {
  return lattice_.basis() * lattice_coords(flat);
}

Lattice GridSpec::sample_lattice() const {
  return Lattice(lattice_.basis() / static_cast<double>(n_));
}

nlohmann::json GridSpec::to_json() const {
  return {{"lattice", tileopt::to_json(lattice_)},
          {"samples_per_axis", n_},
          {"window_hops", hops_}};
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
  try {
    return GridSpec(lattice_from_json(j.at("lattice")), j.at("samples_per_axis").get<int>(),
                    j.at("window_hops").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("grid JSON: ") + e.what());
  }
}

std::string to_string(ConstraintMode mode) {
  return mode == ConstraintMode::exact ? "exact" : "relaxed";
}

DensityField::DensityField(GridSpec spec, std::vector<double> values, ConstraintMode mode)
    : spec_(std::move(spec)), values_(std::move(values)), mode_(mode) {
  if (values_.size() != spec_.size()) {
    throw ValidationError("density field size does not match its grid");
  }
}

DensityField DensityField::zeros(const GridSpec& spec) {
  return DensityField(spec, std::vector<double>(spec.size(), 0.0), ConstraintMode::relaxed);
}

double DensityField::mass() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return spec_.weight() * sum;
}

void DensityField::validate(double tol) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) {
      throw NumericError("density value out of [0, 1] at index " + std::to_string(i));
    }
  }
  for (std::size_t o = 0; o < spec_.orbit_count(); ++o) {
    double sum = 0.0;
    for (std::size_t i : spec_.orbit(o)) sum += values_[i];
    if (mode_ == ConstraintMode::exact && std::abs(sum - 1.0) > tol) {
      throw NumericError("orbit " + std::to_string(o) + " sums to " + format_double(sum) +
                         ", expected 1");
    }
    if (mode_ == ConstraintMode::relaxed && sum > 1.0 + tol) {
      throw NumericError("orbit " + std::to_string(o) + " sums to " + format_double(sum) +
                         ", expected <= 1");
    }
  }
}

bool DensityField::is_valid(double tol) const {
  try {
    validate(tol);
    return true;
  } catch (const NumericError&) {
    return false;
  }
}

DensityField indicator_of_cell(const GridSpec& spec) {
  std::vector<double> v(spec.size(), 0.0);
  for (std::size_t o = 0; o < spec.orbit_count(); ++o) v[spec.central_point(o)] = 1.0;
  return DensityField(spec, std::move(v), ConstraintMode::exact);
}

DensityField voronoi_indicator(const GridSpec& spec) {
  std::vector<double> v(spec.size(), 0.0);
  for (std::size_t o = 0; o < spec.orbit_count(); ++o) {
    std::size_t best = spec.orbit(o).front();
    double best_norm = spec.position(best).squaredNorm();
    for (std::size_t i : spec.orbit(o)) {
      const double d = spec.position(i).squaredNorm();
      if (d < best_norm * (1.0 - 1e-12)) {
        best = i;
        best_norm = d;
      }
    }
    v[best] = 1.0;
  }
  return DensityField(spec, std::move(v), ConstraintMode::exact);
}

DensityField uniform_field(const GridSpec& spec) {
  const double value = 1.0 / static_cast<double>(spec.orbit_size());
  return DensityField(spec, std::vector<double>(spec.size(), value), ConstraintMode::exact);
}

void project_exact_inplace(std::span<double> v) {
  const std::size_t k = v.size();
  if (k == 0) throw ValidationError("projection onto an empty orbit");
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError("non-finite value in projection");
  }
  if (k == 1) {
    v[0] = 1.0;
    return;
  }
  auto mass_at = [&](double tau) {
    double s = 0.0;
    for (double x : v) s += std::clamp(x - tau, 0.0, 1.0);
    return s;
  };
  std::vector<double> breaks;
  breaks.reserve(2 * k);
  for (double x : v) {
    breaks.push_back(x - 1.0);
    breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  // mass_at is nonincreasing: k at breaks.front(), 0 at breaks.back().
  double tau = breaks.front();
  double prev_mass = mass_at(breaks.front());
  for (std::size_t j = 1; j < breaks.size(); ++j) {
    const double m = mass_at(breaks[j]);
    if (m <= 1.0) {
      const double span = breaks[j] - breaks[j - 1];
      tau = (prev_mass - m > 0.0) ? breaks[j - 1] + (prev_mass - 1.0) / (prev_mass - m) * span
                                   : breaks[j];
      break;
    }
    prev_mass = m;
  }
  double sum = 0.0;
  std::size_t free = 0;
  for (double& x : v) {
    x = std::clamp(x - tau, 0.0, 1.0);
    sum += x;
    if (x > 0.0 && x < 1.0) ++free;
  }
  if (free > 0 && sum != 1.0) {
    const double shift = (1.0 - sum) / static_cast<double>(free);
    for (double& x : v) {
      if (x > 0.0 && x < 1.0) x = std::clamp(x + shift, 0.0, 1.0);
    }
  }
}

std::vector<double> project_exact(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  project_exact_inplace(out);
  return out;
}

double periodization(const DensityField& f, std::size_t base_point_index) {
  if (base_point_index >= f.spec().orbit_count()) {
    throw ValidationError("base point index out of range");
  }
  double sum = 0.0;
  for (std::size_t i : f.spec().orbit(base_point_index)) sum += f[i];
  return sum;
}

DensityField threshold(const DensityField& f) {
  if (f.mode() != ConstraintMode::exact) {
    throw ValidationError("threshold needs an exact-mode density");
  }
  const GridSpec& spec = f.spec();
  std::vector<double> v(spec.size(), 0.0);
  for (std::size_t o = 0; o < spec.orbit_count(); ++o) {
    const auto& members = spec.orbit(o);
    std::size_t best = members.front();
    for (std::size_t i : members) {
      if (f[i] > f[best]) best = i;
    }
    v[best] = 1.0;
  }
  return DensityField(spec, std::move(v), ConstraintMode::exact);
}

double binarity_deficit(const DensityField& f, double tol) {
  std::size_t count = 0;
  for (double v : f.values()) {
    if (v > tol && v < 1.0 - tol) ++count;
  }
  return f.spec().weight() * static_cast<double>(count);
}

double support_radius(const DensityField& f, double tol) {
  double best = 0.0;
  for (std::size_t i = 0; i < f.spec().size(); ++i) {
    if (f[i] > tol) best = std::max(best, f.spec().position(i).norm());
  }
  return best;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_density_csv(std::ostream& out, const DensityField& f) {
  const GridSpec& spec = f.spec();
  nlohmann::json header{{"grid", spec.to_json()}, {"mode", to_string(f.mode())}};
  out << "# " << header.dump() << '\n';
  for (int a = 0; a < spec.dim(); ++a) out << 'x' << a << ',';
  out << "value,orbit_id\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Vector x = spec.position(i);
    for (int a = 0; a < spec.dim(); ++a) out << format_double(x[a]) << ',';
    out << format_double(f[i]) << ',' << spec.orbit_of(i) << '\n';
  }
}

DensityField read_density_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ValidationError("density CSV: missing JSON header line");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("density CSV header: ") + e.what());
  }
  GridSpec spec = GridSpec::from_json(header.at("grid"));
  const ConstraintMode mode =
      header.value("mode", "exact") == "relaxed" ? ConstraintMode::relaxed : ConstraintMode::exact;
  if (!std::getline(in, line)) throw ValidationError("density CSV: missing column line");
  std::vector<double> values;
  values.reserve(spec.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != static_cast<std::size_t>(spec.dim()) + 2) {
      throw ValidationError("density CSV: wrong number of columns");
    }
    values.push_back(parse_double(fields[static_cast<std::size_t>(spec.dim())]));
  }
  return DensityField(std::move(spec), std::move(values), mode);
}

}  // namespace tileopt
