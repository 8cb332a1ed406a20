#include "cbfed/field.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

#include "cbfed/error.hpp"

namespace cbfed {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
}

}  // namespace

double domain_volume(int dim) noexcept { return std::pow(2.0 * std::numbers::pi, dim); }

SpectralField::SpectralField(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
  check_dim(dim);
  if (cutoff < 0) throw ConfigError("cutoff must be nonnegative");
  num_modes_ = ipow(static_cast<std::size_t>(side()), dim);
  coeffs_.assign(num_modes_ * dim_, Complex{});
}

WaveVector SpectralField::wavevector(std::size_t mode) const noexcept {
  WaveVector w;
  w.dim = dim_;
  const auto s = static_cast<std::size_t>(side());
  for (int i = dim_ - 1; i >= 0; --i) {
    w.k[i] = static_cast<int>(mode % s) - cutoff_;
    mode /= s;
  }
  return w;
}

std::size_t SpectralField::index_of(const WaveVector& k) const noexcept {
  std::size_t m = 0;
  const auto s = static_cast<std::size_t>(side());
  for (int i = 0; i < dim_; ++i) m = m * s + static_cast<std::size_t>(k.k[i] + cutoff_);
  return m;
}

bool SpectralField::contains(const WaveVector& k) const noexcept {
  for (int i = 0; i < dim_; ++i) {
    if (k.k[i] < -cutoff_ || k.k[i] > cutoff_) return false;
  }
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  assert(same_shape(other));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  assert(same_shape(other));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  assert(same_shape(other));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

double SpectralField::divergence_defect() const noexcept {
  double worst = 0.0;
  for (std::size_t m = 0; m < num_modes_; ++m) {
    const auto w = wavevector(m);
    Complex div{};
    for (int c = 0; c < dim_; ++c) div += static_cast<double>(w.k[c]) * at(m, c);
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

double SpectralField::reality_defect() const noexcept {
  double worst = 0.0;
  for (std::size_t m = 0; m < num_modes_; ++m) {
    const auto mirror = index_of(-wavevector(m));
    for (int c = 0; c < dim_; ++c) {
      worst = std::max(worst, std::abs(at(mirror, c) - std::conj(at(m, c))));
    }
  }
  return worst;
}

bool SpectralField::all_finite() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

PhysicalField::PhysicalField(int dim, int grid_size) : dim_(dim), grid_(grid_size) {
  check_dim(dim);
  if (grid_size < 1) throw ConfigError("grid size must be positive");
  points_ = ipow(static_cast<std::size_t>(grid_size), dim);
  values_.assign(points_ * dim_, 0.0);
}

std::array<double, 3> PhysicalField::coordinates(std::size_t point) const noexcept {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const double h = 2.0 * std::numbers::pi / grid_;
  const auto n = static_cast<std::size_t>(grid_);
  for (int i = dim_ - 1; i >= 0; --i) {
    x[i] = h * static_cast<double>(point % n);
    point /= n;
  }
  return x;
}

double PhysicalField::cell_volume() const noexcept {
  return std::pow(2.0 * std::numbers::pi / grid_, dim_);
}

double PhysicalField::max_abs() const noexcept {
  double worst = 0.0;
  for (std::size_t p = 0; p < points_; ++p) {
    double s = 0.0;
    for (int c = 0; c < dim_; ++c) s += at(p, c) * at(p, c);
    worst = std::max(worst, s);
  }
  return std::sqrt(worst);
}

}  // namespace cbfed
