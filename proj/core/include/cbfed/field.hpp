#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cbfed {

using Complex = std::complex<double>;

/// Integer lattice index on the d-dimensional torus [0, 2pi)^d.
struct WaveVector {
  std::array<int, 3> k{0, 0, 0};
  int dim = 2;

  /// Stokes eigenvalue |k|^2.
  int norm2() const noexcept {
    int s = 0;
    for (int i = 0; i < dim; ++i) s += k[i] * k[i];
    return s;
  }

  WaveVector operator-() const noexcept {
    WaveVector w = *this;
    for (int i = 0; i < dim; ++i) w.k[i] = -w.k[i];
    return w;
  }

  bool operator==(const WaveVector&) const = default;
};

/// Fourier coefficients of a (nominally real, zero-mean, divergence-free)
/// velocity field, stored on the cube |k_i| <= cutoff.
///
/// Synthesis convention: y(x) = sum_k c_k exp(i k.x). The type stores any
/// coefficient set; the divergence-free, reality and zero-mean invariants
/// are established by leray_project and preserved by every operator.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int dim, int cutoff);

  int dim() const noexcept { return dim_; }
  int cutoff() const noexcept { return cutoff_; }
  int side() const noexcept { return 2 * cutoff_ + 1; }
  std::size_t num_modes() const noexcept { return num_modes_; }

  WaveVector wavevector(std::size_t mode) const noexcept;
  std::size_t index_of(const WaveVector& k) const noexcept;
  bool contains(const WaveVector& k) const noexcept;

  Complex& at(std::size_t mode, int comp) noexcept { return coeffs_[mode * dim_ + comp]; }
  const Complex& at(std::size_t mode, int comp) const noexcept { return coeffs_[mode * dim_ + comp]; }

  std::span<Complex> data() noexcept { return coeffs_; }
  std::span<const Complex> data() const noexcept { return coeffs_; }

  bool same_shape(const SpectralField& other) const noexcept {
    return dim_ == other.dim_ && cutoff_ == other.cutoff_;
  }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  /// max_k |k . c_k| (zero for divergence-free fields).
  double divergence_defect() const noexcept;
  /// max_k |c_{-k} - conj(c_k)| (zero for real fields).
  double reality_defect() const noexcept;
  /// True when every coefficient is finite.
  bool all_finite() const noexcept;

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  int dim_ = 0;
  int cutoff_ = 0;
  std::size_t num_modes_ = 0;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Real vector field sampled on a uniform N^d grid over [0, 2pi)^d.
///
/// Points x_j = 2pi j / N, row-major in (x_1, ..., x_d); component c of
/// point p lives at values()[c * N^d + p].
class PhysicalField {
 public:
  PhysicalField() = default;
  PhysicalField(int dim, int grid_size);

  int dim() const noexcept { return dim_; }
  int grid_size() const noexcept { return grid_; }
  std::size_t num_points() const noexcept { return points_; }

  std::span<double> component(int c) noexcept {
    return {values_.data() + static_cast<std::size_t>(c) * points_, points_};
  }
  std::span<const double> component(int c) const noexcept {
    return {values_.data() + static_cast<std::size_t>(c) * points_, points_};
  }

  double& at(std::size_t point, int comp) noexcept { return values_[comp * points_ + point]; }
  double at(std::size_t point, int comp) const noexcept { return values_[comp * points_ + point]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Coordinates of grid point p.
  std::array<double, 3> coordinates(std::size_t point) const noexcept;

  /// Quadrature weight (2pi/N)^d of one cell.
  double cell_volume() const noexcept;

  /// max_x |u(x)| (Euclidean vector norm).
  double max_abs() const noexcept;

 private:
  int dim_ = 0;
  int grid_ = 0;
  std::size_t points_ = 0;
  std::vector<double> values_;
};

/// (2pi)^d, the measure of the torus.
double domain_volume(int dim) noexcept;

}  // namespace cbfed
