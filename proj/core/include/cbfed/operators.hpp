#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cbfed/field.hpp"

namespace cbfed {

/// Physical coefficients of the damped Navier-Stokes drift
///   F(y) = mu A y + B(y) + alpha |y|^{q-1} y + beta |y|^{r-1} y.
struct OperatorParams {
  double mu = 0.1;     ///< effective viscosity, > 0
  double alpha = -0.5; ///< pumping coefficient (pumping when negative)
  double beta = 1.0;   ///< Forchheimer damping, >= 0 (0 only for verification runs)
  double r = 3.0;      ///< absorption exponent, >= 1
  double q = 2.0;      ///< pumping exponent, 1 <= q < r

  /// Every violated constraint, empty when valid.
  std::vector<std::string> violations() const;
  /// Throws ConfigError listing all violations.
  void validate() const;
};

/// Default nonlinear evaluation grid for a cutoff: twice the smallest grid
/// (3n+1) on which the quadratic term is alias-free.
inline int default_eval_grid(int cutoff) noexcept { return 2 * (3 * cutoff + 1); }

/// |u|^{e-1} from m2 = |u|^2, with 0^0 := 1 and exact fast paths for the
/// common integer exponents.
inline double abs_power_factor(double m2, double e) noexcept {
  if (e == 1.0) return 1.0;
  if (e == 2.0) return std::sqrt(m2);
  if (e == 3.0) return m2;
  if (e == 5.0) return m2 * m2;
  return std::pow(m2, 0.5 * (e - 1.0));
}

/// Stokes operator: c_k -> |k|^2 c_k.
SpectralField stokes_apply(const SpectralField& y);

/// b(p, q, s) = int (p . grad) q . s dx, by quadrature on an N^d grid.
/// Throws ResolutionError unless N > 3 * cutoff (exact for the cubic
/// integrand).
double trilinear_b(const SpectralField& p, const SpectralField& q, const SpectralField& s,
                   int grid);

/// Leray projection of (y . grad) y, computed on an alias-free grid for
/// the quadratic product. Throws ResolutionError unless grid > 3 * cutoff.
SpectralField convection_B(const SpectralField& y, int grid);

/// Pointwise |u|^{e-1} u.
PhysicalField power_law(const PhysicalField& u, double exponent);

/// Leray projection of |y|^{r-1} y evaluated on the given grid.
SpectralField damping_C(const SpectralField& y, double r, int grid);
/// Leray projection of |y|^{q-1} y evaluated on the given grid.
SpectralField pumping_Ctilde(const SpectralField& y, double q, int grid);

/// <|u|^{e-1} u, u> = ||u||^{e+1}_{L^{e+1}} by grid quadrature, computed
/// before any projection.
double power_pairing(const PhysicalField& u, double exponent);

struct MonotonicityGap {
  double lhs = 0.0;  ///< <C(p) - C(q), p - q>
  double rhs = 0.0;  ///< (1/2)|| |p|^{(r-1)/2}(p-q) ||^2 + (1/2)|| |q|^{(r-1)/2}(p-q) ||^2
};

/// Both sides of the monotonicity inequality lhs >= rhs >= 0.
MonotonicityGap monotonicity_gap(const PhysicalField& p, const PhysicalField& q, double r);
MonotonicityGap monotonicity_gap(const SpectralField& p, const SpectralField& q, double r,
                                 int grid);

/// mu A y + B(y) + alpha Ctilde(y) + beta C(y).
SpectralField drift_F(const SpectralField& y, const OperatorParams& params, int grid);

}  // namespace cbfed
