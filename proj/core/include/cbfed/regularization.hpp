#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cbfed/field.hpp"
#include "cbfed/law.hpp"

namespace cbfed {

/// Convolution and tabulation settings.
struct MollifierSpec {
  int nodes = 64;              ///< initial Gauss-Legendre nodes per subinterval
  int max_doublings = 5;
  double stable_tol = 1e-10;   ///< accept once a doubling changes the value by less
  double fail_tol = 1e-8;      ///< error if the last doubling still changes it by more
  int table_nodes = 4096;
};

/// The bump rho(s) = Z exp(-1/(1 - s^2)) on (-1, 1), unit mass.
class Mollifier {
 public:
  Mollifier();
  double normalization() const noexcept { return z_; }
  double profile(double s) const noexcept;
  /// rho_eps(s) = rho(s/eps)/eps.
  double density(double s, double eps) const noexcept { return profile(s / eps) / eps; }

 private:
  double z_;
};

const Mollifier& standard_mollifier();

/// (rho_eps * theta)(xi) by Gauss-Legendre quadrature split at the law's
/// breakpoints, doubling nodes until stable. Throws QuadratureError.
double mollify_at(const NonsmoothLaw& law, double eps, double xi, const MollifierSpec& spec = {});

/// Sign-bound constants of the regularized law.
struct SignConstants {
  double c1 = 0.0;       ///< theta_eps <= 0 below -c1, >= 0 above c1
  double c2 = 0.0;       ///< |theta_eps| <= c2 on [-c1, c1]
  double c1_base = 0.0;  ///< the base law's own sign threshold, before padding
};

/// theta_eps = rho_eps * theta tabulated on [-Xi, Xi] with linear
/// interpolation, Xi = max(10, 4 phi, 2 observed_sup).
///
/// Outside the table the value is exact when the eps-ball lies inside a
/// single affine piece and computed by direct quadrature otherwise.
class RegularizedLaw {
 public:
  RegularizedLaw(NonsmoothLaw base, double eps, MollifierSpec spec = {}, double observed_sup = 0.0);

  double operator()(double xi) const noexcept;
  /// Direct convolution quadrature, bypassing the table.
  double direct(double xi) const { return mollify_at(base_, eps_, xi, spec_); }

  const NonsmoothLaw& base() const noexcept { return base_; }
  double epsilon() const noexcept { return eps_; }
  const MollifierSpec& spec() const noexcept { return spec_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return h_; }
  std::size_t table_size() const noexcept { return table_.size(); }
  double node(std::size_t j) const noexcept { return -half_width_ + h_ * static_cast<double>(j); }
  double table_value(std::size_t j) const noexcept { return table_[j]; }
  bool is_zero() const noexcept { return zero_; }
  const SignConstants& sign_constants() const noexcept { return signs_; }

 private:
  std::optional<double> single_piece_value(double xi) const noexcept;
  double tabulated(double xi) const noexcept;
  void compute_sign_constants();

  NonsmoothLaw base_;
  double eps_;
  MollifierSpec spec_;
  double half_width_ = 10.0;
  double h_ = 0.0;
  std::vector<double> table_;
  bool zero_ = false;
  SignConstants signs_;
};

/// Build the regularization: validates eps > 0 and the base law's sign
/// pattern (LawError when it breaks the declared phi).
std::shared_ptr<const RegularizedLaw> mollify(const NonsmoothLaw& law, double eps,
                                              const MollifierSpec& spec = {},
                                              double observed_sup = 0.0);

/// One regularized law per velocity component.
using LawSet = std::vector<std::shared_ptr<const RegularizedLaw>>;

struct FloorConstants {
  std::vector<double> c1;  ///< per component
  std::vector<double> c2;
  double integral_floor = 0.0;  ///< -sum_i c1_i c2_i (2pi)^d
};

FloorConstants floor_constants(const LawSet& laws);
/// Single law applied to each of d components.
FloorConstants floor_constants(const RegularizedLaw& law, int dim);

/// sum_i int theta_eps,i(u_i) u_i dx by grid quadrature.
double theta_work(const LawSet& laws, const PhysicalField& u);

/// Pointwise theta_eps,i(u_i).
PhysicalField apply_law(const LawSet& laws, const PhysicalField& u);

struct FloorCheck {
  double floor = 0.0;
  double worst = 0.0;   ///< smallest sampled work
  int samples = 0;
  int violations = 0;
};

/// Samples theta_work over seeded random fields with amplitudes spread
/// log-uniformly over [0.05, 5] and counts those below the sign-constant floor.
FloorCheck check_integral_floor(const LawSet& laws, int dim, int cutoff, int grid, int samples,
                                std::uint64_t seed);

}  // namespace cbfed
