#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbfed/config.hpp"
#include "cbfed/field.hpp"
#include "cbfed/regularization.hpp"

namespace cbfed {

/// One ledger sample. Norm and work terms are grid quadratures on the
/// evaluation grid except E_H2, E_V2, work_f and F_Vdual2 (spectral).
struct LedgerRow {
  double t = 0.0;
  double E_H2 = 0.0;       ///< ||y||_H^2
  double E_V2 = 0.0;       ///< ||y||_V^2
  double E_Lr = 0.0;       ///< ||y||_{L^{r+1}}^{r+1}
  double E_Lq = 0.0;       ///< ||y||_{L^{q+1}}^{q+1}
  double work_f = 0.0;     ///< <f, y>
  double work_theta = 0.0; ///< sum_i int theta_eps(y_i) y_i
  double F_Vdual2 = 0.0;   ///< ||f||_{V'}^2
  double chi_H2 = 0.0;     ///< ||chi||_H^2, chi = theta_eps(y) on the grid
  double E_L4 = 0.0;       ///< ||y||_{L^4}^4
};

class EnergyLedger {
 public:
  std::vector<LedgerRow> rows;

  std::vector<double> column(double LedgerRow::*field) const;
  std::vector<double> times() const { return column(&LedgerRow::t); }
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  static EnergyLedger from_csv(const std::string& text);
};

struct BlowUp {
  double t = 0.0;
  double norm_h = 0.0;
};

struct Trajectory {
  std::vector<double> times;            ///< stored state times
  std::vector<SpectralField> states;
  std::vector<double> chi_times;
  std::vector<PhysicalField> chi;       ///< theta_eps(y) on the configured grid
  SpectralField final_state;
  std::optional<BlowUp> blowup;         ///< set when the run stopped early
};

struct RunResult {
  Trajectory trajectory;
  EnergyLedger ledger;
};

/// Called after every accepted state, including the initial one.
using StepObserver = std::function<void(std::size_t step, double t, const SpectralField& y)>;

/// Integrating-factor Runge-Kutta integration of
///   dy/dt = f - mu A y - P[B(y) + alpha Ctilde(y) + beta C(y) + theta_eps(y)]
/// on the Galerkin space |k_i| <= n.
class GalerkinSolver {
 public:
  /// Validates cfg and builds the regularized laws unless given.
  explicit GalerkinSolver(SimConfig cfg, LawSet laws = {});

  const SimConfig& config() const noexcept { return cfg_; }
  const LawSet& laws() const noexcept { return laws_; }

  /// Projected initial condition of the configuration.
  SpectralField initial_state() const { return y0_; }
  SpectralField forcing(double t) const;

  /// Full right-hand side. Throws BlowUpError on non-finite input/output.
  SpectralField rhs(const SpectralField& y, double t) const;
  /// Everything but the Stokes term.
  SpectralField nonlinear_rhs(const SpectralField& y, double t, LedgerRow* row = nullptr) const;
  /// One step of the configured scheme.
  SpectralField step(const SpectralField& y, double t, double dt) const;
  /// Ledger sample at state y.
  LedgerRow measure(const SpectralField& y, double t) const;

  /// March from the initial state (or `start`) to T. A blow-up stops the
  /// run and is recorded in the trajectory; everything up to it is kept.
  RunResult integrate(const StepObserver& observer = {}) const;
  RunResult integrate_from(const SpectralField& start, const StepObserver& observer = {}) const;

 private:
  void apply_factor(SpectralField& y, double h) const;
  PhysicalField chi_grid(const SpectralField& y) const;

  SimConfig cfg_;
  LawSet laws_;
  SpectralField y0_;
  SpectralField f0_;
  std::vector<double> k2_;
};

/// Taylor-Green initial condition amplitude (sin x1 cos x2, -cos x1 sin x2).
SpectralField taylor_green_ic(int cutoff, double amplitude);

/// Build the forcing profile P f0 (without the time modulation).
SpectralField forcing_profile(const SimConfig& cfg);
/// Build the projected initial condition.
SpectralField initial_condition(const SimConfig& cfg);

}  // namespace cbfed
