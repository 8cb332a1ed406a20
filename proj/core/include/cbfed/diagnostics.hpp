#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cbfed/config.hpp"
#include "cbfed/solver.hpp"

namespace cbfed {

/// residual(t) = |y(t)|^2 - |y0|^2 + 2 int (mu |y|_V^2 + alpha |y|_{q+1}^{q+1}
///   + beta |y|_{r+1}^{r+1} + sum_i int theta_eps(y_i) y_i - <f, y>) ds,
/// trapezoid on the ledger samples.
struct EnergyBalanceReport {
  std::vector<double> t;
  std::vector<double> residual;
  double initial_energy = 0.0;
  double max_abs = 0.0;
  double relative = 0.0;   ///< max_abs / |y0|^2 (max_abs itself when y0 = 0)
  double tolerance = 0.0;  ///< relative tolerance the pass flag uses
  bool advisory = false;   ///< 3D with r < 3
  bool pass = false;
};

EnergyBalanceReport energy_balance_residual(const EnergyLedger& ledger, const SimConfig& cfg,
                                            double rel_tol = 1e-5);

/// margin(t) = RHS - LHS of
///   |y(t)|^2 + mu int |y|_V^2 + beta int |y|_{r+1}^{r+1}
///     <= |y0|^2 + (1/mu) int |f|_{V'}^2 + kappa (2|alpha|)^{(r+1)/(r-q)} (2pi)^d T
///        + 2 sum_i c1_i c2_i (2pi)^d T
struct AprioriReport {
  std::vector<double> t;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> margin;
  double kappa = 0.0;
  double kappa_term = 0.0;
  double sign_term = 0.0;
  double min_margin = 0.0;
  double tolerance = 0.0;  ///< 1e-6 * max RHS
  bool pass = false;
};

/// kappa = ((q+1)/(beta(r+1)))^{(q+1)/(r-q)} (r-q)/(r+1). RegimeError at beta = 0.
double apriori_kappa(const OperatorParams& p);

AprioriReport apriori_margin(const EnergyLedger& ledger, const SimConfig& cfg, const LawSet& laws);

/// int |chi|_H^2 <= 3 (d (C1 + C2 eps)^2 (2pi)^d T + C2^2 int |y|_H^2), with the
/// largest declared C1, C2 over the laws.
struct SelectionReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

SelectionReport selection_bound(const EnergyLedger& ledger, const SimConfig& cfg);

/// Five consecutive states around step `step`, for centered differences.
struct Stencil {
  std::size_t step = 0;
  double t = 0.0;
  std::array<SpectralField, 5> y;
};

/// Collects stencils at `count` interior steps spread evenly over the run.
class StencilRecorder {
 public:
  StencilRecorder(std::size_t steps, std::size_t count);

  StepObserver observer();
  const std::vector<Stencil>& stencils() const noexcept { return stencils_; }
  const std::vector<std::size_t>& centers() const noexcept { return centers_; }

 private:
  std::vector<std::size_t> centers_;
  std::vector<Stencil> stencils_;
};

struct TestField {
  std::string name;
  SpectralField v;
};

/// The first 8 basis modes and 4 seeded random fields of unit H norm.
/// hvi_residual adds the current state when asked.
std::vector<TestField> default_test_fields(int dim, int cutoff, std::uint64_t seed);

struct HviRow {
  double t = 0.0;
  std::string field;
  double margin = 0.0;
  double env_gap = 0.0;     ///< envelope-sandwich bound on the regularization defect
  double time_error = 0.0;  ///< |<D3 y - D5 y, v>|
  double gap = 0.0;         ///< env_gap + time_error + roundoff allowance
  bool pass = false;
};

struct HviReport {
  std::vector<HviRow> rows;
  double worst_margin = 0.0;
  double max_gap = 0.0;
  double max_env_gap = 0.0;
  double max_time_error = 0.0;
  std::size_t violations = 0;
  bool pass = false;
};

/// margin(t, v) = <dy/dt, v> + <F(y), v> + sum_i int j_i^0(y_i; v_i) - <f, v>
/// with dy/dt by centered differences; checked against -gap.
HviReport hvi_residual(const GalerkinSolver& solver, const std::vector<Stencil>& stencils,
                       const std::vector<TestField>& fields, bool include_state = true);

/// Integrate the solver's configuration and evaluate hvi_residual on the
/// default test fields at `samples` interior times.
HviReport hvi_check(const GalerkinSolver& solver, std::size_t samples = 16);

enum class GronwallRegime { TwoD, ThreeDSupercritical, ThreeDCritical };

std::string to_string(GronwallRegime r);

struct GronwallConstants {
  std::array<double, 5> varrho{};
  double K = 0.0;
  double linear_alpha = 0.0;  ///< |alpha| when q = 1 (the varrho vanish there)
  double l4_coefficient = 0.0;  ///< 27/(32 mu^3) in 2D, 0 otherwise
  GronwallRegime regime = GronwallRegime::TwoD;
  bool duplicated_varrho = true;  ///< varrho1 and varrho2 share one formula

  /// Constant growth rate of log |w(t)|.
  double rate() const noexcept;
};

/// RegimeError for 3D r < 3, d = r = 3 with 2 beta mu <= 1, or a needed beta = 0.
GronwallConstants gronwall_constants(const SimConfig& cfg);

struct ContractionReport {
  GronwallConstants constants;
  double delta = 0.0;
  std::vector<double> t;
  std::vector<double> w;
  std::vector<double> envelope;      ///< may overflow to inf
  std::vector<double> log_envelope;  ///< log |w(0)| + Lambda(t)
  double max_ratio = 0.0;  ///< max_t w / envelope
  bool identical = false;  ///< both runs bit-identical (delta = 0)
  bool pass = false;
};

/// Runs y0 and y0 + delta e (e the first basis mode) in lockstep and compares
/// w(t) = |y1 - y2|_H with |w(0)| exp(Lambda(t)).
ContractionReport contraction_study(const SimConfig& cfg, double delta, double tol = 1e-9);

struct Ladders {
  std::vector<int> n;
  std::vector<double> epsilon;
  std::vector<double> dt;
};

struct LadderTable {
  std::string parameter;
  std::vector<double> values;
  std::vector<double> distances;  ///< L2(0,T;H) between entries k and k+1
  bool cauchy_trend = true;
  std::optional<double> rate;     ///< fitted slope of log d against log parameter
};

struct ConvergenceReport {
  std::vector<LadderTable> tables;
  std::vector<double> sample_times;
  bool pass = true;
};

/// Each ladder varies one parameter of `cfg`; distances are taken on the
/// coarser mode set at common sample times.
ConvergenceReport convergence_study(const SimConfig& cfg, const Ladders& ladders, int threads = 1);

}  // namespace cbfed
