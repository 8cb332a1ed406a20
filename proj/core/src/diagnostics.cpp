#include "cbfed/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "cbfed/error.hpp"
#include "cbfed/law.hpp"
#include "cbfed/operators.hpp"
#include "cbfed/quadrature.hpp"
#include "cbfed/spectral.hpp"
#include "cbfed/summation.hpp"

namespace cbfed {

namespace {

void check_ledger(const EnergyLedger& ledger) {
  if (ledger.rows.empty()) throw Error("ledger has no rows");
  for (std::size_t i = 1; i < ledger.rows.size(); ++i) {
    if (!(ledger.rows[i].t > ledger.rows[i - 1].t)) {
      throw Error("ledger times are not strictly increasing");
    }
  }
}

FloorConstants sign_constants_for(const LawSet& laws, int dim) {
  if (laws.size() == 1) return floor_constants(*laws.front(), dim);
  return floor_constants(laws);
}

const RegularizedLaw& law_for_component(const LawSet& laws, int c) {
  return *laws[laws.size() == 1 ? 0 : static_cast<std::size_t>(c)];
}

double declared_K(const std::vector<NonsmoothLaw>& laws) {
  double k = 0.0;
  for (const auto& law : laws) {
    k = std::max(k, law.metadata().K ? *law.metadata().K : verify_hypotheses(law).K_hat);
  }
  return k;
}

}  // namespace

EnergyBalanceReport energy_balance_residual(const EnergyLedger& ledger, const SimConfig& cfg,
                                            double rel_tol) {
  check_ledger(ledger);
  const auto& p = cfg.params;
  EnergyBalanceReport rep;
  rep.t = ledger.times();
  std::vector<double> g(ledger.rows.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& r = ledger.rows[i];
    g[i] = p.mu * r.E_V2 + p.alpha * r.E_Lq + p.beta * r.E_Lr + r.work_theta - r.work_f;
  }
  const auto integral = cumulative_trapezoid(rep.t, g);
  rep.initial_energy = ledger.rows.front().E_H2;
  rep.residual.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    rep.residual[i] = ledger.rows[i].E_H2 - rep.initial_energy + 2.0 * integral[i];
    rep.max_abs = std::max(rep.max_abs, std::abs(rep.residual[i]));
  }
  rep.relative = rep.initial_energy > 0.0 ? rep.max_abs / rep.initial_energy : rep.max_abs;
  rep.tolerance = rel_tol;
  rep.advisory = cfg.dim == 3 && p.r < 3.0;
  rep.pass = rep.relative <= rel_tol;
  return rep;
}

double apriori_kappa(const OperatorParams& p) {
  if (!(p.beta > 0.0)) throw RegimeError("beta > 0 required to absorb the pumping term");
  const double e = (p.q + 1.0) / (p.r - p.q);
  return std::pow((p.q + 1.0) / (p.beta * (p.r + 1.0)), e) * ((p.r - p.q) / (p.r + 1.0));
}

AprioriReport apriori_margin(const EnergyLedger& ledger, const SimConfig& cfg, const LawSet& laws) {
  check_ledger(ledger);
  const auto& p = cfg.params;
  const double vol = domain_volume(cfg.dim);
  AprioriReport rep;
  if (p.alpha != 0.0) {
    rep.kappa = apriori_kappa(p);
    rep.kappa_term =
        rep.kappa * std::pow(2.0 * std::abs(p.alpha), (p.r + 1.0) / (p.r - p.q)) * vol * cfg.T;
  }
  rep.sign_term = -2.0 * sign_constants_for(laws, cfg.dim).integral_floor * cfg.T;

  rep.t = ledger.times();
  const auto v_int = cumulative_trapezoid(rep.t, ledger.column(&LedgerRow::E_V2));
  const auto lr_int = cumulative_trapezoid(rep.t, ledger.column(&LedgerRow::E_Lr));
  const auto f_int = cumulative_trapezoid(rep.t, ledger.column(&LedgerRow::F_Vdual2));
  const double e0 = ledger.rows.front().E_H2;
  const std::size_t n = rep.t.size();
  rep.lhs.resize(n);
  rep.rhs.resize(n);
  rep.margin.resize(n);
  double max_rhs = 0.0;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    rep.lhs[i] = ledger.rows[i].E_H2 + p.mu * v_int[i] + p.beta * lr_int[i];
    rep.rhs[i] = e0 + f_int[i] / p.mu + rep.kappa_term + rep.sign_term;
    rep.margin[i] = rep.rhs[i] - rep.lhs[i];
    max_rhs = std::max(max_rhs, rep.rhs[i]);
    rep.min_margin = std::min(rep.min_margin, rep.margin[i]);
  }
  rep.tolerance = 1e-6 * max_rhs;
  rep.pass = rep.min_margin >= -rep.tolerance;
  return rep;
}

SelectionReport selection_bound(const EnergyLedger& ledger, const SimConfig& cfg) {
  check_ledger(ledger);
  double c1 = 0.0;
  double c2 = 0.0;
  for (const auto& law : cfg.laws) {
    c1 = std::max(c1, law.metadata().C1);
    c2 = std::max(c2, law.metadata().C2);
  }
  const auto t = ledger.times();
  SelectionReport rep;
  rep.lhs = trapezoid(t, ledger.column(&LedgerRow::chi_H2));
  const double base = c1 + c2 * cfg.epsilon;
  rep.rhs = 3.0 * (cfg.dim * base * base * domain_volume(cfg.dim) * cfg.T +
                   c2 * c2 * trapezoid(t, ledger.column(&LedgerRow::E_H2)));
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  return rep;
}

StencilRecorder::StencilRecorder(std::size_t steps, std::size_t count) {
  if (steps < 4) throw ConfigError("the HVI check needs at least 4 time steps");
  count = std::max<std::size_t>(1, std::min(count, steps - 3));
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t c =
        count == 1 ? steps / 2
                   : 2 + static_cast<std::size_t>(std::llround(static_cast<double>(k) *
                                                               static_cast<double>(steps - 4) /
                                                               static_cast<double>(count - 1)));
    if (centers_.empty() || centers_.back() != c) centers_.push_back(c);
  }
  stencils_.resize(centers_.size());
  for (std::size_t k = 0; k < centers_.size(); ++k) stencils_[k].step = centers_[k];
}

StepObserver StencilRecorder::observer() {
  return [this](std::size_t step, double t, const SpectralField& y) {
    for (auto& s : stencils_) {
      if (step + 2 < s.step || step > s.step + 2) continue;
      s.y[step + 2 - s.step] = y;
      if (step == s.step) s.t = t;
    }
  };
}

std::vector<TestField> default_test_fields(int dim, int cutoff, std::uint64_t seed) {
  std::vector<TestField> out;
  auto modes = basis_modes(dim, cutoff, 8);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    out.push_back({"mode" + std::to_string(i), std::move(modes[i])});
  }
  for (int i = 0; i < 4; ++i) {
    auto v = random_field(dim, cutoff, seed + 1000 + static_cast<std::uint64_t>(i));
    v *= 1.0 / norm_h(v);
    out.push_back({"random" + std::to_string(i), std::move(v)});
  }
  return out;
}

HviReport hvi_residual(const GalerkinSolver& solver, const std::vector<Stencil>& stencils,
                       const std::vector<TestField>& fields, bool include_state) {
  const auto& cfg = solver.config();
  const int d = cfg.dim;
  const int grid = cfg.eval_grid();
  const auto& laws = solver.laws();
  for (const auto& f : fields) {
    if (f.v.divergence_defect() > 1e-10) {
      throw ConfigError("test field " + f.name + " is not divergence-free");
    }
  }
  std::vector<PhysicalField> vphys;
  for (const auto& f : fields) vphys.push_back(to_physical(f.v, grid));

  HviReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : stencils) {
    const double dt = cfg.dt;
    auto d3 = s.y[3] - s.y[1];
    d3 *= 1.0 / (2.0 * dt);
    auto d5 = (8.0 * (s.y[3] - s.y[1])) - (s.y[4] - s.y[0]);
    d5 *= 1.0 / (12.0 * dt);
    const auto& y = s.y[2];
    const auto F = drift_F(y, cfg.params, grid);
    const auto f = solver.forcing(s.t);
    const auto u = to_physical(y, grid);
    const double cell = u.cell_volume();
    const std::size_t np = u.num_points();

    // per-point Clarke interval and envelope excess
    std::vector<double> lo(np * d), hi(np * d), up_excess(np * d), down_excess(np * d);
    for (int c = 0; c < d; ++c) {
      const auto& law = law_for_component(laws, c);
      const double eps = law.epsilon() + law.spacing();
      const auto ui = u.component(c);
      for (std::size_t x = 0; x < np; ++x) {
        const std::size_t k = static_cast<std::size_t>(c) * np + x;
        if (law.is_zero()) {
          lo[k] = hi[k] = up_excess[k] = down_excess[k] = 0.0;
          continue;
        }
        const auto cl = clarke_interval(law.base(), ui[x]);
        const auto env = envelopes(law.base(), ui[x], eps);
        lo[k] = cl.lower;
        hi[k] = cl.upper;
        up_excess[k] = std::max(0.0, env.upper - cl.upper);
        down_excess[k] = std::max(0.0, cl.lower - env.lower);
      }
    }

    auto evaluate = [&](const std::string& name, const SpectralField& v, const PhysicalField& vp) {
      CompensatedSum j0;
      CompensatedSum env;
      for (std::size_t k = 0; k < np * d; ++k) {
        const double vv = vp.values()[k];
        if (vv >= 0.0) {
          j0 += hi[k] * vv;
          env += up_excess[k] * vv;
        } else {
          j0 += lo[k] * vv;
          env += down_excess[k] * -vv;
        }
      }
      HviRow row;
      row.t = s.t;
      row.field = name;
      row.margin = inner_h(d3, v) + inner_h(F, v) + cell * j0.value() - inner_h(f, v);
      row.env_gap = cell * env.value();
      row.time_error = std::abs(inner_h(d3 - d5, v));
      const double scale = norm_h(v) * (norm_h(d3) + norm_h(F) + norm_h(f) + 1.0);
      row.gap = row.env_gap + row.time_error + 1e-9 * scale;
      row.pass = row.margin >= -row.gap;
      rep.worst_margin = std::min(rep.worst_margin, row.margin);
      rep.max_gap = std::max(rep.max_gap, row.gap);
      rep.max_env_gap = std::max(rep.max_env_gap, row.env_gap);
      rep.max_time_error = std::max(rep.max_time_error, row.time_error);
      if (!row.pass) ++rep.violations;
      rep.rows.push_back(std::move(row));
    };
    for (std::size_t i = 0; i < fields.size(); ++i) evaluate(fields[i].name, fields[i].v, vphys[i]);
    if (include_state) evaluate("state", y, u);
  }
  if (rep.rows.empty()) rep.worst_margin = 0.0;
  rep.pass = rep.violations == 0;
  return rep;
}

HviReport hvi_check(const GalerkinSolver& solver, std::size_t samples) {
  const auto& cfg = solver.config();
  StencilRecorder rec(cfg.steps(), samples);
  const auto run = solver.integrate(rec.observer());
  if (run.trajectory.blowup) {
    throw BlowUpError(run.trajectory.blowup->t, run.trajectory.blowup->norm_h);
  }
  return hvi_residual(solver, rec.stencils(), default_test_fields(cfg.dim, cfg.cutoff, cfg.seed));
}

std::string to_string(GronwallRegime r) {
  switch (r) {
    case GronwallRegime::TwoD:
      return "2D_r_ge_1";
    case GronwallRegime::ThreeDSupercritical:
      return "3D_r_gt_3";
    case GronwallRegime::ThreeDCritical:
      return "3D_r_eq_3_supercritical_viscosity";
  }
  return "unknown";
}

double GronwallConstants::rate() const noexcept {
  double s = K + linear_alpha;
  switch (regime) {
    case GronwallRegime::TwoD:
      s += varrho[0] + varrho[1];
      break;
    case GronwallRegime::ThreeDSupercritical:
      s += varrho[0] + varrho[1] + varrho[2];
      break;
    case GronwallRegime::ThreeDCritical:
      s += varrho[3] + varrho[4];
      break;
  }
  return s;
}

GronwallConstants gronwall_constants(const SimConfig& cfg) {
  const auto& p = cfg.params;
  p.validate();
  const double r = p.r;
  const double q = p.q;
  const double mu = p.mu;
  const double beta = p.beta;
  const double a = std::abs(p.alpha);
  GronwallConstants c;
  c.K = declared_K(cfg.laws);
  if (cfg.dim == 2) {
    c.regime = GronwallRegime::TwoD;
  } else if (r > 3.0) {
    c.regime = GronwallRegime::ThreeDSupercritical;
  } else if (r == 3.0) {
    if (!(2.0 * beta * mu > 1.0)) {
      throw RegimeError("2βμ ≤ 1: uniqueness for d = r = 3 requires 2 beta mu > 1 (got " +
                        std::to_string(2.0 * beta * mu) + ")");
    }
    c.regime = GronwallRegime::ThreeDCritical;
  } else {
    throw RegimeError("uniqueness in 3D requires r >= 3");
  }

  // the q - 1 factors vanish at q = 1; the pumping term is then linear
  const bool pumping = a > 0.0 && q > 1.0;
  if (q == 1.0) c.linear_alpha = a;

  if (c.regime != GronwallRegime::ThreeDCritical && pumping) {
    if (!(beta > 0.0)) throw RegimeError("beta > 0 required to absorb the pumping term");
    const double v = ((r - q) / (r - 1.0)) *
                     std::pow(std::pow(2.0, q + 1.0) * q * a * (q - 1.0) / (beta * (r - 1.0)),
                              (q - 1.0) / (r - q));
    c.varrho[0] = v;
    c.varrho[1] = v;
  }
  if (c.regime == GronwallRegime::ThreeDSupercritical) {
    if (!(beta > 0.0)) throw RegimeError("beta > 0 required for 3D uniqueness");
    c.varrho[2] = (1.0 / (4.0 * mu)) * ((r - 3.0) / (r - 1.0)) *
                  std::pow(4.0 / (mu * beta * (r - 1.0)), 2.0 / (r - 3.0));
  }
  if (c.regime == GronwallRegime::ThreeDCritical && pumping) {
    const double e = (q - 1.0) / (3.0 - q);
    const double pre = std::pow(2.0, q - 1.0) * q * a * (q - 1.0);
    c.varrho[3] = ((3.0 - q) / 2.0) * std::pow(pre * mu, e);
    c.varrho[4] = ((3.0 - q) / 2.0) * std::pow(pre / (beta - 1.0 / (2.0 * mu)), e);
  }
  if (c.regime == GronwallRegime::TwoD) c.l4_coefficient = 27.0 / (32.0 * mu * mu * mu);
  return c;
}

ContractionReport contraction_study(const SimConfig& cfg, double delta, double tol) {
  ContractionReport rep;
  rep.constants = gronwall_constants(cfg);
  rep.delta = delta;
  const GalerkinSolver solver(cfg);
  SpectralField y1 = solver.initial_state();
  SpectralField y2 = y1;
  y2.axpy(delta, basis_modes(cfg.dim, cfg.cutoff, 1).front());

  const std::size_t steps = cfg.steps();
  const double w0 = norm_h(y1 - y2);
  const double rate = rep.constants.rate();
  const double l4c = rep.constants.l4_coefficient;
  double l4_int = 0.0;
  double l4_prev = 0.0;
  double t_prev = 0.0;
  rep.identical = true;
  rep.pass = true;
  rep.max_ratio = 0.0;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    if (l4c != 0.0) {
      const double l4 = solver.measure(y2, t).E_L4;
      if (i > 0) l4_int += 0.5 * (t - t_prev) * (l4 + l4_prev);
      l4_prev = l4;
    }
    t_prev = t;
    const double w = norm_h(y1 - y2);
    const double lambda = rate * t + l4c * l4_int;
    rep.t.push_back(t);
    rep.w.push_back(w);
    rep.envelope.push_back(w0 * std::exp(lambda));
    rep.log_envelope.push_back(w0 > 0.0 ? std::log(w0) + lambda
                                        : -std::numeric_limits<double>::infinity());
    if (!(y1 == y2)) rep.identical = false;
    if (w0 > 0.0) {
      const double ratio = std::exp(std::log(w / w0) - lambda);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (!(ratio <= 1.0 + tol)) rep.pass = false;
    } else if (w != 0.0) {
      rep.pass = false;
    }
    if (i == steps) break;
    y1 = solver.step(y1, t, cfg.dt);
    y2 = solver.step(y2, t, cfg.dt);
  }
  if (delta == 0.0 && !rep.identical) rep.pass = false;
  return rep;
}

namespace {

struct LadderRun {
  SimConfig cfg;
  std::size_t ratio = 1;
  std::vector<SpectralField> samples;
};

void run_all(std::vector<LadderRun>& runs, int threads) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(runs.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        auto& run = runs[i];
        const GalerkinSolver solver(run.cfg);
        const auto res = solver.integrate([&run](std::size_t step, double, const SpectralField& y) {
          if (step % run.ratio == 0) run.samples.push_back(y);
        });
        if (res.trajectory.blowup) {
          throw BlowUpError(res.trajectory.blowup->t, res.trajectory.blowup->norm_h);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double l2_distance(const LadderRun& a, const LadderRun& b, const std::vector<double>& times) {
  const int nc = std::min(a.cfg.cutoff, b.cfg.cutoff);
  std::vector<double> d2(times.size());
  for (std::size_t s = 0; s < times.size(); ++s) {
    d2[s] = norm_h2(resample(a.samples[s], nc) - resample(b.samples[s], nc));
  }
  if (times.size() < 2) return std::sqrt(d2.empty() ? 0.0 : d2.front());
  return std::sqrt(trapezoid(times, d2));
}

std::optional<double> fit_rate(const std::vector<double>& x, const std::vector<double>& d) {
  std::vector<double> lx, ld;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0 && x[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ld.push_back(std::log(d[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  double mx = 0.0, md = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    md += ld[i];
  }
  mx /= static_cast<double>(lx.size());
  md /= static_cast<double>(lx.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ld[i] - md);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

template <class T>
bool strictly(const std::vector<T>& v, bool increasing) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

ConvergenceReport convergence_study(const SimConfig& cfg, const Ladders& ladders, int threads) {
  cfg.validate();
  std::vector<std::string> issues;
  if (!strictly(ladders.n, true)) issues.push_back("ladders.n: cutoffs must increase");
  if (!strictly(ladders.epsilon, false)) issues.push_back("ladders.epsilon: values must decrease");
  if (!strictly(ladders.dt, false)) issues.push_back("ladders.dt: steps must decrease");
  if (!issues.empty()) throw ConfigError(std::move(issues));

  struct Table {
    std::string name;
    std::vector<double> values;
    std::vector<SimConfig> cfgs;
  };
  std::vector<Table> tables;
  if (!ladders.n.empty()) {
    Table t{"n", {}, {}};
    for (int n : ladders.n) {
      auto c = cfg;
      c.cutoff = n;
      c.grid = std::max(2 * n + 1, static_cast<int>(std::llround(static_cast<double>(cfg.grid) * n /
                                                                 cfg.cutoff)));
      t.values.push_back(n);
      t.cfgs.push_back(c);
    }
    tables.push_back(std::move(t));
  }
  if (!ladders.epsilon.empty()) {
    Table t{"epsilon", {}, {}};
    for (double e : ladders.epsilon) {
      auto c = cfg;
      c.epsilon = e;
      t.values.push_back(e);
      t.cfgs.push_back(c);
    }
    tables.push_back(std::move(t));
  }
  if (!ladders.dt.empty()) {
    Table t{"dt", {}, {}};
    for (double dt : ladders.dt) {
      auto c = cfg;
      c.dt = dt;
      t.values.push_back(dt);
      t.cfgs.push_back(c);
    }
    tables.push_back(std::move(t));
  }

  double coarse_dt = cfg.dt;
  for (const auto& t : tables) {
    for (const auto& c : t.cfgs) coarse_dt = std::max(coarse_dt, c.dt);
  }
  const auto coarse_steps = static_cast<std::size_t>(std::llround(cfg.T / coarse_dt));
  const std::size_t stride = std::max<std::size_t>(1, coarse_steps / 64);
  const double interval = coarse_dt * static_cast<double>(stride);

  ConvergenceReport rep;
  for (std::size_t s = 0; s * stride <= coarse_steps; ++s) {
    rep.sample_times.push_back(static_cast<double>(s) * interval);
  }

  std::vector<LadderRun> runs;
  std::vector<std::size_t> first;
  for (const auto& t : tables) {
    first.push_back(runs.size());
    for (const auto& c : t.cfgs) {
      c.validate();
      const double ratio = interval / c.dt;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw ConfigError("ladders.dt: each step must divide the coarsest step");
      }
      runs.push_back({c, static_cast<std::size_t>(std::llround(ratio)), {}});
    }
  }
  run_all(runs, threads);

  for (std::size_t k = 0; k < tables.size(); ++k) {
    LadderTable lt;
    lt.parameter = tables[k].name;
    lt.values = tables[k].values;
    std::vector<double> x;
    for (std::size_t i = 0; i + 1 < lt.values.size(); ++i) {
      const auto& a = runs[first[k] + i];
      const auto& b = runs[first[k] + i + 1];
      lt.distances.push_back(l2_distance(a, b, rep.sample_times));
      const double fine = lt.values[i + 1];
      x.push_back(lt.parameter == "n" ? 1.0 / fine : fine);
    }
    for (std::size_t i = 1; i < lt.distances.size(); ++i) {
      if (lt.distances[i] > lt.distances[i - 1] * (1.0 + 1e-12)) lt.cauchy_trend = false;
    }
    lt.rate = fit_rate(x, lt.distances);
    rep.pass = rep.pass && lt.cauchy_trend;
    rep.tables.push_back(std::move(lt));
  }
  return rep;
}

}  // namespace cbfed
