#include "cbfed/solver.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cbfed/error.hpp"
#include "cbfed/operators.hpp"
#include "cbfed/spectral.hpp"
#include "cbfed/summation.hpp"
#include "cbfed/transform.hpp"

namespace cbfed {

namespace {

constexpr const char* kLedgerHeader =
    "t,E_H2,E_V2,E_Lr,E_Lq,work_f,work_theta,F_Vdual2,chi_H2,E_L4";

constexpr double LedgerRow::*kLedgerColumns[] = {
    &LedgerRow::t,          &LedgerRow::E_H2,     &LedgerRow::E_V2,   &LedgerRow::E_Lr,
    &LedgerRow::E_Lq,       &LedgerRow::work_f,   &LedgerRow::work_theta,
    &LedgerRow::F_Vdual2,   &LedgerRow::chi_H2,   &LedgerRow::E_L4};

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

double safe_norm_h(const SpectralField& y) {
  const double n = norm_h(y);
  return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> EnergyLedger::column(double LedgerRow::*field) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

std::string EnergyLedger::to_csv() const {
  std::string out = kLedgerHeader;
  out += '\n';
  for (const auto& r : rows) {
    bool first = true;
    for (auto col : kLedgerColumns) {
      if (!first) out += ',';
      first = false;
      append_double(out, r.*col);
    }
    out += '\n';
  }
  return out;
}

void EnergyLedger::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_csv();
}

EnergyLedger EnergyLedger::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,E_H2,E_V2,E_Lr,E_Lq,work_f,work_theta", 0) != 0) {
    throw ConfigError("ledger CSV: missing or unexpected header");
  }
  EnergyLedger ledger;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LedgerRow row;
    std::size_t pos = 0;
    for (auto col : kLedgerColumns) {
      const auto end = line.find(',', pos);
      const auto field = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc()) throw ConfigError("ledger CSV: bad number '" + field + "'");
      row.*col = v;
      if (end == std::string::npos) break;
      pos = end + 1;
    }
    ledger.rows.push_back(row);
  }
  return ledger;
}

SpectralField taylor_green_ic(int cutoff, double amplitude) { return taylor_green(cutoff, amplitude); }

SpectralField forcing_profile(const SimConfig& cfg) {
  const auto& fs = cfg.forcing;
  SpectralField f(cfg.dim, cfg.cutoff);
  if (fs.kind == "taylor_green") {
    f = taylor_green(cfg.cutoff, 1.0);
  } else if (fs.kind == "kolmogorov") {
    WaveVector w;
    w.dim = cfg.dim;
    w.k[1] = fs.wavenumber;
    f.at(f.index_of(w), 0) = Complex(0.0, -0.5);
    f.at(f.index_of(-w), 0) = Complex(0.0, 0.5);
  } else if (fs.kind == "modes") {
    for (const auto& m : fs.modes) {
      WaveVector w;
      w.dim = cfg.dim;
      for (int i = 0; i < cfg.dim; ++i) w.k[i] = m.k[i];
      const auto a = f.index_of(w);
      const auto b = f.index_of(-w);
      for (int c = 0; c < cfg.dim; ++c) {
        f.at(a, c) += Complex(m.re[c], m.im[c]);
        if (b != a) f.at(b, c) += Complex(m.re[c], -m.im[c]);
      }
    }
  }
  f *= fs.amplitude;
  return leray_project(f);
}

SpectralField initial_condition(const SimConfig& cfg) {
  const auto& ic = cfg.ic;
  if (ic.kind == "taylor_green") return leray_project(taylor_green(cfg.cutoff, ic.amplitude));
  if (ic.kind == "random") {
    return random_field(cfg.dim, cfg.cutoff, cfg.seed, ic.amplitude, ic.max_mode);
  }
  if (ic.kind == "snapshot") {
    const auto snap = read_snapshot(ic.path);
    if (snap.dim() != cfg.dim) throw ConfigError("initial.path: snapshot dimension mismatch");
    return leray_project(resample(snap, cfg.cutoff));
  }
  return SpectralField(cfg.dim, cfg.cutoff);
}

GalerkinSolver::GalerkinSolver(SimConfig cfg, LawSet laws) : cfg_(std::move(cfg)) {
  cfg_.validate();
  y0_ = initial_condition(cfg_);
  f0_ = forcing_profile(cfg_);
  if (laws.empty()) {
    const double observed = to_physical(y0_, cfg_.grid).max_abs();
    for (const auto& law : cfg_.laws) {
      laws.push_back(mollify(law, cfg_.epsilon, cfg_.mollifier, observed));
    }
  }
  if (laws.size() != 1 && laws.size() != static_cast<std::size_t>(cfg_.dim)) {
    throw ConfigError("law set must hold one law or one per component");
  }
  laws_ = std::move(laws);
  k2_.resize(y0_.num_modes());
  for (std::size_t m = 0; m < k2_.size(); ++m) k2_[m] = y0_.wavevector(m).norm2();
}

SpectralField GalerkinSolver::forcing(double t) const {
  if (cfg_.forcing.omega == 0.0) return f0_;
  return std::cos(cfg_.forcing.omega * t) * f0_;
}

SpectralField GalerkinSolver::nonlinear_rhs(const SpectralField& y, double t, LedgerRow* row) const {
  if (!y.all_finite()) throw BlowUpError(t, safe_norm_h(y));
  const int d = cfg_.dim;
  const int grid = cfg_.eval_grid();
  const auto& p = cfg_.params;
  auto& tr = transform_for(d, grid);
  const auto u = to_physical(y, grid);
  const std::size_t np = u.num_points();

  std::vector<double> fac(np);
  CompensatedSum lq;
  CompensatedSum lr;
  CompensatedSum l4;
  for (std::size_t x = 0; x < np; ++x) {
    double m2 = 0.0;
    for (int c = 0; c < d; ++c) m2 += u.at(x, c) * u.at(x, c);
    const double fq = abs_power_factor(m2, p.q);
    const double fr = abs_power_factor(m2, p.r);
    fac[x] = p.alpha * fq + p.beta * fr;
    if (row) {
      lq += fq * m2;
      lr += fr * m2;
      l4 += m2 * m2;
    }
  }

  SpectralField out(d, cfg_.cutoff);
  std::vector<double> acc(np);
  std::vector<double> du(np);
  CompensatedSum work;
  CompensatedSum chi2;
  for (int i = 0; i < d; ++i) {
    const auto ui = u.component(i);
    const auto& law = *laws_[laws_.size() == 1 ? 0 : static_cast<std::size_t>(i)];
    if (law.is_zero()) {
      for (std::size_t x = 0; x < np; ++x) acc[x] = fac[x] * ui[x];
    } else {
      for (std::size_t x = 0; x < np; ++x) {
        const double th = law(ui[x]);
        acc[x] = fac[x] * ui[x] + th;
        if (row) {
          work += th * ui[x];
          chi2 += th * th;
        }
      }
    }
    for (int j = 0; j < d; ++j) {
      tr.synthesize(y, i, du, j);
      const auto uj = u.component(j);
      for (std::size_t x = 0; x < np; ++x) acc[x] += uj[x] * du[x];
    }
    tr.analyze(acc, out, i);
  }
  out = leray_project(out);
  out *= -1.0;
  const auto f = forcing(t);
  out += f;
  if (!out.all_finite()) throw BlowUpError(t, safe_norm_h(y));

  if (row) {
    const double cell = u.cell_volume();
    row->t = t;
    row->E_H2 = norm_h2(y);
    row->E_V2 = norm_v2(y);
    row->E_Lr = cell * lr.value();
    row->E_Lq = cell * lq.value();
    row->E_L4 = cell * l4.value();
    row->work_theta = cell * work.value();
    row->chi_H2 = cell * chi2.value();
    row->work_f = inner_h(f, y);
    row->F_Vdual2 = norm_vdual2(f);
  }
  return out;
}

SpectralField GalerkinSolver::rhs(const SpectralField& y, double t) const {
  auto out = nonlinear_rhs(y, t);
  out.axpy(-cfg_.params.mu, stokes_apply(y));
  return out;
}

LedgerRow GalerkinSolver::measure(const SpectralField& y, double t) const {
  LedgerRow row;
  nonlinear_rhs(y, t, &row);
  return row;
}

void GalerkinSolver::apply_factor(SpectralField& y, double h) const {
  const int d = y.dim();
  auto data = y.data();
  const double mu = cfg_.params.mu;
  for (std::size_t m = 0; m < k2_.size(); ++m) {
    if (k2_[m] == 0.0) continue;
    const double e = std::exp(-mu * k2_[m] * h);
    for (int c = 0; c < d; ++c) data[m * d + c] *= e;
  }
}

SpectralField GalerkinSolver::step(const SpectralField& y, double t, double dt) const {
  const auto k1 = nonlinear_rhs(y, t);
  if (cfg_.scheme == Scheme::IFRK2) {
    auto a = y;
    a.axpy(dt, k1);
    apply_factor(a, dt);
    const auto k2 = nonlinear_rhs(a, t + dt);
    auto next = y;
    next.axpy(0.5 * dt, k1);
    apply_factor(next, dt);
    next.axpy(0.5 * dt, k2);
    if (!next.all_finite()) throw BlowUpError(t + dt, safe_norm_h(next));
    return next;
  }
  const double h2 = 0.5 * dt;
  // stage 2: E(h/2)(y + h/2 k1)
  auto s2 = y;
  s2.axpy(h2, k1);
  apply_factor(s2, h2);
  const auto k2 = nonlinear_rhs(s2, t + h2);
  // stage 3: E(h/2) y + h/2 k2
  auto ey_half = y;
  apply_factor(ey_half, h2);
  auto s3 = ey_half;
  s3.axpy(h2, k2);
  const auto k3 = nonlinear_rhs(s3, t + h2);
  // stage 4: E(h) y + h E(h/2) k3
  auto ek3 = k3;
  apply_factor(ek3, h2);
  auto ey = ey_half;
  apply_factor(ey, h2);
  auto s4 = ey;
  s4.axpy(dt, ek3);
  const auto k4 = nonlinear_rhs(s4, t + dt);
  // combine: E(h) y + h/6 (E(h) k1 + 2 E(h/2)(k2 + k3) + k4)
  auto ek1 = k1;
  apply_factor(ek1, dt);
  auto mid = k2;
  mid += k3;
  apply_factor(mid, h2);
  auto next = ey;
  next.axpy(dt / 6.0, ek1);
  next.axpy(dt / 3.0, mid);
  next.axpy(dt / 6.0, k4);
  if (!next.all_finite()) throw BlowUpError(t + dt, safe_norm_h(next));
  return next;
}

PhysicalField GalerkinSolver::chi_grid(const SpectralField& y) const {
  return apply_law(laws_, to_physical(y, cfg_.grid));
}

RunResult GalerkinSolver::integrate(const StepObserver& observer) const {
  return integrate_from(y0_, observer);
}

RunResult GalerkinSolver::integrate_from(const SpectralField& start,
                                         const StepObserver& observer) const {
  if (!start.same_shape(y0_)) throw ConfigError("start state does not match the configuration");
  RunResult res;
  auto& traj = res.trajectory;
  const std::size_t steps = cfg_.steps();
  const auto stride = static_cast<std::size_t>(cfg_.snapshot_stride());
  const double dt = cfg_.dt;
  SpectralField y = start;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * dt;
    try {
      res.ledger.rows.push_back(measure(y, t));
    } catch (const BlowUpError& e) {
      traj.blowup = BlowUp{e.time(), e.norm_h()};
      break;
    }
    if (observer) observer(i, t, y);
    if (i % stride == 0 || i == steps) {
      traj.times.push_back(t);
      traj.states.push_back(y);
      traj.chi_times.push_back(t);
      traj.chi.push_back(chi_grid(y));
    }
    if (i == steps) break;
    try {
      y = step(y, t, dt);
    } catch (const BlowUpError& e) {
      traj.blowup = BlowUp{e.time(), e.norm_h()};
      break;
    }
  }
  traj.final_state = y;
  return res;
}

}  // namespace cbfed
