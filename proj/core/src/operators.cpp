#include "cbfed/operators.hpp"

#include <sstream>

#include "cbfed/error.hpp"
#include "cbfed/spectral.hpp"
#include "cbfed/summation.hpp"
#include "cbfed/transform.hpp"

namespace cbfed {

namespace {

void require_dealiased(int cutoff, int grid) {
  if (grid <= 3 * cutoff) {
    std::ostringstream msg;
    msg << "grid " << grid << " does not dealias the quadratic term at cutoff " << cutoff
        << " (need N > 3n)";
    throw ResolutionError(msg.str());
  }
}

}  // namespace

std::vector<std::string> OperatorParams::violations() const {
  std::vector<std::string> out;
  if (!(mu > 0.0)) out.emplace_back("physics.mu: mu > 0 required");
  if (!(beta >= 0.0)) out.emplace_back("physics.beta: beta >= 0 required");
  if (!(r >= 1.0)) out.emplace_back("physics.r: r >= 1 required");
  if (!(q >= 1.0)) out.emplace_back("physics.q: q >= 1 required");
  if (!(q < r)) out.emplace_back("physics.q: q < r required");
  if (!std::isfinite(alpha)) out.emplace_back("physics.alpha: must be finite");
  return out;
}

void OperatorParams::validate() const {
  auto v = violations();
  if (!v.empty()) throw ConfigError(std::move(v));
}

SpectralField stokes_apply(const SpectralField& y) {
  SpectralField out = y;
  for (std::size_t m = 0; m < out.num_modes(); ++m) {
    const double k2 = out.wavevector(m).norm2();
    for (int c = 0; c < out.dim(); ++c) out.at(m, c) *= k2;
  }
  return out;
}

double trilinear_b(const SpectralField& p, const SpectralField& q, const SpectralField& s,
                   int grid) {
  if (!p.same_shape(q) || !p.same_shape(s)) throw ConfigError("trilinear_b: field shapes differ");
  require_dealiased(p.cutoff(), grid);
  const int d = p.dim();
  auto& tr = transform_for(d, grid);
  const auto pu = to_physical(p, grid);
  const auto su = to_physical(s, grid);
  std::vector<double> dq(tr.num_points());
  CompensatedSum sum;
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      tr.synthesize(q, j, dq, i);
      const auto pi = pu.component(i);
      const auto sj = su.component(j);
      for (std::size_t x = 0; x < dq.size(); ++x) sum += pi[x] * dq[x] * sj[x];
    }
  }
  return pu.cell_volume() * sum.value();
}

SpectralField convection_B(const SpectralField& y, int grid) {
  require_dealiased(y.cutoff(), grid);
  const int d = y.dim();
  auto& tr = transform_for(d, grid);
  const auto u = to_physical(y, grid);
  std::vector<double> du(tr.num_points());
  std::vector<double> adv(tr.num_points());
  SpectralField out(d, y.cutoff());
  for (int j = 0; j < d; ++j) {
    std::fill(adv.begin(), adv.end(), 0.0);
    for (int i = 0; i < d; ++i) {
      tr.synthesize(y, j, du, i);
      const auto ui = u.component(i);
      for (std::size_t x = 0; x < adv.size(); ++x) adv[x] += ui[x] * du[x];
    }
    tr.analyze(adv, out, j);
  }
  return leray_project(out);
}

PhysicalField power_law(const PhysicalField& u, double exponent) {
  PhysicalField out(u.dim(), u.grid_size());
  const int d = u.dim();
  for (std::size_t x = 0; x < u.num_points(); ++x) {
    double m2 = 0.0;
    for (int c = 0; c < d; ++c) m2 += u.at(x, c) * u.at(x, c);
    const double f = abs_power_factor(m2, exponent);
    for (int c = 0; c < d; ++c) out.at(x, c) = f * u.at(x, c);
  }
  return out;
}

SpectralField damping_C(const SpectralField& y, double r, int grid) {
  if (!(r >= 1.0)) throw ConfigError("damping exponent must be >= 1");
  return to_spectral(power_law(to_physical(y, grid), r), y.cutoff(), true);
}

SpectralField pumping_Ctilde(const SpectralField& y, double q, int grid) {
  if (!(q >= 1.0)) throw ConfigError("pumping exponent must be >= 1");
  return to_spectral(power_law(to_physical(y, grid), q), y.cutoff(), true);
}

double power_pairing(const PhysicalField& u, double exponent) {
  return lp_power(u, exponent + 1.0);
}

MonotonicityGap monotonicity_gap(const PhysicalField& p, const PhysicalField& q, double r) {
  if (!(r >= 1.0)) throw ConfigError("monotonicity_gap: r >= 1 required");
  const int d = p.dim();
  CompensatedSum lhs;
  CompensatedSum rhs;
  for (std::size_t x = 0; x < p.num_points(); ++x) {
    double p2 = 0.0;
    double q2 = 0.0;
    double w2 = 0.0;
    for (int c = 0; c < d; ++c) {
      p2 += p.at(x, c) * p.at(x, c);
      q2 += q.at(x, c) * q.at(x, c);
      const double w = p.at(x, c) - q.at(x, c);
      w2 += w * w;
    }
    const double fp = abs_power_factor(p2, r);
    const double fq = abs_power_factor(q2, r);
    double dot = 0.0;
    for (int c = 0; c < d; ++c) {
      dot += (fp * p.at(x, c) - fq * q.at(x, c)) * (p.at(x, c) - q.at(x, c));
    }
    lhs += dot;
    rhs += 0.5 * (fp + fq) * w2;
  }
  const double cell = p.cell_volume();
  return {cell * lhs.value(), cell * rhs.value()};
}

MonotonicityGap monotonicity_gap(const SpectralField& p, const SpectralField& q, double r,
                                 int grid) {
  return monotonicity_gap(to_physical(p, grid), to_physical(q, grid), r);
}

SpectralField drift_F(const SpectralField& y, const OperatorParams& params, int grid) {
  params.validate();
  SpectralField out = stokes_apply(y);
  out *= params.mu;
  out += convection_B(y, grid);
  const auto u = to_physical(y, grid);
  if (params.alpha != 0.0) {
    out.axpy(params.alpha, to_spectral(power_law(u, params.q), y.cutoff(), true));
  }
  out.axpy(params.beta, to_spectral(power_law(u, params.r), y.cutoff(), true));
  return out;
}

}  // namespace cbfed
