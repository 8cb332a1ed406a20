// Desk-scale acceptance run. One PASS/FAIL line per criterion; exit status
// is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <cbfed/diagnostics.hpp>
#include <cbfed/error.hpp>
#include <cbfed/law.hpp>
#include <cbfed/operators.hpp>
#include <cbfed/regularization.hpp>
#include <cbfed/solver.hpp>
#include <cbfed/spectral.hpp>

#include "oracles.hpp"

using namespace cbfed;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimConfig zigzag_run(double dt) {
  SimConfig c;
  c.dim = 2;
  c.params = {0.1, -0.5, 1.0, 3.0, 2.0};
  c.cutoff = 16;
  c.grid = 48;
  c.dt = dt;
  c.T = 1.0;
  c.epsilon = 0.1;
  c.laws = {zigzag_example()};
  return c;
}

void check_taylor_green(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig c;
  c.params = {0.1, 0.0, 0.0, 3.0, 2.0};
  c.cutoff = 16;
  c.grid = 48;
  c.dt = 1e-3;
  c.T = 1.0;
  c.laws = {builtin_law("zero")};
  c.ic.amplitude = 1.0;
  const auto res = GalerkinSolver(c).integrate();
  const double wall = seconds_since(t0);
  const double exact = 2.0 * kPi * kPi * std::exp(-0.4);
  const double rel = std::abs(res.ledger.rows.back().E_H2 - exact) / exact;
  o.detail << "relative error " << rel << ", " << wall << " s";
  o.require(!res.trajectory.blowup, "run completed");
  o.require(rel <= 1e-7, "relative error <= 1e-7");
  o.require(wall < 10.0, "under 10 s");
}

void check_energy_equality(Outcome& o) {
  std::vector<double> rel;
  double dt = 1e-3;
  for (int i = 0; i < 4; ++i, dt *= 0.5) {
    const auto c = zigzag_run(dt);
    const auto res = GalerkinSolver(c).integrate();
    o.require(!res.trajectory.blowup, "run completed");
    rel.push_back(energy_balance_residual(res.ledger, c).relative);
  }
  o.detail << "relative residual";
  for (double r : rel) o.detail << ' ' << r;
  o.require(rel[0] <= 1e-5, "residual <= 1e-5 |y0|^2 at dt = 1e-3");
  o.detail << "; ratios";
  for (std::size_t i = 1; i < rel.size(); ++i) {
    const double ratio = rel[i - 1] / rel[i];
    o.detail << ' ' << ratio;
    o.require(ratio >= 3.0 && ratio <= 5.0, "about 4x per halving");
  }
}

void check_apriori(Outcome& o) {
  o.detail << "min margin / tolerance:";
  for (double amp : {0.0, 1.0, 10.0}) {
    auto c = zigzag_run(1e-3);
    c.forcing.kind = "taylor_green";
    c.forcing.amplitude = amp;
    const GalerkinSolver s(c);
    const auto res = s.integrate();
    o.require(!res.trajectory.blowup, "run completed");
    const auto rep = apriori_margin(res.ledger, c, s.laws());
    o.detail << " A=" << amp << ": " << rep.min_margin << " / " << rep.tolerance;
    o.require(rep.pass, "margin >= -tolerance at amplitude " + std::to_string(amp));
  }
}

void check_sign_floor(Outcome& o) {
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto reg = mollify(zigzag_example(), eps);
    const auto& s = reg->sign_constants();
    const auto check = check_integral_floor({reg}, 2, 8, 24, 100, 17);
    o.detail << " eps=" << eps << ": c1=" << s.c1 << " c2=" << s.c2
             << " violations=" << check.violations;
    o.require(std::abs(s.c1 - (1.0 + eps)) <= 2.0 * reg->spacing(), "c1 = 1 + eps");
    o.require(std::abs(s.c2 - 3.0) <= 1e-3, "c2 = 3");
    o.require(check.samples == 100 && check.violations == 0, "floor holds");
    o.require(std::abs(check.floor + 2.0 * s.c1 * s.c2 * 4.0 * kPi * kPi) <= 1e-9, "floor value");
  }
}

void check_regularization_suite(Outcome& o) {
  const auto z = zigzag_example();
  const std::vector<double> ladder{0.2, 0.1, 0.05};
  std::size_t sandwich_bad = 0;
  std::size_t monotone_bad = 0;
  for (double eps : ladder) {
    const RegularizedLaw reg(z, eps);
    o.require(reg.table_size() == 4096, "4096 nodes");
    for (std::size_t j = 0; j < reg.table_size(); ++j) {
      const auto e = envelopes(z, reg.node(j), eps);
      const double v = reg.table_value(j);
      if (v < e.lower - 1e-12 || v > e.upper + 1e-12) ++sandwich_bad;
    }
  }
  const RegularizedLaw grid(z, ladder.front());
  for (std::size_t j = 0; j < grid.table_size(); ++j) {
    const double xi = grid.node(j);
    for (std::size_t k = 1; k < ladder.size(); ++k) {
      const auto wide = envelopes(z, xi, ladder[k - 1]);
      const auto narrow = envelopes(z, xi, ladder[k]);
      if (narrow.lower < wide.lower || narrow.upper > wide.upper) ++monotone_bad;
    }
  }
  // continuity points at assorted distances from the breaks
  std::vector<double> points;
  for (double b : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    for (double off : {-0.45, -0.13, 0.07, 0.3}) points.push_back(b + off);
  }
  double worst_excess = -std::numeric_limits<double>::infinity();
  double finest = 0.0;
  bool decreasing = true;
  for (double xi : points) {
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
      const RegularizedLaw reg(z, eps);
      const double err = std::abs(reg(xi) - z(xi));
      const auto e = envelopes(z, xi, eps);
      worst_excess = std::max(worst_excess, err - (e.upper - e.lower));
      decreasing = decreasing && err <= prev + 1e-12;
      prev = err;
    }
    finest = std::max(finest, prev);
  }
  o.detail << "sandwich violations " << sandwich_bad << ", envelope monotonicity violations "
           << monotone_bad << ", max(err - osc) " << worst_excess << ", max err at eps=0.0125 "
           << finest;
  o.require(sandwich_bad == 0, "sandwich");
  o.require(monotone_bad == 0, "envelope monotonicity");
  o.require(points.size() == 20 && worst_excess <= 1e-12, "error within oscillation");
  o.require(decreasing && finest <= 1e-10, "pointwise convergence");
}

void check_hvi(Outcome& o) {
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double eps : {0.2, 0.1, 0.05}) {
    auto c = zigzag_run(1e-3);
    c.epsilon = eps;
    const auto rep = hvi_check(GalerkinSolver(c));
    o.detail << " eps=" << eps << ": " << rep.rows.size() << " samples, worst margin "
             << rep.worst_margin << ", max gap " << rep.max_gap;
    o.require(rep.pass && rep.violations == 0, "margin >= -gap at eps " + std::to_string(eps));
    o.require(rep.max_gap < prev_gap, "gap decreases along the eps ladder");
    prev_gap = rep.max_gap;
  }
}

void check_contraction(Outcome& o) {
  const auto c = zigzag_run(1e-3);
  const auto k = gronwall_constants(c);
  const auto pert = contraction_study(c, 1e-6);
  const auto same = contraction_study(c, 0.0);
  o.detail << "K=" << k.K << " rate " << k.rate() << ", max w/envelope " << pert.max_ratio
           << ", w(T) " << pert.w.back();
  o.require(k.K == 1.0, "K = 1");
  o.require(pert.pass, "w <= envelope");
  o.require(same.identical, "delta = 0 bit-identical");

  SimConfig c3;
  c3.dim = 3;
  c3.params = {0.75, -0.5, 1.0, 3.0, 2.0};
  c3.cutoff = 4;
  c3.grid = 12;
  c3.dt = 1e-3;
  c3.T = 0.1;
  c3.ic.kind = "random";
  const auto ok3 = contraction_study(c3, 1e-6);
  o.detail << "; 3D 2bmu=1.5 max ratio " << ok3.max_ratio;
  o.require(ok3.constants.regime == GronwallRegime::ThreeDCritical, "critical regime");
  o.require(ok3.pass, "3D 2bmu = 1.5 passes");
  c3.params.mu = 0.4;
  try {
    contraction_study(c3, 1e-6);
    o.require(false, "3D 2bmu = 0.8 refused");
  } catch (const RegimeError& e) {
    const std::string msg = e.what();
    o.detail << "; refused: " << msg;
    o.require(msg.find("2βμ ≤ 1") != std::string::npos, "refusal cites 2βμ ≤ 1");
  }
}

void check_operator_identities(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kFields = 100;
  double worst_b = 0.0;
  double worst_anti = 0.0;
  double worst_triad = 0.0;
  double worst_c = 0.0;
  double worst_mono = 0.0;
  for (int i = 0; i < kFields; ++i) {
    const int dim = i % 2 ? 3 : 2;
    const int n = dim == 2 ? 6 : 3;
    const int grid = dim == 2 ? 40 : 20;
    const auto y = random_field(dim, n, 100 + i, 1.0, n);
    const auto p = random_field(dim, n, 300 + i, 1.0, n);
    const auto s = random_field(dim, n, 500 + i, 1.0, n);
    const auto by = convection_B(y, grid);
    worst_b = std::max(worst_b, std::abs(inner_h(by, y)) / (norm_h(by) * norm_h(y)));

    const double bqs = trilinear_b(p, y, s, grid);
    const double bsq = trilinear_b(p, s, y, grid);
    worst_anti = std::max(worst_anti, std::abs(bqs + bsq) / std::max(std::abs(bqs), 1e-300));
    if (i < 20) {
      const double ref = oracle::trilinear_triads(p, y, s);
      worst_triad = std::max(worst_triad, std::abs(bqs - ref) / std::abs(ref));
    }

    // pairing against |y|^{r+1} summed point by point without the FFT
    const double r = i % 4 < 2 ? 3.0 : 5.0;
    const int og = dim == 2 ? 6 * n + 2 : 6 * n + 1;
    double direct = 0.0;
    const double h = 2.0 * kPi / og;
    const std::size_t pts = static_cast<std::size_t>(std::pow(og, dim));
    for (std::size_t q = 0; q < pts; ++q) {
      std::array<double, 3> x{};
      std::size_t rem = q;
      for (int a = 0; a < dim; ++a) {
        x[a] = h * static_cast<double>(rem % og);
        rem /= og;
      }
      double m2 = 0.0;
      for (int c = 0; c < dim; ++c) m2 += std::pow(oracle::eval_point(y, c, x), 2);
      direct += std::pow(m2, 0.5 * (r + 1.0));
    }
    direct *= std::pow(h, dim);
    const double paired = inner_h(damping_C(y, r, og), y);
    worst_c = std::max(worst_c, std::abs(paired - direct) / direct);

    const auto gap = monotonicity_gap(y, p, r, grid);
    worst_mono = std::max(worst_mono, (gap.rhs - gap.lhs) / std::max(gap.lhs, 1e-300));
    worst_mono = std::max(worst_mono, -gap.rhs);
  }
  const double wall = seconds_since(t0);
  o.detail << kFields << " fields: <B(y),y> " << worst_b << ", antisymmetry " << worst_anti
           << ", triad oracle " << worst_triad << ", <C(y),y> " << worst_c
           << ", monotonicity deficit " << worst_mono << ", " << wall << " s";
  o.require(worst_b <= 1e-9, "<B(y),y> = 0");
  o.require(worst_anti <= 1e-9, "b antisymmetric");
  o.require(worst_triad <= 1e-9, "b matches triad sum");
  o.require(worst_c <= 1e-9, "<C(y),y> = |y|^{r+1}");
  o.require(worst_mono <= 1e-9, "monotonicity gap >= 0");
  o.require(wall < 60.0, "under 60 s");
}

void check_smoothing(Outcome& o) {
  std::size_t grew = 0;
  std::size_t checks = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const int dim = seed % 2 ? 3 : 2;
    const auto y = random_field(dim, 5, 900 + seed, 1.0, 5);
    for (int n = 1; n <= 40; ++n) {
      ++checks;
      if (norm_h(smoothing_filter(y, n)) > norm_h(y)) ++grew;
    }
  }
  const auto y = random_field(2, 6, 7, 1.0, 6);
  bool strict = true;
  double prev = std::numeric_limits<double>::infinity();
  int resolved = 0;
  for (int n = 2; n <= 4096; n *= 2) {
    resolved = 0;
    for (std::size_t m = 0; m < y.num_modes(); ++m) {
      if (y.wavevector(m).norm2() < n * n && norm_h2(y) > 0.0) ++resolved;
    }
    const double res = norm_h(y - smoothing_filter(y, n));
    if (resolved >= 3) {
      strict = strict && res < prev;
      prev = res;
    }
  }
  o.detail << checks << " contraction checks, " << grew << " increases; residual at n=4096 "
           << prev << " of " << norm_h(y);
  o.require(grew == 0, "|P y| <= |y|");
  o.require(strict, "|(I - P) y| strictly decreasing in n");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Taylor-Green decay", check_taylor_green},
      {"energy equality", check_energy_equality},
      {"a-priori bound", check_apriori},
      {"sign-constant floor", check_sign_floor},
      {"envelopes and regularization", check_regularization_suite},
      {"HVI residual", check_hvi},
      {"uniqueness contraction", check_contraction},
      {"operator identities", check_operator_identities},
      {"smoothing filter", check_smoothing},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures;
}
