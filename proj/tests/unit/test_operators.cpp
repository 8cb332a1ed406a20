#include <gtest/gtest.h>

#include <cbfed/error.hpp>
#include <cbfed/operators.hpp>
#include <cbfed/spectral.hpp>

#include <numbers>

#include "oracles.hpp"

using namespace cbfed;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField sine_x2(int cutoff) {
  // (sin x2, 0)
  SpectralField y(2, cutoff);
  WaveVector w;
  w.k = {0, 1, 0};
  y.at(y.index_of(w), 0) = Complex(0.0, -0.5);
  y.at(y.index_of(-w), 0) = Complex(0.0, 0.5);
  return y;
}

PhysicalField constant_field(int grid, double a) {
  PhysicalField u(2, grid);
  for (std::size_t p = 0; p < u.num_points(); ++p) u.at(p, 0) = a;
  return u;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

}  // namespace

TEST(Params, ValidationAggregates) {
  OperatorParams p;
  EXPECT_NO_THROW(p.validate());
  p.mu = 0.0;
  p.r = 2.0;
  p.q = 3.0;
  const auto v = p.violations();
  EXPECT_EQ(v.size(), 2u);
  try {
    p.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.issues().size(), 2u);
    EXPECT_NE(std::string(e.what()).find("q < r required"), std::string::npos);
  }
}

TEST(Stokes, DiagonalScaling) {
  SpectralField y(2, 3);
  WaveVector w;
  w.k = {1, 2, 0};
  y.at(y.index_of(w), 0) = Complex(2.0, -1.0);
  const auto ay = stokes_apply(y);
  EXPECT_EQ(ay.at(ay.index_of(w), 0), Complex(10.0, -5.0));
  const auto tg = taylor_green(3, 1.0);
  EXPECT_EQ(stokes_apply(tg), 2.0 * tg);
  EXPECT_NEAR(inner_h(stokes_apply(tg), tg), norm_v2(tg), 1e-12);
}

TEST(Trilinear, MatchesTriadSum) {
  for (int dim : {2, 3}) {
    const int n = dim == 2 ? 4 : 2;
    const auto p = random_field(dim, n, 1, 1.0, n);
    const auto q = random_field(dim, n, 2, 1.0, n);
    const auto s = random_field(dim, n, 3, 1.0, n);
    const double ref = oracle::trilinear_triads(p, q, s);
    EXPECT_NEAR(trilinear_b(p, q, s, 3 * n + 1), ref, 1e-11 * (1.0 + std::abs(ref)));
  }
}

TEST(Trilinear, AntisymmetryAndZeros) {
  const int n = 6;
  const int grid = default_eval_grid(n);
  for (int seed = 0; seed < 5; ++seed) {
    const auto p = random_field(2, n, 10 + seed, 1.0, n);
    const auto q = random_field(2, n, 20 + seed, 1.0, n);
    const auto s = random_field(2, n, 30 + seed, 1.0, n);
    const double scale = norm_h(p) * norm_v(q) * norm_h(s);
    EXPECT_NEAR(trilinear_b(p, q, q, grid), 0.0, 1e-12 * scale);
    EXPECT_NEAR(trilinear_b(p, q, s, grid) + trilinear_b(p, s, q, grid), 0.0, 1e-12 * scale);
  }
  const SpectralField zero(2, n);
  const auto p = random_field(2, n, 1);
  EXPECT_EQ(trilinear_b(zero, p, p, grid), 0.0);
  EXPECT_EQ(trilinear_b(p, zero, p, grid), 0.0);
}

TEST(Trilinear, RejectsAliasedGrid) {
  const auto p = random_field(2, 4, 1);
  EXPECT_THROW(trilinear_b(p, p, p, 12), ResolutionError);
  EXPECT_NO_THROW(trilinear_b(p, p, p, 13));
  EXPECT_THROW(convection_B(p, 12), ResolutionError);
}

TEST(Convection, TaylorGreenIsSteadyEuler) {
  const auto tg = taylor_green(8, 1.0);
  const auto b = convection_B(tg, default_eval_grid(8));
  for (const auto& c : b.data()) EXPECT_LT(std::abs(c), 1e-14);
  EXPECT_EQ(convection_B(SpectralField(2, 4), 13), SpectralField(2, 4));
}

TEST(Convection, OrthogonalToState) {
  for (int dim : {2, 3}) {
    const int n = dim == 2 ? 8 : 3;
    const auto y = random_field(dim, n, 77, 2.0, n);
    const auto b = convection_B(y, default_eval_grid(n));
    EXPECT_LT(b.divergence_defect(), 1e-13);
    EXPECT_NEAR(inner_h(b, y), 0.0, 1e-12 * norm_h(y) * norm_h(y) * norm_v(y));
    // pairing with another field equals the triad oracle
    const auto s = random_field(dim, n, 78, 1.0, n);
    const double ref = oracle::trilinear_triads(y, y, s);
    EXPECT_NEAR(inner_h(b, s), ref, 1e-11 * (1.0 + std::abs(ref)));
  }
}

TEST(Damping, IdentityAtUnitExponent) {
  const auto y = random_field(2, 5, 4);
  EXPECT_LT(max_abs_diff(damping_C(y, 1.0, 24), y), 1e-15);
  EXPECT_LT(max_abs_diff(pumping_Ctilde(y, 1.0, 24), y), 1e-15);
  EXPECT_EQ(damping_C(SpectralField(2, 3), 3.0, 12), SpectralField(2, 3));
  EXPECT_THROW(damping_C(y, 0.5, 24), ConfigError);
}

TEST(Damping, SineFourthPower) {
  const auto p = sine_x2(4);
  const auto u = to_physical(p, 16);
  EXPECT_NEAR(power_pairing(u, 3.0), 1.5 * pi * pi, 1e-12);
  EXPECT_NEAR(inner_h(damping_C(p, 3.0, 16), p), 1.5 * pi * pi, 1e-12);
  EXPECT_NEAR(inner_h(pumping_Ctilde(p, 3.0, 16), p), 1.5 * pi * pi, 1e-12);
}

TEST(Damping, PairingIsLpNorm) {
  const auto y = random_field(2, 6, 8, 1.0, 6);
  const int grid = default_eval_grid(6);
  const auto u = to_physical(y, grid);
  for (double r : {1.0, 1.5, 2.0, 3.0, 4.2, 5.0}) {
    const double lp = std::pow(norm_lp(u, r + 1.0), r + 1.0);
    EXPECT_NEAR(power_pairing(u, r), lp, 1e-12 * lp);
  }
}

TEST(Monotonicity, ConstantFieldsByHand) {
  const double a = 1.3;
  const double b = -0.4;
  const auto g = monotonicity_gap(constant_field(8, a), constant_field(8, b), 3.0);
  const double vol = 4.0 * pi * pi;
  EXPECT_NEAR(g.lhs, (a * a * a - b * b * b) * (a - b) * vol, 1e-12);
  EXPECT_NEAR(g.rhs, 0.5 * (a * a + b * b) * (a - b) * (a - b) * vol, 1e-12);
}

TEST(Monotonicity, RandomPairs) {
  for (int seed = 0; seed < 20; ++seed) {
    const auto p = random_field(2, 5, 2 * seed, 1.0 + seed % 3);
    const auto q = random_field(2, 5, 2 * seed + 1, 1.0);
    for (double r : {1.0, 2.0, 3.0, 4.5}) {
      const auto g = monotonicity_gap(p, q, r, 24);
      EXPECT_GE(g.rhs, 0.0);
      EXPECT_GE(g.lhs - g.rhs, -1e-12 * g.lhs);
      // local Lipschitz bound
      const auto pu = to_physical(p, 24);
      const auto qu = to_physical(q, 24);
      const double lp = norm_lp(pu, r + 1.0);
      const double lq = norm_lp(qu, r + 1.0);
      const double ld = norm_lp(to_physical(p - q, 24), r + 1.0);
      EXPECT_LE(g.lhs, r * std::pow(lp + lq, r - 1.0) * ld * ld * (1.0 + 1e-12));
    }
  }
  const auto p = random_field(2, 4, 1);
  const auto g = monotonicity_gap(p, p, 3.0, 16);
  EXPECT_EQ(g.lhs, 0.0);
  EXPECT_EQ(g.rhs, 0.0);
}

TEST(Convection, BoundAgainstDamping) {
  const int n = 6;
  const int grid = default_eval_grid(n);
  for (int seed = 0; seed < 10; ++seed) {
    const auto p = random_field(2, n, 100 + seed, 1.5, n);
    const auto s = random_field(2, n, 200 + seed, 1.0, n);
    for (double r : {3.0, 4.0, 6.0}) {
      const double lr = norm_lp(p, r + 1.0, grid);
      const double bound = std::pow(lr, (r + 1.0) / (r - 1.0)) *
                           std::pow(norm_h(p), (r - 3.0) / (r - 1.0)) * norm_v(s);
      EXPECT_LE(std::abs(trilinear_b(p, p, s, grid)), bound);
    }
  }
}

TEST(Drift, TaylorGreenIsViscousOnly) {
  OperatorParams params;
  params.alpha = 0.0;
  params.beta = 0.0;
  params.mu = 0.1;
  const auto tg = taylor_green(6, 1.0);
  const auto f = drift_F(tg, params, default_eval_grid(6));
  EXPECT_LT(max_abs_diff(f, 0.2 * tg), 1e-14);
  EXPECT_EQ(drift_F(SpectralField(2, 6), OperatorParams{}, default_eval_grid(6)),
            SpectralField(2, 6));
}

TEST(Drift, EnergyPairing) {
  OperatorParams params;
  params.mu = 0.07;
  params.alpha = -0.5;
  params.beta = 1.2;
  params.r = 3.0;
  params.q = 2.0;
  const int n = 6;
  const int grid = default_eval_grid(n);
  for (int seed = 0; seed < 5; ++seed) {
    const auto y = random_field(2, n, seed, 1.0, n);
    const auto u = to_physical(y, grid);
    const double expected = params.mu * norm_v2(y) + params.alpha * power_pairing(u, params.q) +
                            params.beta * power_pairing(u, params.r);
    const double got = inner_h(drift_F(y, params, grid), y);
    // discrete Parseval makes truncation invisible to the pairing
    EXPECT_NEAR(got, expected, 1e-12 * std::abs(expected));
  }
}
