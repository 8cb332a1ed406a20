#pragma once

// Brute-force reference evaluations used as independent oracles. Nothing
// here goes through the FFT path.

#include <cbfed/field.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cbfed::Complex;
using cbfed::SpectralField;

/// y(x) component c by direct summation of sum_k c_k exp(i k.x).
inline double eval_point(const SpectralField& y, int comp, const std::array<double, 3>& x) {
  Complex s{};
  for (std::size_t m = 0; m < y.num_modes(); ++m) {
    const auto w = y.wavevector(m);
    double phase = 0.0;
    for (int i = 0; i < y.dim(); ++i) phase += w.k[i] * x[i];
    s += y.at(m, comp) * std::polar(1.0, phase);
  }
  return s.real();
}

/// d/dx_axis of component c at x, by direct summation.
inline double eval_derivative(const SpectralField& y, int comp, int axis,
                              const std::array<double, 3>& x) {
  Complex s{};
  for (std::size_t m = 0; m < y.num_modes(); ++m) {
    const auto w = y.wavevector(m);
    double phase = 0.0;
    for (int i = 0; i < y.dim(); ++i) phase += w.k[i] * x[i];
    s += Complex(0.0, w.k[axis]) * y.at(m, comp) * std::polar(1.0, phase);
  }
  return s.real();
}

/// b(p, q, s) as a sum over wavevector triads: (2pi)^d sum_{k+l+m=0}
/// (p_k . i l) (q_l . s_m).
inline double trilinear_triads(const SpectralField& p, const SpectralField& q,
                               const SpectralField& s) {
  const int d = p.dim();
  Complex total{};
  for (std::size_t a = 0; a < p.num_modes(); ++a) {
    const auto ka = p.wavevector(a);
    for (std::size_t b = 0; b < q.num_modes(); ++b) {
      const auto kb = q.wavevector(b);
      cbfed::WaveVector kc;
      kc.dim = d;
      for (int i = 0; i < d; ++i) kc.k[i] = -ka.k[i] - kb.k[i];
      if (!s.contains(kc)) continue;
      const auto c = s.index_of(kc);
      Complex adv{};
      for (int i = 0; i < d; ++i) adv += p.at(a, i) * Complex(0.0, kb.k[i]);
      Complex dot{};
      for (int j = 0; j < d; ++j) dot += q.at(b, j) * s.at(c, j);
      total += adv * dot;
    }
  }
  return std::pow(2.0 * std::numbers::pi, d) * total.real();
}

}  // namespace oracle
