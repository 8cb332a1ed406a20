#pragma once

#include <vector>

namespace cbfed {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// The n-point rule, built once per n and cached (thread-safe).
const GaussRule& gauss_legendre(int n);

/// Trapezoid integral of samples y over abscissae t.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);

/// Running trapezoid integral, out[0] = 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace cbfed
