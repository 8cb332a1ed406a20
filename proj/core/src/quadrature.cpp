#include "cbfed/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

#include "cbfed/error.hpp"
#include "cbfed/summation.hpp"

namespace cbfed {

namespace {

GaussRule build_rule(int n) {
  // Boost returns the nonnegative zeros in increasing order.
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  GaussRule rule;
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  if (n % 2 == 1) {
    rule.nodes.push_back(0.0);
    rule.weights.push_back(weight(0.0));
  }
  for (double z : zeros) {
    if (z == 0.0) continue;
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  CompensatedSum s;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return s.value();
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                         const std::vector<double>& y) {
  std::vector<double> out(t.size(), 0.0);
  CompensatedSum s;
  for (std::size_t i = 1; i < t.size(); ++i) {
    s += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    out[i] = s.value();
  }
  return out;
}

}  // namespace cbfed
