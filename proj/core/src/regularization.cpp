#include "cbfed/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cbfed/error.hpp"
#include "cbfed/quadrature.hpp"
#include "cbfed/spectral.hpp"
#include "cbfed/summation.hpp"

namespace cbfed {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double bump(double s) noexcept {
  const double t = 1.0 - s * s;
  return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

// Ratio form: the kernel mass is summed on the same nodes, so constants
// are reproduced to rounding.
double convolve(const NonsmoothLaw& law, double eps, double xi, int nodes) {
  std::vector<double> cuts{-1.0};
  for (auto it = law.breaks().rbegin(); it != law.breaks().rend(); ++it) {
    const double sigma = (xi - *it) / eps;
    if (sigma > -1.0 && sigma < 1.0) cuts.push_back(sigma);
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  const auto& rule = gauss_legendre(nodes);
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
    const double half = 0.5 * (cuts[c + 1] - cuts[c]);
    if (half <= 0.0) continue;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double sigma = mid + half * rule.nodes[q];
      const double w = half * rule.weights[q] * bump(sigma);
      num += w * law(xi - eps * sigma);
      den += w;
    }
  }
  return num.value() / den.value();
}

// inf {theta > 0} and sup {theta < 0} of the base law.
std::pair<double, double> sign_extent(const NonsmoothLaw& law, double half_width) {
  double first_pos = inf;
  double last_neg = -inf;
  if (law.is_piecewise()) {
    const auto& br = law.breaks();
    for (std::size_t i = 0; i < law.pieces().size(); ++i) {
      const double lo = i == 0 ? -inf : br[i - 1];
      const double hi = i == br.size() ? inf : br[i];
      const auto& p = law.pieces()[i];
      if (p.a == 0.0) {
        if (p.b > 0.0) first_pos = std::min(first_pos, lo);
        if (p.b < 0.0) last_neg = std::max(last_neg, hi);
        continue;
      }
      const double z = -p.b / p.a;
      // positive on (z, inf) when a > 0, on (-inf, z) when a < 0
      if (p.a > 0.0) {
        if (std::max(lo, z) < hi) first_pos = std::min(first_pos, std::max(lo, z));
        if (lo < std::min(hi, z)) last_neg = std::max(last_neg, std::min(hi, z));
      } else {
        if (lo < std::min(hi, z)) first_pos = std::min(first_pos, lo);
        if (std::max(lo, z) < hi) last_neg = std::max(last_neg, hi);
      }
    }
    return {first_pos, last_neg};
  }
  const int m = 20001;
  const double step = 2.0 * half_width / (m - 1);
  for (int j = 0; j < m; ++j) {
    const double xi = -half_width + step * j;
    const double v = law(xi);
    // one sample spacing of slack on each side
    if (v > 0.0) first_pos = std::min(first_pos, xi - step);
    if (v < 0.0) last_neg = std::max(last_neg, xi + step);
  }
  for (double b : law.breaks()) {
    if (law.left_limit(b) > 0.0 || law.right_limit(b) > 0.0) first_pos = std::min(first_pos, b);
    if (law.left_limit(b) < 0.0 || law.right_limit(b) < 0.0) last_neg = std::max(last_neg, b);
  }
  return {first_pos, last_neg};
}

const RegularizedLaw& law_for(const LawSet& laws, int comp) {
  return *laws[laws.size() == 1 ? 0 : static_cast<std::size_t>(comp)];
}

void check_law_set(const LawSet& laws, int dim) {
  if (laws.empty() || (laws.size() != 1 && laws.size() != static_cast<std::size_t>(dim))) {
    throw ConfigError("law set must hold one law or one per component");
  }
}

}  // namespace

Mollifier::Mollifier() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double mass = integrator.integrate(bump, -1.0, 1.0);
  z_ = 1.0 / mass;
}

double Mollifier::profile(double s) const noexcept { return z_ * bump(s); }

const Mollifier& standard_mollifier() {
  static const Mollifier m;
  return m;
}

double mollify_at(const NonsmoothLaw& law, double eps, double xi, const MollifierSpec& spec) {
  if (!(eps > 0.0)) throw ConfigError("regularization epsilon must be > 0");
  int nodes = std::max(2, spec.nodes);
  double prev = convolve(law, eps, xi, nodes);
  double change = inf;
  for (int d = 0; d < spec.max_doublings; ++d) {
    nodes *= 2;
    const double next = convolve(law, eps, xi, nodes);
    change = std::abs(next - prev);
    prev = next;
    if (change <= spec.stable_tol * std::max(1.0, std::abs(next))) return next;
  }
  if (change > spec.fail_tol * std::max(1.0, std::abs(prev))) {
    std::ostringstream msg;
    msg << "mollifier quadrature did not stabilise at xi = " << xi << " (last change " << change
        << " at " << nodes << " nodes)";
    throw QuadratureError(msg.str());
  }
  return prev;
}

RegularizedLaw::RegularizedLaw(NonsmoothLaw base, double eps, MollifierSpec spec,
                               double observed_sup)
    : base_(std::move(base)), eps_(eps), spec_(spec) {
  if (!(eps > 0.0)) throw ConfigError("regularization epsilon must be > 0");
  if (spec.table_nodes < 2) throw ConfigError("law table needs at least two nodes");
  if (!base_.autonomous()) {
    throw LawError("tabulated regularization requires a law independent of (x, t)");
  }
  half_width_ = std::max({10.0, 4.0 * base_.metadata().phi, 2.0 * std::abs(observed_sup)});
  h_ = 2.0 * half_width_ / (spec.table_nodes - 1);
  zero_ = base_.is_zero();
  table_.assign(static_cast<std::size_t>(spec.table_nodes), 0.0);
  if (!zero_) {
    for (std::size_t j = 0; j < table_.size(); ++j) {
      const double xi = node(j);
      const auto exact = single_piece_value(xi);
      table_[j] = exact ? *exact : mollify_at(base_, eps_, xi, spec_);
    }
  }
  compute_sign_constants();
}

std::optional<double> RegularizedLaw::single_piece_value(double xi) const noexcept {
  if (!base_.is_piecewise()) return std::nullopt;
  const auto lo = base_.piece_index(xi - eps_);
  const auto hi = base_.piece_index(std::nextafter(xi + eps_, -inf));
  if (lo != hi) return std::nullopt;
  // a symmetric kernel reproduces affine functions
  return base_.pieces()[lo](xi);
}

double RegularizedLaw::tabulated(double xi) const noexcept {
  const double t = (xi + half_width_) / h_;
  const auto last = table_.size() - 2;
  const auto j = static_cast<std::size_t>(std::clamp(std::floor(t), 0.0, static_cast<double>(last)));
  const double frac = t - static_cast<double>(j);
  return table_[j] + frac * (table_[j + 1] - table_[j]);
}

double RegularizedLaw::operator()(double xi) const noexcept {
  if (zero_) return 0.0;
  if (const auto exact = single_piece_value(xi)) return *exact;
  if (std::abs(xi) <= half_width_) return tabulated(xi);
  try {
    return direct(xi);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void RegularizedLaw::compute_sign_constants() {
  const auto [first_pos, last_neg] = sign_extent(base_, half_width_);
  const double c1_base = std::max({0.0, -first_pos, last_neg});
  const double phi = base_.metadata().phi;
  if (c1_base > phi * (1.0 + 1e-12) + 1e-12) {
    std::ostringstream msg;
    msg << "law '" << base_.metadata().name
        << "' violates the sign pattern: theta has the wrong sign at |xi| = " << c1_base
        << " > phi = " << phi;
    throw LawError(msg.str());
  }

  double scale = 0.0;
  for (double v : table_) scale = std::max(scale, std::abs(v));
  const double tol = 1e-13 * (1.0 + scale);
  double c1_table = -1.0;
  for (std::size_t j = 0; j < table_.size(); ++j) {
    const double xi = node(j);
    const double v = table_[j];
    if ((xi < 0.0 && v > tol) || (xi > 0.0 && v < -tol)) c1_table = std::max(c1_table, std::abs(xi));
  }
  // interpolation can carry a wrong sign one cell further out
  const double c1_interp = c1_table >= 0.0 ? c1_table + h_ : 0.0;
  const double c1 = std::max(c1_base + eps_, c1_interp);

  const auto base_env = envelopes(base_, 0.0, c1);
  double c2 = std::max(std::abs(base_env.lower), std::abs(base_env.upper));
  const double w = std::min(c1, half_width_);
  c2 = std::max({c2, std::abs(tabulated(-w)), std::abs(tabulated(w))});
  for (std::size_t j = 0; j < table_.size(); ++j) {
    if (std::abs(node(j)) < w) c2 = std::max(c2, std::abs(table_[j]));
  }
  signs_ = {c1, zero_ ? 0.0 : c2, c1_base};
}

std::shared_ptr<const RegularizedLaw> mollify(const NonsmoothLaw& law, double eps,
                                              const MollifierSpec& spec, double observed_sup) {
  return std::make_shared<const RegularizedLaw>(law, eps, spec, observed_sup);
}

FloorConstants floor_constants(const LawSet& laws) {
  FloorConstants out;
  const int dim = static_cast<int>(laws.size());
  double sum = 0.0;
  for (const auto& law : laws) {
    out.c1.push_back(law->sign_constants().c1);
    out.c2.push_back(law->sign_constants().c2);
    sum += out.c1.back() * out.c2.back();
  }
  out.integral_floor = -sum * domain_volume(dim);
  return out;
}

FloorConstants floor_constants(const RegularizedLaw& law, int dim) {
  FloorConstants out;
  out.c1.assign(static_cast<std::size_t>(dim), law.sign_constants().c1);
  out.c2.assign(static_cast<std::size_t>(dim), law.sign_constants().c2);
  out.integral_floor = -dim * law.sign_constants().c1 * law.sign_constants().c2 * domain_volume(dim);
  return out;
}

PhysicalField apply_law(const LawSet& laws, const PhysicalField& u) {
  check_law_set(laws, u.dim());
  PhysicalField out(u.dim(), u.grid_size());
  for (int c = 0; c < u.dim(); ++c) {
    const auto& law = law_for(laws, c);
    const auto in = u.component(c);
    auto dst = out.component(c);
    if (law.is_zero()) continue;
    for (std::size_t x = 0; x < in.size(); ++x) dst[x] = law(in[x]);
  }
  return out;
}

double theta_work(const LawSet& laws, const PhysicalField& u) {
  check_law_set(laws, u.dim());
  CompensatedSum s;
  for (int c = 0; c < u.dim(); ++c) {
    const auto& law = law_for(laws, c);
    if (law.is_zero()) continue;
    for (double v : u.component(c)) s += law(v) * v;
  }
  return u.cell_volume() * s.value();
}

FloorCheck check_integral_floor(const LawSet& laws, int dim, int cutoff, int grid, int samples,
                                std::uint64_t seed) {
  check_law_set(laws, dim);
  LawSet full;
  for (int c = 0; c < dim; ++c) full.push_back(laws[laws.size() == 1 ? 0 : c]);
  FloorCheck out;
  out.floor = floor_constants(full).integral_floor;
  out.worst = inf;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_amp(std::log(0.05), std::log(5.0));
  for (int i = 0; i < samples; ++i) {
    const double amp = std::exp(log_amp(rng));
    const auto y = random_field(dim, cutoff, rng(), amp, std::min(cutoff, 4));
    const double work = theta_work(full, to_physical(y, grid));
    out.worst = std::min(out.worst, work);
    if (work < out.floor) ++out.violations;
    ++out.samples;
  }
  return out;
}

}  // namespace cbfed
