#include "cbfed/law.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "cbfed/error.hpp"

namespace cbfed {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double jump_offset(double xi) { return 1e-9 * std::max(1.0, std::abs(xi)); }

bool is_declared_break(const std::vector<double>& breaks, double xi) {
  return std::binary_search(breaks.begin(), breaks.end(), xi);
}

// Domain [lo, hi) of piece i.
std::pair<double, double> piece_domain(const std::vector<double>& breaks, std::size_t i) {
  const double lo = i == 0 ? -inf : breaks[i - 1];
  const double hi = i == breaks.size() ? inf : breaks[i];
  return {lo, hi};
}

double affine_integral(const LawPiece& p, double lo, double hi) {
  return 0.5 * p.a * (hi * hi - lo * lo) + p.b * (hi - lo);
}

// int_lo^hi theta for lo <= hi.
double integrate_law(const NonsmoothLaw& law, double lo, double hi) {
  if (lo == hi) return 0.0;
  std::vector<double> cuts{lo};
  for (double b : law.breaks()) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    if (law.is_piecewise()) {
      total += affine_integral(law.pieces()[law.piece_index(0.5 * (a + b))], a, b);
    } else {
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double s) { return law(s); }, a, b, 15, 1e-13);
    }
  }
  return total;
}

void check_breaks(const std::vector<double>& breaks) {
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!std::isfinite(breaks[i])) throw LawError("law breakpoints must be finite");
    if (i > 0 && !(breaks[i] > breaks[i - 1])) {
      throw LawError("law breakpoints must be strictly increasing");
    }
  }
}

}  // namespace

NonsmoothLaw::NonsmoothLaw() : pieces_{LawPiece{}} { meta_.name = "zero"; }

NonsmoothLaw NonsmoothLaw::piecewise(std::vector<double> breaks, std::vector<LawPiece> pieces,
                                     LawMetadata meta) {
  check_breaks(breaks);
  if (pieces.size() != breaks.size() + 1) {
    throw LawError("a piecewise law needs exactly one more piece than breakpoints");
  }
  NonsmoothLaw law;
  law.breaks_ = std::move(breaks);
  law.pieces_ = std::move(pieces);
  law.meta_ = std::move(meta);
  return law;
}

NonsmoothLaw NonsmoothLaw::black_box(Function f, std::vector<double> breaks, LawMetadata meta,
                                     bool autonomous) {
  if (!f) throw LawError("black-box law needs a function");
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  check_breaks(breaks);
  NonsmoothLaw law;
  law.breaks_ = std::move(breaks);
  law.pieces_.clear();
  law.function_ = std::move(f);
  law.autonomous_ = autonomous;
  law.meta_ = std::move(meta);
  return law;
}

NonsmoothLaw NonsmoothLaw::affine(double a, double b, LawMetadata meta) {
  return piecewise({}, {LawPiece{a, b}}, std::move(meta));
}

std::size_t NonsmoothLaw::piece_index(double xi) const noexcept {
  return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), xi) -
                                  breaks_.begin());
}

double NonsmoothLaw::eval(const std::array<double, 3>& x, double t, double xi) const {
  if (function_) return function_(x, t, xi);
  return pieces_[piece_index(xi)](xi);
}

double NonsmoothLaw::left_limit(double xi) const {
  if (function_) {
    return is_declared_break(breaks_, xi) ? (*this)(xi - jump_offset(xi)) : (*this)(xi);
  }
  const auto i = static_cast<std::size_t>(std::lower_bound(breaks_.begin(), breaks_.end(), xi) -
                                          breaks_.begin());
  return pieces_[i](xi);
}

double NonsmoothLaw::right_limit(double xi) const {
  if (function_) {
    return is_declared_break(breaks_, xi) ? (*this)(xi + jump_offset(xi)) : (*this)(xi);
  }
  return pieces_[piece_index(xi)](xi);
}

bool NonsmoothLaw::is_zero() const noexcept {
  if (function_) return false;
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const LawPiece& p) { return p.a == 0.0 && p.b == 0.0; });
}

Envelope envelopes(const NonsmoothLaw& law, double xi, double eps) {
  if (!(eps >= 0.0)) throw ConfigError("envelope radius must be >= 0");
  if (eps == 0.0) {
    const double l = law.left_limit(xi);
    const double r = law.right_limit(xi);
    return {std::min(l, r), std::max(l, r)};
  }
  const double lo = xi - eps;
  const double hi = xi + eps;
  Envelope e{inf, -inf};
  auto take = [&e](double v) {
    e.lower = std::min(e.lower, v);
    e.upper = std::max(e.upper, v);
  };
  if (law.is_piecewise()) {
    const auto& br = law.breaks();
    for (std::size_t i = 0; i < law.pieces().size(); ++i) {
      const auto [plo, phi] = piece_domain(br, i);
      const double a = std::max(plo, lo);
      const double b = std::min(phi, hi);
      if (!(a < b)) continue;
      take(law.pieces()[i](a));
      take(law.pieces()[i](b));
    }
    return e;
  }
  const int m = kBlackBoxEnvelopeSamples;
  for (int j = 0; j < m; ++j) take(law(lo + (hi - lo) * j / (m - 1)));
  for (double b : law.breaks()) {
    if (b > lo && b < hi) {
      take(law.left_limit(b));
      take(law.right_limit(b));
    }
  }
  return e;
}

double potential_j(const NonsmoothLaw& law, double xi) {
  if (xi >= 0.0) return integrate_law(law, 0.0, xi);
  return -integrate_law(law, xi, 0.0);
}

double directional_j0(const NonsmoothLaw& law, double xi, double v) {
  const auto c = clarke_interval(law, xi);
  return v >= 0.0 ? c.upper * v : c.lower * v;
}

HypothesisReport verify_hypotheses(const NonsmoothLaw& law, const SampleLattice& lattice) {
  if (lattice.count < 2 || !(lattice.half_width > 0.0)) {
    throw ConfigError("hypothesis lattice needs count >= 2 and a positive half width");
  }
  const auto& meta = law.metadata();
  const double w = lattice.half_width;

  std::vector<std::pair<double, double>> samples;
  samples.reserve(static_cast<std::size_t>(lattice.count));
  for (int j = 0; j < lattice.count; ++j) {
    const double xi = -w + 2.0 * w * j / (lattice.count - 1);
    samples.emplace_back(xi, law(xi));
  }
  std::vector<std::pair<double, double>> extra;
  for (double b : law.breaks()) {
    if (std::abs(b) <= w) {
      extra.emplace_back(b, law.left_limit(b));
      extra.emplace_back(b, law.right_limit(b));
    }
  }

  HypothesisReport rep;
  rep.growth_excess = -inf;
  bool finite = true;
  auto visit = [&](double xi, double th) {
    finite = finite && std::isfinite(th);
    rep.sup_abs = std::max(rep.sup_abs, std::abs(th));
    rep.growth_excess = std::max(rep.growth_excess, std::abs(th) - meta.C1 - meta.C2 * std::abs(xi));
    if (xi < -meta.phi && th > 0.0) rep.sign_violation = std::max(rep.sign_violation, th);
    if (xi > meta.phi && th < 0.0) rep.sign_violation = std::max(rep.sign_violation, -th);
  };
  for (const auto& [xi, th] : samples) visit(xi, th);
  for (const auto& [xi, th] : extra) visit(xi, th);

  // Chord slopes are convex combinations of consecutive ones, so the
  // consecutive pairs carry the maximum.
  for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
    const double slope =
        (samples[j + 1].second - samples[j].second) / (samples[j + 1].first - samples[j].first);
    rep.K_hat = std::max(rep.K_hat, -slope);
  }

  const double tol = 1e-12 * (1.0 + rep.sup_abs);
  rep.bounded = finite;
  rep.growth = finite && rep.growth_excess <= tol;
  rep.sign_pattern = rep.sign_violation <= tol;
  if (meta.K) rep.K_ok = rep.K_hat <= *meta.K + tol;
  return rep;
}

NonsmoothLaw zigzag_example() {
  LawMetadata meta;
  meta.name = "zigzag";
  meta.C1 = 3.0;
  meta.C2 = 0.0;
  meta.phi = 2.0;
  meta.K = 1.0;
  return NonsmoothLaw::piecewise(
      {-2.0, -1.0, 0.0, 1.0, 2.0},
      {{0.0, -3.0}, {2.0, 1.0}, {-1.0, 0.0}, {3.0, 0.0}, {-1.0, 4.0}, {0.0, 2.0}}, meta);
}

NonsmoothLaw builtin_law(const std::string& name) {
  if (name == "zigzag") return zigzag_example();
  if (name == "zero") {
    NonsmoothLaw law;
    law.metadata().K = 0.0;
    return law;
  }
  if (name == "identity") {
    LawMetadata meta;
    meta.name = "identity";
    meta.C2 = 1.0;
    meta.K = 0.0;
    return NonsmoothLaw::affine(1.0, 0.0, meta);
  }
  throw ConfigError("unknown law '" + name + "' (expected zigzag, zero or identity)");
}

NonsmoothLaw law_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    LawMetadata meta;
    meta.name = doc.value("name", std::string("custom"));
    meta.C1 = doc.value("C1", 0.0);
    meta.C2 = doc.value("C2", 0.0);
    meta.phi = doc.value("phi", 0.0);
    if (doc.contains("K") && !doc.at("K").is_null()) meta.K = doc.at("K").get<double>();
    const auto breaks = doc.value("breaks", std::vector<double>{});
    std::vector<LawPiece> pieces;
    for (const auto& p : doc.at("pieces")) {
      const auto type = p.value("type", std::string("affine"));
      if (type == "affine") {
        pieces.push_back({p.at("a").get<double>(), p.at("b").get<double>()});
      } else if (type == "constant") {
        pieces.push_back({0.0, p.contains("value") ? p.at("value").get<double>()
                                                   : p.at("b").get<double>()});
      } else {
        throw ConfigError("unknown law piece type '" + type + "'");
      }
    }
    return NonsmoothLaw::piecewise(breaks, std::move(pieces), std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed law file: ") + e.what());
  }
}

std::string law_to_json(const NonsmoothLaw& law) {
  if (!law.is_piecewise()) throw LawError("only piecewise laws can be serialised");
  const auto& meta = law.metadata();
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : law.pieces()) {
    if (p.a == 0.0) {
      pieces.push_back({{"type", "constant"}, {"value", p.b}});
    } else {
      pieces.push_back({{"type", "affine"}, {"a", p.a}, {"b", p.b}});
    }
  }
  nlohmann::json doc = {{"name", meta.name}, {"breaks", law.breaks()}, {"pieces", pieces},
                        {"phi", meta.phi},   {"C1", meta.C1},          {"C2", meta.C2}};
  doc["K"] = meta.K ? nlohmann::json(*meta.K) : nlohmann::json(nullptr);
  return doc.dump(2);
}

NonsmoothLaw load_law(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read law file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return law_from_json(ss.str());
}

}  // namespace cbfed
