#include "cbfed/spectral.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cbfed/error.hpp"
#include "cbfed/summation.hpp"
#include "cbfed/transform.hpp"

namespace cbfed {

namespace {

/// Canonical half of the lattice: first nonzero component positive.
bool in_upper_half(const WaveVector& k) {
  for (int i = 0; i < k.dim; ++i) {
    if (k.k[i] > 0) return true;
    if (k.k[i] < 0) return false;
  }
  return false;
}

/// Unit vectors orthogonal to k (one in 2D, two in 3D).
std::vector<std::array<double, 3>> polarisations(const WaveVector& w) {
  const double kn = std::sqrt(static_cast<double>(w.norm2()));
  std::array<double, 3> k{w.k[0] / kn, w.k[1] / kn, w.dim == 3 ? w.k[2] / kn : 0.0};
  if (w.dim == 2) return {{-k[1], k[0], 0.0}};

  // Cross with the coordinate axis least aligned with k.
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(k[i]) < std::abs(k[axis])) axis = i;
  }
  std::array<double, 3> a{0.0, 0.0, 0.0};
  a[axis] = 1.0;
  auto cross = [](const std::array<double, 3>& x, const std::array<double, 3>& y) {
    return std::array<double, 3>{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2],
                                 x[0] * y[1] - x[1] * y[0]};
  };
  auto e1 = cross(k, a);
  const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (auto& v : e1) v /= n1;
  auto e2 = cross(k, e1);
  return {e1, e2};
}

}  // namespace

SpectralField leray_project(const SpectralField& raw) {
  SpectralField out = raw;
  const int d = raw.dim();
  for (std::size_t m = 0; m < out.num_modes(); ++m) {
    const auto w = out.wavevector(m);
    const int k2 = w.norm2();
    if (k2 == 0) {
      for (int c = 0; c < d; ++c) out.at(m, c) = Complex{};
      continue;
    }
    Complex dot{};
    for (int c = 0; c < d; ++c) dot += static_cast<double>(w.k[c]) * raw.at(m, c);
    dot /= static_cast<double>(k2);
    for (int c = 0; c < d; ++c) out.at(m, c) = raw.at(m, c) - static_cast<double>(w.k[c]) * dot;
  }
  return out;
}

PhysicalField to_physical(const SpectralField& y, int grid_size) {
  PhysicalField u(y.dim(), grid_size);
  auto& tr = transform_for(y.dim(), grid_size);
  for (int c = 0; c < y.dim(); ++c) tr.synthesize(y, c, u.component(c));
  return u;
}

SpectralField to_spectral(const PhysicalField& u, int cutoff, bool project) {
  SpectralField y(u.dim(), cutoff);
  auto& tr = transform_for(u.dim(), u.grid_size());
  for (int c = 0; c < u.dim(); ++c) tr.analyze(u.component(c), y, c);
  return project ? leray_project(y) : y;
}

double norm_h2(const SpectralField& y) {
  CompensatedSum s;
  for (const auto& c : y.data()) s += std::norm(c);
  return domain_volume(y.dim()) * s.value();
}

double norm_v2(const SpectralField& y) {
  CompensatedSum s;
  for (std::size_t m = 0; m < y.num_modes(); ++m) {
    const double k2 = y.wavevector(m).norm2();
    for (int c = 0; c < y.dim(); ++c) s += k2 * std::norm(y.at(m, c));
  }
  return domain_volume(y.dim()) * s.value();
}

double norm_vdual2(const SpectralField& y) {
  CompensatedSum s;
  for (std::size_t m = 0; m < y.num_modes(); ++m) {
    const int k2 = y.wavevector(m).norm2();
    if (k2 == 0) continue;
    for (int c = 0; c < y.dim(); ++c) s += std::norm(y.at(m, c)) / k2;
  }
  return domain_volume(y.dim()) * s.value();
}

double lp_power(const PhysicalField& u, double p) {
  if (!(p >= 1.0)) throw ConfigError("L^p norm requires p >= 1");
  CompensatedSum s;
  const int d = u.dim();
  for (std::size_t x = 0; x < u.num_points(); ++x) {
    double m2 = 0.0;
    for (int c = 0; c < d; ++c) m2 += u.at(x, c) * u.at(x, c);
    s += std::pow(m2, 0.5 * p);
  }
  return u.cell_volume() * s.value();
}

double norm_lp(const PhysicalField& u, double p) { return std::pow(lp_power(u, p), 1.0 / p); }

double norm_lp(const SpectralField& y, double p, int grid_size) {
  return norm_lp(to_physical(y, grid_size), p);
}

double inner_h(const SpectralField& u, const SpectralField& v) {
  CompensatedSum s;
  const auto a = u.data();
  const auto b = v.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] * std::conj(b[i])).real();
  return domain_volume(u.dim()) * s.value();
}

double inner_grid(const PhysicalField& u, const PhysicalField& v) {
  CompensatedSum s;
  const auto a = u.values();
  const auto b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return u.cell_volume() * s.value();
}

SpectralField smoothing_filter(const SpectralField& y, int n) {
  if (n < 1) throw ConfigError("smoothing filter index must be >= 1");
  SpectralField out = y;
  const long n2 = static_cast<long>(n) * n;
  for (std::size_t m = 0; m < out.num_modes(); ++m) {
    const long k2 = out.wavevector(m).norm2();
    const double gain = k2 < n2 ? std::exp(-static_cast<double>(k2) / n) : 0.0;
    for (int c = 0; c < out.dim(); ++c) out.at(m, c) *= gain;
  }
  return out;
}

SpectralField spectral_derivative(const SpectralField& y, int axis) {
  SpectralField out = y;
  for (std::size_t m = 0; m < out.num_modes(); ++m) {
    const Complex ik(0.0, static_cast<double>(out.wavevector(m).k[axis]));
    for (int c = 0; c < out.dim(); ++c) out.at(m, c) *= ik;
  }
  return out;
}

SpectralField resample(const SpectralField& y, int cutoff) {
  SpectralField out(y.dim(), cutoff);
  for (std::size_t m = 0; m < out.num_modes(); ++m) {
    const auto w = out.wavevector(m);
    if (!y.contains(w)) continue;
    const auto src = y.index_of(w);
    for (int c = 0; c < y.dim(); ++c) out.at(m, c) = y.at(src, c);
  }
  return out;
}

SpectralField taylor_green(int cutoff, double amplitude) {
  if (cutoff < 1) throw ConfigError("Taylor-Green vortex needs cutoff >= 1");
  SpectralField y(2, cutoff);
  for (int s1 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      WaveVector w;
      w.k = {s1, s2, 0};
      const auto m = y.index_of(w);
      y.at(m, 0) = Complex(0.0, -0.25 * s1 * amplitude);
      y.at(m, 1) = Complex(0.0, 0.25 * s2 * amplitude);
    }
  }
  return y;
}

SpectralField random_field(int dim, int cutoff, std::uint64_t seed, double amplitude,
                           int max_mode) {
  SpectralField y(dim, cutoff);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int kmax = std::max(1, std::min(max_mode, cutoff));
  for (std::size_t m = 0; m < y.num_modes(); ++m) {
    const auto w = y.wavevector(m);
    if (!in_upper_half(w)) continue;
    bool inside = true;
    for (int i = 0; i < dim; ++i) inside = inside && std::abs(w.k[i]) <= kmax;
    if (!inside) continue;
    const double envelope = std::exp(-static_cast<double>(w.norm2()) / (kmax * kmax));
    const auto mirror = y.index_of(-w);
    for (int c = 0; c < dim; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      y.at(m, c) = envelope * Complex(re, im);
      y.at(mirror, c) = std::conj(y.at(m, c));
    }
  }
  y = leray_project(y);
  const double h2 = norm_h2(y);
  if (h2 > 0.0) y *= std::sqrt(amplitude * amplitude * domain_volume(dim) / 2.0 / h2);
  return y;
}

std::vector<SpectralField> basis_modes(int dim, int cutoff, std::size_t count) {
  SpectralField shape(dim, cutoff);
  std::vector<WaveVector> ks;
  for (std::size_t m = 0; m < shape.num_modes(); ++m) {
    const auto w = shape.wavevector(m);
    if (in_upper_half(w)) ks.push_back(w);
  }
  std::sort(ks.begin(), ks.end(), [](const WaveVector& a, const WaveVector& b) {
    if (a.norm2() != b.norm2()) return a.norm2() < b.norm2();
    return std::lexicographical_compare(a.k.begin(), a.k.begin() + a.dim, b.k.begin(),
                                        b.k.begin() + b.dim);
  });

  const double scale = std::sqrt(2.0 / domain_volume(dim));
  std::vector<SpectralField> out;
  for (const auto& w : ks) {
    const auto pols = polarisations(w);
    for (int trig = 0; trig < 2; ++trig) {
      for (const auto& e : pols) {
        if (out.size() == count) return out;
        SpectralField v(dim, cutoff);
        const auto plus = v.index_of(w);
        const auto minus = v.index_of(-w);
        for (int c = 0; c < dim; ++c) {
          const double a = 0.5 * scale * e[c];
          // cos(k.x) e = (e/2)(e^{ikx} + e^{-ikx}); sin(k.x) e = (e/2i)(e^{ikx} - e^{-ikx})
          v.at(plus, c) = trig == 0 ? Complex(a, 0.0) : Complex(0.0, -a);
          v.at(minus, c) = std::conj(v.at(plus, c));
        }
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

std::string snapshot_to_json(const SpectralField& y) {
  nlohmann::json modes = nlohmann::json::array();
  for (std::size_t m = 0; m < y.num_modes(); ++m) {
    bool nonzero = false;
    for (int c = 0; c < y.dim(); ++c) nonzero = nonzero || y.at(m, c) != Complex{};
    if (!nonzero) continue;
    const auto w = y.wavevector(m);
    nlohmann::json k = nlohmann::json::array();
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (int c = 0; c < y.dim(); ++c) {
      k.push_back(w.k[c]);
      re.push_back(y.at(m, c).real());
      im.push_back(y.at(m, c).imag());
    }
    modes.push_back({{"k", k}, {"re", re}, {"im", im}});
  }
  nlohmann::json doc = {{"dim", y.dim()}, {"cutoff", y.cutoff()}, {"modes", modes}};
  return doc.dump();
}

SpectralField snapshot_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    const int dim = doc.at("dim").get<int>();
    const int cutoff = doc.at("cutoff").get<int>();
    SpectralField y(dim, cutoff);
    for (const auto& rec : doc.at("modes")) {
      WaveVector w;
      w.dim = dim;
      const auto& k = rec.at("k");
      const auto& re = rec.at("re");
      const auto& im = rec.at("im");
      if (k.size() != static_cast<std::size_t>(dim) || re.size() != k.size() ||
          im.size() != k.size()) {
        throw ConfigError("snapshot mode record has wrong arity");
      }
      for (int c = 0; c < dim; ++c) w.k[c] = k[c].get<int>();
      if (!y.contains(w)) throw ConfigError("snapshot mode outside the cutoff");
      const auto m = y.index_of(w);
      for (int c = 0; c < dim; ++c) y.at(m, c) = Complex(re[c].get<double>(), im[c].get<double>());
    }
    return y;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed snapshot: ") + e.what());
  }
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& y) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << snapshot_to_json(y) << '\n';
}

SpectralField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return snapshot_from_json(ss.str());
}

}  // namespace cbfed
