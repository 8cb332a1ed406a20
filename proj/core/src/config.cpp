#include "cbfed/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbfed/error.hpp"

namespace cbfed {

std::string to_string(Scheme s) { return s == Scheme::IFRK4 ? "IFRK4" : "IFRK2"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "IFRK4" || s == "ifrk4") return Scheme::IFRK4;
  if (s == "IFRK2" || s == "ifrk2") return Scheme::IFRK2;
  throw ConfigError("solver.scheme: unknown scheme '" + s + "' (expected IFRK4 or IFRK2)");
}

std::size_t SimConfig::steps() const {
  if (T == 0.0) return 0;
  return static_cast<std::size_t>(std::llround(T / dt));
}

int SimConfig::snapshot_stride() const {
  if (snapshot_every > 0) return snapshot_every;
  return std::max(1, static_cast<int>(steps() / 64));
}

std::vector<std::string> SimConfig::violations() const {
  std::vector<std::string> out;
  auto add = [&out](const std::string& s) { out.push_back(s); };
  if (dim != 2 && dim != 3) add("domain.dim: must be 2 or 3");
  for (auto& v : params.violations()) out.push_back(std::move(v));
  if (cutoff < 1) add("discretization.n: cutoff must be >= 1");
  if (grid < 2 * cutoff + 1) {
    std::ostringstream msg;
    msg << "discretization.N: grid " << grid << " cannot resolve cutoff " << cutoff
        << " (N >= 2n+1 required)";
    add(msg.str());
  }
  if (!(dt > 0.0)) add("time.dt: dt > 0 required");
  if (!(T >= 0.0)) add("time.T: T >= 0 required");
  if (dt > 0.0 && T > 0.0) {
    if (dt > T) add("time.dt: dt <= T required");
    const double ratio = T / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
      add("time.T: T must be an integer multiple of dt");
    }
  }
  if (dt > 0.0 && params.mu > 0.0 && dt * params.mu * cutoff * cutoff > 50.0) {
    std::ostringstream msg;
    msg << "time.dt: stability guard dt*mu*n^2 <= 50 violated (" << dt * params.mu * cutoff * cutoff
        << ")";
    add(msg.str());
  }
  if (!(epsilon > 0.0)) add("regularization.epsilon: epsilon > 0 required");
  if (laws.empty() || (laws.size() != 1 && laws.size() != static_cast<std::size_t>(dim))) {
    add("law: give one law or one per component");
  }
  if (mollifier.nodes < 2) add("regularization.nodes: at least 2 quadrature nodes required");
  if (mollifier.table_nodes < 2) add("regularization.table_nodes: at least 2 table nodes required");

  const auto& k = ic.kind;
  if (k != "taylor_green" && k != "random" && k != "zero" && k != "snapshot") {
    add("initial.kind: unknown initial condition '" + k + "'");
  }
  if (k == "taylor_green" && dim != 2) add("initial.kind: taylor_green requires dim = 2");
  if (k == "snapshot" && ic.path.empty()) add("initial.path: snapshot initial condition needs a path");
  if (ic.max_mode < 1) add("initial.max_mode: must be >= 1");

  const auto& f = forcing.kind;
  if (f != "zero" && f != "taylor_green" && f != "kolmogorov" && f != "modes") {
    add("forcing.kind: unknown forcing '" + f + "'");
  }
  if (f == "taylor_green" && dim != 2) add("forcing.kind: taylor_green forcing requires dim = 2");
  if (f == "kolmogorov" && (forcing.wavenumber < 1 || forcing.wavenumber > cutoff)) {
    add("forcing.wavenumber: must lie in [1, n]");
  }
  for (const auto& m : forcing.modes) {
    if (m.k.size() != static_cast<std::size_t>(dim) || m.re.size() != m.k.size() ||
        m.im.size() != m.k.size()) {
      add("forcing.modes: each mode needs k, re and im of length dim");
      break;
    }
    bool inside = true;
    for (int c : m.k) inside = inside && std::abs(c) <= cutoff;
    if (!inside) {
      add("forcing.modes: mode outside the cutoff");
      break;
    }
  }
  if (!std::isfinite(forcing.amplitude) || !std::isfinite(forcing.omega)) {
    add("forcing: amplitude and omega must be finite");
  }
  if (snapshot_every < 0) add("output.snapshot_every: must be >= 0");
  return out;
}

void SimConfig::validate() const {
  auto v = violations();
  if (!v.empty()) throw ConfigError(std::move(v));
}

}  // namespace cbfed
