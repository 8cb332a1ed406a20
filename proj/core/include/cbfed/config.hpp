#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbfed/law.hpp"
#include "cbfed/operators.hpp"
#include "cbfed/regularization.hpp"

namespace cbfed {

enum class Scheme { IFRK4, IFRK2 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct ForcingMode {
  std::vector<int> k;
  std::vector<double> re;
  std::vector<double> im;
};

/// f(t) = amplitude * cos(omega t) * P f0, with f0 chosen by kind:
///   zero         f = 0
///   taylor_green the Taylor-Green vortex (d = 2)
///   kolmogorov   (sin(wavenumber x2), 0[, 0])
///   modes        explicit coefficients (their conjugates are added)
struct ForcingSpec {
  std::string kind = "zero";
  double amplitude = 1.0;
  double omega = 0.0;
  int wavenumber = 1;
  std::vector<ForcingMode> modes;
};

/// Initial state: taylor_green (d = 2), random (seeded), zero or a
/// snapshot file; always projected onto the Galerkin space.
struct InitialConditionSpec {
  std::string kind = "taylor_green";
  double amplitude = 1.5;
  int max_mode = 4;
  std::string path;
};

struct SimConfig {
  int dim = 2;
  OperatorParams params;
  int cutoff = 32;
  int grid = 96;
  double dt = 1e-3;
  double T = 1.0;
  double epsilon = 0.1;
  Scheme scheme = Scheme::IFRK4;
  std::uint64_t seed = 0;
  /// One law for every component, or one per component.
  std::vector<NonsmoothLaw> laws{zigzag_example()};
  MollifierSpec mollifier;
  ForcingSpec forcing;
  InitialConditionSpec ic;
  /// Steps between stored states and chi grids; 0 picks max(1, steps/64).
  int snapshot_every = 0;

  /// Grid for every nonlinear evaluation: twice the configured grid.
  int eval_grid() const noexcept { return 2 * grid; }
  /// Number of time steps, T / dt (validated to be an integer).
  std::size_t steps() const;
  int snapshot_stride() const;

  std::vector<std::string> violations() const;
  void validate() const;
};

}  // namespace cbfed
