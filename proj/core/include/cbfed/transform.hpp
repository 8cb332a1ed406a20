#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "cbfed/field.hpp"

namespace cbfed {

/// Real<->spectral transform between truncated coefficient cubes and an
/// N^d collocation grid, backed by FFTW real-to-complex plans.
///
/// An instance owns scratch buffers and is not safe for concurrent use;
/// use transform_for() to get the calling thread's cached instance.
class GridTransform {
 public:
  GridTransform(int dim, int grid);
  ~GridTransform();
  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  int dim() const noexcept { return dim_; }
  int grid() const noexcept { return grid_; }
  std::size_t num_points() const noexcept { return points_; }

  /// out(x) = sum_k m(k) c_k(comp) exp(i k.x), with m(k) = i k_axis if
  /// axis >= 0 and 1 otherwise. Requires grid >= 2*cutoff + 1.
  void synthesize(const SpectralField& y, int comp, std::span<double> out, int axis = -1);

  /// out_k(comp) (+)= scale * m(k) * (1/N^d) sum_x in(x) exp(-i k.x) for
  /// every k in the cube of out; aliased modes beyond the cutoff are dropped.
  void analyze(std::span<const double> in, SpectralField& out, int comp, int axis = -1,
               double scale = 1.0, bool accumulate = false);

 private:
  std::size_t half_index(const WaveVector& k) const noexcept;
  void check(const SpectralField& y) const;

  int dim_;
  int grid_;
  std::size_t points_;
  std::size_t half_points_;
  double* real_ = nullptr;
  void* spec_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

/// The calling thread's cached transform for (dim, grid).
GridTransform& transform_for(int dim, int grid);

}  // namespace cbfed
