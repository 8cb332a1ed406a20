#include "cbfed/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "cbfed/error.hpp"

namespace cbfed {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int wrap(int k, int n) { return k >= 0 ? k : k + n; }

}  // namespace

GridTransform::GridTransform(int dim, int grid) : dim_(dim), grid_(grid) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
  if (grid < 2) throw ResolutionError("grid size must be at least 2");
  points_ = 1;
  for (int i = 0; i < dim; ++i) points_ *= static_cast<std::size_t>(grid);
  half_points_ = points_ / static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid / 2 + 1);

  real_ = fftw_alloc_real(points_);
  auto* spec = fftw_alloc_complex(half_points_);
  spec_ = spec;
  int dims[3] = {grid, grid, grid};

  std::lock_guard lock(planner_mutex());
  plan_forward_ = fftw_plan_dft_r2c(dim, dims, real_, spec, FFTW_ESTIMATE);
  plan_backward_ = fftw_plan_dft_c2r(dim, dims, spec, real_, FFTW_ESTIMATE);
}

GridTransform::~GridTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_free(real_);
  fftw_free(spec_);
}

std::size_t GridTransform::half_index(const WaveVector& k) const noexcept {
  const auto n = static_cast<std::size_t>(grid_);
  const auto h = static_cast<std::size_t>(grid_ / 2 + 1);
  if (dim_ == 2) {
    return static_cast<std::size_t>(wrap(k.k[0], grid_)) * h + static_cast<std::size_t>(k.k[1]);
  }
  return (static_cast<std::size_t>(wrap(k.k[0], grid_)) * n +
          static_cast<std::size_t>(wrap(k.k[1], grid_))) *
             h +
         static_cast<std::size_t>(k.k[2]);
}

void GridTransform::check(const SpectralField& y) const {
  if (y.dim() != dim_) throw ResolutionError("field dimension does not match transform");
  if (grid_ < 2 * y.cutoff() + 1) {
    throw ResolutionError("grid " + std::to_string(grid_) + " cannot resolve cutoff " +
                          std::to_string(y.cutoff()) + " (need N >= 2n+1)");
  }
}

void GridTransform::synthesize(const SpectralField& y, int comp, std::span<double> out, int axis) {
  check(y);
  auto* spec = static_cast<fftw_complex*>(spec_);
  std::fill_n(reinterpret_cast<double*>(spec), 2 * half_points_, 0.0);
  const int last = dim_ - 1;
  for (std::size_t m = 0; m < y.num_modes(); ++m) {
    const auto k = y.wavevector(m);
    if (k.k[last] < 0) continue;
    Complex c = y.at(m, comp);
    if (axis >= 0) c *= Complex(0.0, static_cast<double>(k.k[axis]));
    const auto idx = half_index(k);
    spec[idx][0] = c.real();
    spec[idx][1] = c.imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_backward_));
  std::copy_n(real_, points_, out.begin());
}

void GridTransform::analyze(std::span<const double> in, SpectralField& out, int comp, int axis,
                            double scale, bool accumulate) {
  check(out);
  std::copy_n(in.begin(), points_, real_);
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  const auto* spec = static_cast<const fftw_complex*>(spec_);
  const double norm = scale / static_cast<double>(points_);
  const int last = dim_ - 1;
  for (std::size_t m = 0; m < out.num_modes(); ++m) {
    const auto k = out.wavevector(m);
    Complex c;
    if (k.k[last] >= 0) {
      const auto idx = half_index(k);
      c = Complex(spec[idx][0], spec[idx][1]);
    } else {
      const auto idx = half_index(-k);
      c = Complex(spec[idx][0], -spec[idx][1]);
    }
    c *= norm;
    if (axis >= 0) c *= Complex(0.0, static_cast<double>(k.k[axis]));
    if (accumulate) {
      out.at(m, comp) += c;
    } else {
      out.at(m, comp) = c;
    }
  }
}

GridTransform& transform_for(int dim, int grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<GridTransform>> cache;
  auto& slot = cache[{dim, grid}];
  if (!slot) slot = std::make_unique<GridTransform>(dim, grid);
  return *slot;
}

}  // namespace cbfed
