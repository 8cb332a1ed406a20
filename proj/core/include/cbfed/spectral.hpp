#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cbfed/field.hpp"

namespace cbfed {

/// Apply I - k k^T/|k|^2 at every mode and zero the mean mode.
SpectralField leray_project(const SpectralField& raw);

/// Fourier synthesis onto an N^d grid. Throws ResolutionError if
/// N < 2*cutoff + 1.
PhysicalField to_physical(const SpectralField& y, int grid_size);

/// Fourier analysis truncated to |k_i| <= cutoff; Leray-projected only
/// when `project` is set.
SpectralField to_spectral(const PhysicalField& u, int cutoff, bool project = false);

/// ||y||_H^2 = (2pi)^d sum_k |c_k|^2.
double norm_h2(const SpectralField& y);
/// ||y||_V^2 = (2pi)^d sum_k |k|^2 |c_k|^2.
double norm_v2(const SpectralField& y);
/// ||f||_{V'}^2 = (2pi)^d sum_{k != 0} |c_k|^2 / |k|^2.
double norm_vdual2(const SpectralField& y);

inline double norm_h(const SpectralField& y) { return std::sqrt(norm_h2(y)); }
inline double norm_v(const SpectralField& y) { return std::sqrt(norm_v2(y)); }

/// int |u|^p dx by grid quadrature (|.| the Euclidean vector norm).
/// Throws ConfigError for p < 1.
double lp_power(const PhysicalField& u, double p);
/// ||u||_{L^p}.
double norm_lp(const PhysicalField& u, double p);
/// ||y||_{L^p}, synthesised on the given grid.
double norm_lp(const SpectralField& y, double p, int grid_size);

/// H inner product (u, v) = (2pi)^d Re sum_k c_k(u) . conj(c_k(v)).
double inner_h(const SpectralField& u, const SpectralField& v);
/// Grid quadrature of u . v.
double inner_grid(const PhysicalField& u, const PhysicalField& v);

/// The smoothing multiplier: c_k -> exp(-|k|^2/n) c_k for |k|^2 < n^2,
/// zero otherwise. Self-adjoint and norm-nonincreasing, not a projection.
SpectralField smoothing_filter(const SpectralField& y, int n);

/// Spectral derivative d/dx_axis of every component.
SpectralField spectral_derivative(const SpectralField& y, int axis);

/// Copy y onto a different cutoff, dropping or zero-padding modes.
SpectralField resample(const SpectralField& y, int cutoff);

/// Taylor-Green vortex amplitude * (sin x1 cos x2, -cos x1 sin x2).
/// Only d = 2. The cutoff must be at least 1.
SpectralField taylor_green(int cutoff, double amplitude);

/// Seeded random divergence-free field with modes |k_i| <= max_mode,
/// Gaussian coefficients damped by exp(-|k|^2/max_mode^2), and scaled to
/// ||y||_H^2 = amplitude^2 (2pi)^d / 2 (the norm of a Taylor-Green vortex
/// of the same amplitude).
SpectralField random_field(int dim, int cutoff, std::uint64_t seed, double amplitude = 1.0,
                           int max_mode = 4);

/// Real divergence-free Fourier basis orthonormal in H, sorted by |k|^2,
/// then lexicographically on k, then cos before sin, then polarisation.
/// Returns the first `count` elements.
std::vector<SpectralField> basis_modes(int dim, int cutoff, std::size_t count);

/// JSON snapshot record {dim, cutoff, modes: [{k, re, im}]}; only nonzero
/// modes are written.
std::string snapshot_to_json(const SpectralField& y);
SpectralField snapshot_from_json(const std::string& text);
void write_snapshot(const std::filesystem::path& path, const SpectralField& y);
SpectralField read_snapshot(const std::filesystem::path& path);

}  // namespace cbfed
