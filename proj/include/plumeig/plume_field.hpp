#pragma once

#include <vector>

#include "plumeig/geometry.hpp"

namespace plumeig {

enum class PlumeKind { IsotropicBlob, AdvectedPlume };

/// Parameters of the deterministic mean-concentration function f and the
/// Gaussian measurement noise around it.
///
/// IsotropicBlob:  f = Q exp(-(dx^2 + dy^2) / (2 l^2))
/// AdvectedPlume:  in the wind frame (dx downwind, dy crosswind)
///                 f = 0 for dx <= 0, else Q (s0 / sy) exp(-dy^2 / (2 sy^2))
///                 with sy = s0 + a dx.
/// Both depend only on the offset (location - source), and both peak at Q.
struct PlumeParams {
  PlumeKind kind = PlumeKind::IsotropicBlob;
  double strength = 1.0;       // Q, normalized peak
  double length_scale = 1.0;   // l (blob)
  double wind_x = 1.0;         // wind velocity, world units per step
  double wind_y = 0.0;
  double sigma0 = 1.0;         // crosswind width at the source (advected)
  double spread_rate = 0.0;    // a (advected)
  double noise_sigma = 0.1;    // measurement noise

  void validate() const;

  friend bool operator==(const PlumeParams&, const PlumeParams&) = default;
};

using SourceLocation = Point;

/// f evaluated at offset (location - source).
double concentration_at_offset(Point offset, const PlumeParams& params);

inline double concentration(Point loc, SourceLocation source, const PlumeParams& params) {
  return concentration_at_offset(loc - source, params);
}

/// Fraction of measurement cells where f / sigma exceeds `threshold` for a
/// source placed at the world center.
double snr_area_fraction(const PlumeParams& params, const GridSpec& grid, double threshold);

/// One axis of the displacement lattice on which the squared-SNR kernel is
/// sampled. Lattice index n stands for the displacement (n + shift) * step,
/// measurement column a sits at fine index a * measurement_stride, and source
/// column i at i * source_stride.
struct KernelAxis {
  double step = 1.0;
  int measurement_stride = 1;
  int source_stride = 1;
  double shift = 0.0;
  int min_offset = 0;
  int size = 1;

  double displacement(int n) const { return (n + shift) * step; }

  friend bool operator==(const KernelAxis&, const KernelAxis&) = default;
};

/// Squared-SNR kernel k(d) = f(d)^2 / (2 sigma^2): the weak-signal KL
/// divergence (nats) between N(f, sigma^2) and N(0, sigma^2).
struct SnrKernel {
  KernelAxis x;
  KernelAxis y;
  std::vector<double> values;  // row-major, rows along y

  double at(int nx, int ny) const {
    return values[static_cast<std::size_t>(ny - y.min_offset) * x.size + (nx - x.min_offset)];
  }
};

/// Lattice geometry for a grid, without sampling any values. Throws
/// KernelGridMismatch when the measurement and source spacings are not
/// integer multiples of a common step.
std::pair<KernelAxis, KernelAxis> kernel_lattice(const GridSpec& grid);

SnrKernel squared_snr_kernel(const PlumeParams& params, const GridSpec& grid);

}  // namespace plumeig
