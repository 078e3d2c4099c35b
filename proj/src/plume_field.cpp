#include "plumeig/plume_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "plumeig/errors.hpp"

namespace plumeig {

void PlumeParams::validate() const {
  if (!(noise_sigma > 0.0)) throw ConfigError("plume: noise_sigma must be > 0");
  if (!(strength > 0.0 && strength <= 1.0)) throw ConfigError("plume: strength must lie in (0, 1]");
  if (kind == PlumeKind::IsotropicBlob && !(length_scale > 0.0)) {
    throw ConfigError("plume: length_scale must be > 0");
  }
  if (kind == PlumeKind::AdvectedPlume) {
    if (!(sigma0 > 0.0)) throw ConfigError("plume: sigma0 must be > 0");
    if (!(spread_rate >= 0.0)) throw ConfigError("plume: spread_rate must be >= 0");
  }
  if (!std::isfinite(wind_x) || !std::isfinite(wind_y)) throw ConfigError("plume: wind must be finite");
}

double concentration_at_offset(Point offset, const PlumeParams& params) {
  switch (params.kind) {
    case PlumeKind::IsotropicBlob: {
      const double l = params.length_scale;
      return params.strength * std::exp(-squared_norm(offset) / (2.0 * l * l));
    }
    case PlumeKind::AdvectedPlume: {
      double along = offset.x;
      double cross = offset.y;
      const double speed = std::hypot(params.wind_x, params.wind_y);
      if (speed > 0.0) {
        const double cx = params.wind_x / speed;
        const double cy = params.wind_y / speed;
        along = offset.x * cx + offset.y * cy;
        cross = -offset.x * cy + offset.y * cx;
      }
      if (along <= 0.0) return 0.0;
      const double sy = params.sigma0 + params.spread_rate * along;
      return params.strength * (params.sigma0 / sy) * std::exp(-cross * cross / (2.0 * sy * sy));
    }
  }
  return 0.0;
}

double snr_area_fraction(const PlumeParams& params, const GridSpec& grid, double threshold) {
  const Point source = grid.center();
  const int n = grid.measurement_count();
  int above = 0;
  for (int c = 0; c < n; ++c) {
    if (concentration(grid.measurement_center(c), source, params) / params.noise_sigma > threshold) {
      ++above;
    }
  }
  return static_cast<double>(above) / n;
}

namespace {

KernelAxis make_axis(double extent, int measurement_cells, int source_cells) {
  const double hm = extent / measurement_cells;
  const double hs = extent / source_cells;
  const double step = std::min(hm, hs);
  const double rm = hm / step;
  const double rs = hs / step;
  const long rm_int = std::lround(rm);
  const long rs_int = std::lround(rs);
  if (std::abs(rm - rm_int) > 1e-9 * rm || std::abs(rs - rs_int) > 1e-9 * rs) {
    throw KernelGridMismatch("measurement and source spacings are not integer multiples of a common step (" +
                             std::to_string(measurement_cells) + " vs " + std::to_string(source_cells) +
                             " cells)");
  }
  KernelAxis axis;
  axis.step = step;
  axis.measurement_stride = static_cast<int>(rm_int);
  axis.source_stride = static_cast<int>(rs_int);
  axis.shift = 0.5 * (axis.measurement_stride - axis.source_stride);
  axis.min_offset = -(source_cells - 1) * axis.source_stride;
  axis.size = (measurement_cells - 1) * axis.measurement_stride + (source_cells - 1) * axis.source_stride + 1;
  return axis;
}

}  // namespace

std::pair<KernelAxis, KernelAxis> kernel_lattice(const GridSpec& grid) {
  grid.validate();
  return {make_axis(grid.width(), grid.a_cells, grid.i_cells),
          make_axis(grid.height(), grid.b_cells, grid.j_cells)};
}

SnrKernel squared_snr_kernel(const PlumeParams& params, const GridSpec& grid) {
  params.validate();
  SnrKernel kernel;
  std::tie(kernel.x, kernel.y) = kernel_lattice(grid);
  const double two_var = 2.0 * params.noise_sigma * params.noise_sigma;
  kernel.values.resize(static_cast<std::size_t>(kernel.x.size) * kernel.y.size);
  for (int ry = 0; ry < kernel.y.size; ++ry) {
    const double dy = kernel.y.displacement(ry + kernel.y.min_offset);
    for (int rx = 0; rx < kernel.x.size; ++rx) {
      const double dx = kernel.x.displacement(rx + kernel.x.min_offset);
      const double f = concentration_at_offset({dx, dy}, params);
      kernel.values[static_cast<std::size_t>(ry) * kernel.x.size + rx] = f * f / two_var;
    }
  }
  return kernel;
}

}  // namespace plumeig
