#include "plumeig/geometry.hpp"

#include <algorithm>
#include <string>

#include "plumeig/errors.hpp"

namespace plumeig {

void GridSpec::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw ConfigError("grid: world bounds must satisfy x_min < x_max and y_min < y_max");
  }
  if (a_cells < 1 || b_cells < 1 || i_cells < 1 || j_cells < 1) {
    throw ConfigError("grid: all cell counts must be >= 1");
  }
}

Point GridSpec::measurement_center(int index) const {
  const int col = index % a_cells;
  const int row = index / a_cells;
  return {x_min + (col + 0.5) * measurement_dx(), y_min + (row + 0.5) * measurement_dy()};
}

Point GridSpec::source_center(int index) const {
  const int col = index % i_cells;
  const int row = index / i_cells;
  return {x_min + (col + 0.5) * source_dx(), y_min + (row + 0.5) * source_dy()};
}

int GridSpec::measurement_cell_of(Point p) const {
  p = clamp(p);
  const int col = std::clamp(static_cast<int>((p.x - x_min) / measurement_dx()), 0, a_cells - 1);
  const int row = std::clamp(static_cast<int>((p.y - y_min) / measurement_dy()), 0, b_cells - 1);
  return row * a_cells + col;
}

Point GridSpec::clamp(Point p) const {
  return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
}

}  // namespace plumeig
