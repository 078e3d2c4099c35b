#pragma once

#include <cmath>

namespace plumeig {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

inline double squared_norm(Point p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point p) { return std::sqrt(squared_norm(p)); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// World rectangle plus the two discretizations living on it: the A x B
/// measurement grid (candidate sensing locations) and the I x J source
/// hypothesis grid. Both are cell-centered and row-major, i.e. the cell in
/// column c and row r has index r * columns + c, with columns running along x.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  int a_cells = 1;  // measurement columns (x)
  int b_cells = 1;  // measurement rows (y)
  int i_cells = 1;  // source columns (x)
  int j_cells = 1;  // source rows (y)

  /// Throws ConfigError when the invariants do not hold.
  void validate() const;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double diagonal() const { return std::hypot(width(), height()); }
  double area() const { return width() * height(); }
  Point center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  int measurement_count() const { return a_cells * b_cells; }
  int source_count() const { return i_cells * j_cells; }

  double measurement_dx() const { return width() / a_cells; }
  double measurement_dy() const { return height() / b_cells; }
  double source_dx() const { return width() / i_cells; }
  double source_dy() const { return height() / j_cells; }

  Point measurement_center(int index) const;
  Point source_center(int index) const;

  /// Index of the measurement cell containing p (p is clamped into the world).
  int measurement_cell_of(Point p) const;

  bool contains(Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Point clamp(Point p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

}  // namespace plumeig
