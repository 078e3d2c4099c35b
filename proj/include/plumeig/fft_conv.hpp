#pragma once

#include <span>
#include <vector>

namespace plumeig {

/// Row-major 2D array of doubles.
struct Array2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Array2D() = default;
  Array2D(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
int fft_friendly_size(int n);

/// Full linear convolution (rows_a + rows_b - 1) x (cols_a + cols_b - 1),
/// computed with one zero-padded real 2D FFT round trip.
Array2D linear_convolve_2d(const Array2D& a, const Array2D& b);

/// Direct O(N^2) convolution; reference path for tests.
Array2D linear_convolve_2d_direct(const Array2D& a, const Array2D& b);

}  // namespace plumeig
