#include "plumeig/fft_conv.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace plumeig {

namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw std::runtime_error("fftw: plan creation failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

int fft_friendly_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

Array2D linear_convolve_2d(const Array2D& a, const Array2D& b) {
  const int out_rows = a.rows + b.rows - 1;
  const int out_cols = a.cols + b.cols - 1;
  const int pr = fft_friendly_size(out_rows);
  const int pc = fft_friendly_size(out_cols);
  const int pc_half = pc / 2 + 1;
  const std::size_t real_n = static_cast<std::size_t>(pr) * pc;
  const std::size_t cplx_n = static_cast<std::size_t>(pr) * pc_half;

  auto real_a = fftw_buffer<double>(real_n);
  auto real_b = fftw_buffer<double>(real_n);
  auto spec_a = fftw_buffer<fftw_complex>(cplx_n);
  auto spec_b = fftw_buffer<fftw_complex>(cplx_n);

  std::unique_ptr<Plan> fwd_a, fwd_b, inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd_a = std::make_unique<Plan>(fftw_plan_dft_r2c_2d(pr, pc, real_a.get(), spec_a.get(), FFTW_ESTIMATE));
    fwd_b = std::make_unique<Plan>(fftw_plan_dft_r2c_2d(pr, pc, real_b.get(), spec_b.get(), FFTW_ESTIMATE));
    inv = std::make_unique<Plan>(fftw_plan_dft_c2r_2d(pr, pc, spec_a.get(), real_a.get(), FFTW_ESTIMATE));
  }

  // Planning may scribble on the buffers, so fill after.
  std::fill(real_a.get(), real_a.get() + real_n, 0.0);
  std::fill(real_b.get(), real_b.get() + real_n, 0.0);
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) real_a[static_cast<std::size_t>(r) * pc + c] = a(r, c);
  for (int r = 0; r < b.rows; ++r)
    for (int c = 0; c < b.cols; ++c) real_b[static_cast<std::size_t>(r) * pc + c] = b(r, c);

  fwd_a->execute();
  fwd_b->execute();
  for (std::size_t k = 0; k < cplx_n; ++k) {
    const std::complex<double> za(spec_a[k][0], spec_a[k][1]);
    const std::complex<double> zb(spec_b[k][0], spec_b[k][1]);
    const std::complex<double> z = za * zb;
    spec_a[k][0] = z.real();
    spec_a[k][1] = z.imag();
  }
  inv->execute();

  const double scale = 1.0 / static_cast<double>(real_n);
  Array2D out(out_rows, out_cols);
  for (int r = 0; r < out_rows; ++r)
    for (int c = 0; c < out_cols; ++c) out(r, c) = real_a[static_cast<std::size_t>(r) * pc + c] * scale;
  return out;
}

Array2D linear_convolve_2d_direct(const Array2D& a, const Array2D& b) {
  Array2D out(a.rows + b.rows - 1, a.cols + b.cols - 1);
  for (int ar = 0; ar < a.rows; ++ar)
    for (int ac = 0; ac < a.cols; ++ac) {
      const double v = a(ar, ac);
      if (v == 0.0) continue;
      for (int br = 0; br < b.rows; ++br)
        for (int bc = 0; bc < b.cols; ++bc) out(ar + br, ac + bc) += v * b(br, bc);
    }
  return out;
}

}  // namespace plumeig
