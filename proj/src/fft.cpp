#include "chemo/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace chemo {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace fft {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// One pair of plans per transform length. FFTW planning is not thread safe,
// execution on new arrays is.
struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(std::size_t n) {
  static std::map<std::size_t, Plans> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::unique_ptr<double, FftwFree> real(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwFree> spec(fftw_alloc_complex(n / 2 + 1));
  Plans p;
  const int len = static_cast<int>(n);
  p.r2c = fftw_plan_dft_r2c_1d(len, real.get(), spec.get(), FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_1d(len, spec.get(), real.get(), FFTW_ESTIMATE);
  if (p.r2c == nullptr || p.c2r == nullptr) {
    throw std::runtime_error("fftw planning failed");
  }
  return cache.emplace(n, p).first->second;
}

// Per-thread aligned scratch, sized for the largest transform seen so far.
struct Scratch {
  std::unique_ptr<double, FftwFree> real;
  std::unique_ptr<fftw_complex, FftwFree> spec;
  std::size_t capacity = 0;

  void reserve(std::size_t n) {
    if (n <= capacity) return;
    real.reset(fftw_alloc_real(n));
    spec.reset(fftw_alloc_complex(n / 2 + 1));
    capacity = n;
  }
};

Scratch& scratch(std::size_t n) {
  thread_local Scratch s;
  s.reserve(n);
  return s;
}

}  // namespace

void coeffs_to_grid(std::span<const cplx> half, std::span<double> grid) {
  const std::size_t n = grid.size();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 2");
  if (half.empty() || 2 * (half.size() - 1) >= n) {
    throw std::invalid_argument("half spectrum does not fit below the Nyquist mode");
  }
  const Plans& p = plans_for(n);
  Scratch& s = scratch(n);
  auto* spec = reinterpret_cast<cplx*>(s.spec.get());
  std::copy(half.begin(), half.end(), spec);
  spec[0] = cplx(half[0].real(), 0.0);
  std::fill(spec + half.size(), spec + n / 2 + 1, cplx(0.0, 0.0));
  fftw_execute_dft_c2r(p.c2r, s.spec.get(), s.real.get());
  std::copy(s.real.get(), s.real.get() + n, grid.begin());
}

void grid_to_coeffs(std::span<const double> grid, std::span<cplx> half) {
  const std::size_t n = grid.size();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 2");
  if (half.size() > n / 2 + 1) throw std::invalid_argument("too many modes requested for grid");
  const Plans& p = plans_for(n);
  Scratch& s = scratch(n);
  std::copy(grid.begin(), grid.end(), s.real.get());
  fftw_execute_dft_r2c(p.r2c, s.real.get(), s.spec.get());
  const auto* spec = reinterpret_cast<const cplx*>(s.spec.get());
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < half.size(); ++m) half[m] = spec[m] * inv;
  half[0] = cplx(half[0].real(), 0.0);
}

}  // namespace fft
}  // namespace chemo
