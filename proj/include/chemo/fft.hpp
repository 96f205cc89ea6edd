#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace chemo {

using cplx = std::complex<double>;

/// Smallest power of two that is >= n.
std::size_t next_pow2(std::size_t n);

namespace fft {

/// Synthesizes f(x_j) = sum_{|m|<=N} c_m e^{2 pi i m j / M} on the uniform grid
/// x_j = j/M, from the nonnegative half spectrum c_0..c_N (c_{-m} = conj(c_m)).
/// Requires N < M/2. The imaginary part of c_0 is ignored.
void coeffs_to_grid(std::span<const cplx> half, std::span<double> grid);

/// Inverse of coeffs_to_grid: c_m = (1/M) sum_j f(x_j) e^{-2 pi i m j / M}
/// for m = 0..half.size()-1. Requires half.size() <= M/2 + 1.
void grid_to_coeffs(std::span<const double> grid, std::span<cplx> half);

}  // namespace fft
}  // namespace chemo
