#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "chemo/fft.hpp"

namespace chemo {

/// Collocation grid used by a field with N retained modes: the smallest power
/// of two holding 3(2N+1)/2 points, so quadratic products dealias exactly.
std::size_t dealias_grid_size(int n_modes);

/// Real periodic field on the unit torus, stored by its Fourier coefficients
/// f(x) = sum_{|m|<=N} c_m e^{2 pi i m x}.
///
/// Only c_0..c_N are stored; negative modes are the complex conjugates, so the
/// reality condition holds by construction and c_0 (the spatial mean) is kept
/// real. Grid values are derived on demand and never authoritative.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(int n_modes);

  static SpectralField constant(int n_modes, double value);
  /// amplitude * cos(2 pi m x + phase), i.e. c_{+-m} = amplitude e^{+-i phase} / 2.
  static SpectralField cosine(int n_modes, int m, double amplitude = 1.0, double phase = 0.0);
  static SpectralField sine(int n_modes, int m, double amplitude = 1.0);
  /// Projects grid samples on x_j = j/M (any even M > 2N) onto modes |m| <= N.
  static SpectralField from_grid(std::span<const double> values, int n_modes);

  int n_modes() const { return static_cast<int>(half_.size()) - 1; }
  std::size_t grid_size() const { return dealias_grid_size(n_modes()); }

  /// Coefficient of mode m, |m| <= N; zero outside the band.
  cplx coeff(int m) const;
  /// Sets mode m and its conjugate partner. Setting mode 0 keeps only the real part.
  void set_coeff(int m, cplx value);

  double mean() const { return half_.empty() ? 0.0 : half_[0].real(); }

  std::span<const cplx> half() const { return half_; }
  std::span<cplx> half() { return half_; }

  std::vector<double> to_grid() const { return to_grid(grid_size()); }
  std::vector<double> to_grid(std::size_t points) const;

  /// Copy with N' modes: truncates or zero-pads.
  SpectralField resized(int n_modes) const;

  /// Coefficient-space l2 norm, equal to the L2(T) norm by Parseval.
  double l2_norm() const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend bool operator==(const SpectralField& a, const SpectralField& b) { return a.half_ == b.half_; }

 private:
  std::vector<cplx> half_;
};

/// Sharp Littlewood-Paley block: k = -1 keeps |m| <= 1, k >= 0 keeps 2^k < |m| <= 2^{k+1}.
struct Block {
  int k;
  SpectralField field;
};

struct BlockDecomposition {
  std::vector<Block> blocks;
  SpectralField sum() const;
};

/// Largest |m| with |m| * eps < 1, i.e. the last mode kept by the Galerkin cutoff.
int galerkin_max_mode(double eps);

/// e^{t Laplacian} f: mode m scaled by exp(-4 pi^2 m^2 t). Throws for t < 0.
SpectralField heat_semigroup(const SpectralField& f, double t);
/// d/dx rho_f with -rho'' = f - mean(f), mean(rho) = 0: mode m -> c_m i / (2 pi m).
SpectralField inverse_laplacian_gradient(const SpectralField& f);
/// d/dx f: mode m -> 2 pi i m c_m.
SpectralField derivative(const SpectralField& f);
/// Sharp Galerkin projection onto |m| < 1/eps. Throws unless eps is in (0,1).
SpectralField galerkin_project(const SpectralField& f, double eps);
/// Throws for k < -1.
SpectralField lp_block(const SpectralField& f, int k);
/// All nonempty sharp dyadic blocks of f, in increasing k.
BlockDecomposition decompose(const SpectralField& f);
/// Pointwise product on the 3/2-padded grid, truncated to N modes. Requires
/// equal n_modes. Alias free on every retained mode.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

}  // namespace chemo
