#include "chemo/spectral_field.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chemo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int block_of_mode(int m) {
  const unsigned a = static_cast<unsigned>(std::abs(m));
  if (a <= 1) return -1;
  return static_cast<int>(std::bit_width(a - 1)) - 1;
}

}  // namespace

std::size_t dealias_grid_size(int n_modes) {
  // ceil(3(2N+1)/2)
  const std::size_t need = (3 * (2 * static_cast<std::size_t>(n_modes) + 1) + 1) / 2;
  return next_pow2(need < 2 ? 2 : need);
}

SpectralField::SpectralField(int n_modes) {
  if (n_modes < 0) throw std::invalid_argument("n_modes must be nonnegative");
  half_.assign(static_cast<std::size_t>(n_modes) + 1, cplx(0.0, 0.0));
}

SpectralField SpectralField::constant(int n_modes, double value) {
  SpectralField f(n_modes);
  f.half_[0] = value;
  return f;
}

SpectralField SpectralField::cosine(int n_modes, int m, double amplitude, double phase) {
  SpectralField f(n_modes);
  if (m == 0) {
    f.half_[0] = amplitude * std::cos(phase);
  } else {
    f.set_coeff(std::abs(m), std::polar(0.5 * amplitude, phase));
  }
  return f;
}

SpectralField SpectralField::sine(int n_modes, int m, double amplitude) {
  // sin(2 pi m x) = cos(2 pi m x - pi/2)
  return cosine(n_modes, m, amplitude, -0.5 * std::numbers::pi);
}

SpectralField SpectralField::from_grid(std::span<const double> values, int n_modes) {
  if (values.size() < 2 * static_cast<std::size_t>(n_modes) + 1) {
    throw std::invalid_argument("grid too coarse for requested modes");
  }
  SpectralField f(n_modes);
  fft::grid_to_coeffs(values, f.half_);
  return f;
}

cplx SpectralField::coeff(int m) const {
  const int a = std::abs(m);
  if (a > n_modes()) return {0.0, 0.0};
  const cplx c = half_[static_cast<std::size_t>(a)];
  return m < 0 ? std::conj(c) : c;
}

void SpectralField::set_coeff(int m, cplx value) {
  const int a = std::abs(m);
  if (a > n_modes()) throw std::out_of_range("mode " + std::to_string(m) + " outside band");
  if (a == 0) {
    half_[0] = cplx(value.real(), 0.0);
  } else {
    half_[static_cast<std::size_t>(a)] = m < 0 ? std::conj(value) : value;
  }
}

std::vector<double> SpectralField::to_grid(std::size_t points) const {
  std::vector<double> grid(points);
  fft::coeffs_to_grid(half_, grid);
  return grid;
}

SpectralField SpectralField::resized(int n_modes) const {
  SpectralField out(n_modes);
  const std::size_t keep = std::min(out.half_.size(), half_.size());
  std::copy(half_.begin(), half_.begin() + static_cast<std::ptrdiff_t>(keep), out.half_.begin());
  return out;
}

double SpectralField::l2_norm() const {
  if (half_.empty()) return 0.0;
  double s = std::norm(half_[0]);
  for (std::size_t m = 1; m < half_.size(); ++m) s += 2.0 * std::norm(half_[m]);
  return std::sqrt(s);
}

bool SpectralField::all_finite() const {
  for (const cplx& c : half_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.half_.size() != half_.size()) throw std::invalid_argument("n_modes mismatch");
  for (std::size_t m = 0; m < half_.size(); ++m) half_[m] += other.half_[m];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.half_.size() != half_.size()) throw std::invalid_argument("n_modes mismatch");
  for (std::size_t m = 0; m < half_.size(); ++m) half_[m] -= other.half_[m];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (cplx& c : half_) c *= s;
  return *this;
}

SpectralField BlockDecomposition::sum() const {
  if (blocks.empty()) return SpectralField();
  SpectralField total(blocks.front().field.n_modes());
  for (const Block& b : blocks) total += b.field;
  return total;
}

int galerkin_max_mode(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  int m = static_cast<int>(std::ceil(1.0 / eps)) - 1;
  while (m > 0 && static_cast<double>(m) * eps >= 1.0) --m;
  while (static_cast<double>(m + 1) * eps < 1.0) ++m;
  return m;
}

SpectralField heat_semigroup(const SpectralField& f, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: t must be >= 0");
  SpectralField out = f;
  auto c = out.half();
  for (std::size_t m = 1; m < c.size(); ++m) {
    const double k = kTwoPi * static_cast<double>(m);
    c[m] *= std::exp(-k * k * t);
  }
  return out;
}

SpectralField inverse_laplacian_gradient(const SpectralField& f) {
  SpectralField out(f.n_modes());
  auto in = f.half();
  auto c = out.half();
  for (std::size_t m = 1; m < c.size(); ++m) {
    c[m] = in[m] * cplx(0.0, 1.0 / (kTwoPi * static_cast<double>(m)));
  }
  return out;
}

SpectralField derivative(const SpectralField& f) {
  SpectralField out(f.n_modes());
  auto in = f.half();
  auto c = out.half();
  for (std::size_t m = 1; m < c.size(); ++m) {
    c[m] = in[m] * cplx(0.0, kTwoPi * static_cast<double>(m));
  }
  return out;
}

SpectralField galerkin_project(const SpectralField& f, double eps) {
  const int keep = galerkin_max_mode(eps);
  SpectralField out = f;
  auto c = out.half();
  for (std::size_t m = static_cast<std::size_t>(keep) + 1; m < c.size(); ++m) c[m] = 0.0;
  return out;
}

SpectralField lp_block(const SpectralField& f, int k) {
  if (k < -1) throw std::invalid_argument("block index must be >= -1");
  SpectralField out(f.n_modes());
  auto in = f.half();
  auto c = out.half();
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (block_of_mode(static_cast<int>(m)) == k) c[m] = in[m];
  }
  return out;
}

BlockDecomposition decompose(const SpectralField& f) {
  BlockDecomposition d;
  const int n = f.n_modes();
  const int last = block_of_mode(n);
  for (int k = -1; k <= last; ++k) {
    SpectralField b = lp_block(f, k);
    bool empty = true;
    for (const cplx& c : b.half()) {
      if (c != cplx(0.0, 0.0)) {
        empty = false;
        break;
      }
    }
    if (!empty) d.blocks.push_back({k, std::move(b)});
  }
  return d;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  if (f.n_modes() != g.n_modes()) throw std::invalid_argument("dealiased_product: n_modes mismatch");
  const std::size_t points = f.grid_size();
  std::vector<double> a = f.to_grid(points);
  const std::vector<double> b = g.to_grid(points);
  for (std::size_t j = 0; j < points; ++j) a[j] *= b[j];
  return SpectralField::from_grid(a, f.n_modes());
}

}  // namespace chemo
