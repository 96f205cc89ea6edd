#include "chemo/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {
namespace {

double int_pow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

bool is_even_integer(double p) { return p >= 2.0 && p == std::floor(p) && static_cast<long>(p) % 2 == 0; }

// Grid fine enough to integrate a degree-(p N) trigonometric polynomial exactly.
std::size_t quadrature_points(int n_modes, double p) {
  const auto deg = static_cast<std::size_t>(std::ceil(p)) * static_cast<std::size_t>(n_modes);
  return std::max<std::size_t>(next_pow2(deg + 1), 2 * next_pow2(2 * static_cast<std::size_t>(n_modes) + 1));
}

double grid_lp(std::span<const double> g, double p) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double x : g) mx = std::max(mx, std::abs(x));
    return mx;
  }
  double s = 0.0;
  if (is_even_integer(p)) {
    const int ip = static_cast<int>(p);
    for (double x : g) s += int_pow(x, ip);
  } else {
    for (double x : g) s += std::pow(std::abs(x), p);
  }
  return std::pow(s / static_cast<double>(g.size()), 1.0 / p);
}

int block_of_mode(std::size_t m) {
  if (m <= 1) return -1;
  return static_cast<int>(std::bit_width(m - 1)) - 1;
}

}  // namespace

double lp_norm(const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const std::size_t points = std::isinf(p) ? 4 * next_pow2(2 * static_cast<std::size_t>(f.n_modes()) + 2)
                                           : quadrature_points(f.n_modes(), p);
  return grid_lp(f.to_grid(points), p);
}

double lp_power(const SpectralField& f, int p) {
  if (p < 2 || p % 2 != 0) throw std::invalid_argument("lp_power: p must be even and >= 2");
  const std::vector<double> g = f.to_grid(quadrature_points(f.n_modes(), p));
  double s = 0.0;
  for (double x : g) s += int_pow(x, p);
  return s / static_cast<double>(g.size());
}

double besov_norm(const SpectralField& f, const BesovParams& bp) {
  if (!(bp.p >= 1.0) || !(bp.q >= 1.0)) throw std::invalid_argument("besov_norm: p, q must be >= 1");
  const int n = f.n_modes();
  const std::size_t points = std::isinf(bp.p) ? 4 * next_pow2(2 * static_cast<std::size_t>(n) + 2)
                                              : quadrature_points(n, bp.p);
  const int last = block_of_mode(static_cast<std::size_t>(n));
  std::vector<cplx> block(static_cast<std::size_t>(n) + 1);
  std::vector<double> grid(points);
  auto src = f.half();
  double acc = 0.0;
  for (int k = -1; k <= last; ++k) {
    bool empty = true;
    for (std::size_t m = 0; m < block.size(); ++m) {
      block[m] = block_of_mode(m) == k ? src[m] : cplx(0.0, 0.0);
      if (block[m] != cplx(0.0, 0.0)) empty = false;
    }
    if (empty) continue;
    fft::coeffs_to_grid(block, grid);
    const double term = std::exp2(bp.alpha * std::max(k, 0)) * grid_lp(grid, bp.p);
    acc = std::isinf(bp.q) ? std::max(acc, term) : acc + std::pow(term, bp.q);
  }
  return std::isinf(bp.q) ? acc : std::pow(acc, 1.0 / bp.q);
}

double weighted_sup_norm(std::span<const double> times, std::span<const SpectralField> fields, double eta,
                         double alpha) {
  if (times.empty() || times.size() != fields.size()) {
    throw std::invalid_argument("weighted_sup_norm: need matching nonempty times and fields");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double weight = std::min(std::pow(std::max(times[i], 0.0), eta), 1.0);
    if (weight == 0.0) continue;
    best = std::max(best, weight * holder_norm(fields[i], alpha));
  }
  return best;
}

double weighted_sup_norm(const Trajectory& traj, double eta, double alpha) {
  return weighted_sup_norm(traj.times, traj.w, eta, alpha);
}

double sup_holder_norm(std::span<const SpectralField> fields, double alpha) {
  double best = 0.0;
  for (const SpectralField& f : fields) best = std::max(best, holder_norm(f, alpha));
  return best;
}

double energy_identity_residual(const Trajectory& traj, int p, double t0, double t1, double chi, double eps) {
  if (p < 2 || p % 2 != 0) throw std::invalid_argument("energy_identity_residual: p must be even and >= 2");
  const std::size_t i0 = traj.index_of(t0);
  const std::size_t i1 = traj.index_of(t1);
  if (i1 < i0) throw std::invalid_argument("energy_identity_residual: t1 < t0");
  const int n = traj.w[i0].n_modes();
  const double cut = eps > 0.0 ? eps : 1.0 / (n + 0.5);
  const std::size_t points = quadrature_points(n, p);
  const auto inv_points = 1.0 / static_cast<double>(points);

  // Dissipation plus chemotactic transfer at one record.
  const auto rate = [&](std::size_t i) {
    const SpectralField& w = traj.w[i];
    const std::vector<double> wg = w.to_grid(points);
    const std::vector<double> dg = derivative(w).to_grid(points);
    const std::vector<double> fg = chemotactic_flux(w + traj.z[i], cut).to_grid(points);
    double s = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
      const double weight = int_pow(wg[j], p - 2) * dg[j];
      s += weight * (dg[j] + chi * fg[j]);
    }
    return s * inv_points;
  };

  double integral = 0.0;
  double prev = rate(i0);
  for (std::size_t i = i0 + 1; i <= i1; ++i) {
    const double cur = rate(i);
    integral += 0.5 * (traj.times[i] - traj.times[i - 1]) * (prev + cur);
    prev = cur;
  }
  const double energy = (lp_power(traj.w[i1], p) - lp_power(traj.w[i0], p)) / (p * (p - 1.0));
  return energy + integral;
}

double apriori_gamma(int p, double alpha) {
  return (p * (1.0 + alpha) + 2.0 + alpha) / (alpha * (p + 2.0));
}

double apriori_bound(const AprioriInputs& in) {
  if (in.p < 2 || in.p % 2 != 0) throw std::invalid_argument("apriori_bound: p must be even and >= 2");
  if (!(in.chi > 0.0)) throw std::invalid_argument("apriori_bound: chi must be > 0");
  if (in.mean != 0.0 && in.mean != 1.0) throw std::invalid_argument("apriori_bound: mean must be 0 or 1");
  if (!(in.t > 0.0)) throw std::invalid_argument("apriori_bound: t must be > 0");
  if (!(in.z_norm >= 0.0)) throw std::invalid_argument("apriori_bound: Z norm must be >= 0");
  if (!(in.alpha > 0.0)) throw std::invalid_argument("apriori_bound: alpha must be > 0");
  if (!(in.c_cal > 0.0)) throw std::invalid_argument("apriori_bound: constant must be > 0");
  const double base = std::max(static_cast<double>(in.p), in.chi);
  const double heat = std::pow(in.chi * in.t / 4.0, -0.5);
  const double driver = in.c_cal * std::pow(base, apriori_gamma(in.p, in.alpha)) * std::pow(in.z_norm, 1.0 / in.alpha);
  const double mass = in.c_cal * std::pow(base, (in.p + 1.0) / (in.p + 2.0)) * in.mean;
  return std::max({heat, driver, mass});
}

double ode_comparison(double c1, double c2, double lambda, double t) {
  if (!(lambda > 1.0)) throw std::invalid_argument("ode_comparison: lambda must be > 1");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("ode_comparison: c1, c2 must be > 0");
  if (!(t > 0.0)) throw std::invalid_argument("ode_comparison: t must be > 0");
  const double transient = std::pow(t * c1 * (lambda - 1.0) / 2.0, -1.0 / (lambda - 1.0));
  const double equilibrium = std::pow(c2 / c1, 1.0 / lambda);
  return std::max(transient, equilibrium);
}

double lipschitz_probe(const SpectralField& zeta, const SpectralField& zeta2, const DriverPath& z,
                       const DriverPath& z2, const SimConfig& cfg) {
  if (z.is_stochastic() || z2.is_stochastic()) throw std::invalid_argument("lipschitz_probe needs deterministic drivers");
  SimConfig c = cfg;
  c.record_stride = 1;
  const Trajectory a = run(zeta, c, z);
  const Trajectory b = run(zeta2, c, z2);
  std::vector<SpectralField> dw(a.size());
  std::vector<SpectralField> dz(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    dw[i] = a.w[i] - b.w[i];
    dz[i] = a.z[i] - b.z[i];
  }
  const double input = holder_norm(zeta.resized(c.n_modes) - zeta2.resized(c.n_modes), c.alpha0) +
                       sup_holder_norm(dz, c.alpha);
  if (input == 0.0) return 0.0;
  return weighted_sup_norm(a.times, dw, c.eta, c.alpha) / input;
}

double heat_smoothing_ratio(const SpectralField& f, double alpha, double beta, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_smoothing_ratio: t must be > 0");
  const double denom = holder_norm(f, beta);
  if (denom == 0.0) return 0.0;
  return holder_norm(heat_semigroup(f, t), alpha) * std::pow(t, 0.5 * (alpha - beta)) / denom;
}

}  // namespace chemo
