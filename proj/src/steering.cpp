#include "chemo/steering.hpp"

#include <cmath>
#include <stdexcept>

#include "chemo/solver.hpp"

namespace chemo {
namespace {

struct Setup {
  SpectralField zeta;
  SpectralField gap;  // y - e^{T Lap} zeta
  std::vector<double> steps;
  std::vector<double> times;
};

Setup prepare(const SpectralField& zeta, const SpectralField& y, double T, const SimConfig& cfg) {
  if (!(T > 0.0)) throw std::invalid_argument("steering horizon must be > 0");
  if (std::abs(y.mean() - zeta.mean()) > 1e-12 * (1.0 + std::abs(zeta.mean()))) {
    throw std::invalid_argument("target mean differs from initial mean; mass conservation makes it unreachable");
  }
  for (int m = cfg.n_modes + 1; m <= y.n_modes(); ++m) {
    if (y.coeff(m) != cplx(0.0, 0.0)) throw std::invalid_argument("target is not band-limited to the solver modes");
  }
  Setup s;
  s.zeta = zeta.resized(cfg.n_modes);
  s.gap = y.resized(cfg.n_modes) - heat_semigroup(s.zeta, T);
  s.gap.set_coeff(0, 0.0);
  s.steps = step_schedule(cfg, 0.0, T);
  s.times.push_back(0.0);
  double t = 0.0;
  for (double h : s.steps) {
    t += h;
    s.times.push_back(t);
  }
  return s;
}

SpectralField reference_at(const Setup& s, double t, double T) {
  return heat_semigroup(s.zeta, t) + (t / T) * s.gap;
}

}  // namespace

DriverPath steering_control(const SpectralField& zeta, const SpectralField& y, double T, const SimConfig& cfg) {
  const Setup s = prepare(zeta, y, T, cfg);
  const double eps = cfg.cutoff_eps();
  std::vector<SpectralField> values;
  values.reserve(s.times.size());
  SpectralField integral(cfg.n_modes);
  values.push_back((s.times[0] / T) * s.gap - integral);
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    const double h = s.steps[k];
    const SpectralField forcing = nonlinearity(reference_at(s, s.times[k], T), cfg.chi, eps);
    integral = heat_semigroup(integral, h);
    auto c = integral.half();
    auto f = forcing.half();
    for (std::size_t m = 0; m < c.size(); ++m) c[m] += etd_weight(static_cast<int>(m), h) * f[m];
    values.push_back((s.times[k + 1] / T) * s.gap - integral);
  }
  return DriverPath::tabulated(TabulatedPath(s.times, std::move(values)));
}

std::vector<SpectralField> steering_reference(const SpectralField& zeta, const SpectralField& y, double T,
                                              const SimConfig& cfg) {
  const Setup s = prepare(zeta, y, T, cfg);
  std::vector<SpectralField> out;
  out.reserve(s.times.size());
  for (double t : s.times) out.push_back(reference_at(s, t, T));
  return out;
}

}  // namespace chemo
