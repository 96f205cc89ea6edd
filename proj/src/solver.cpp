#include "chemo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chemo/errors.hpp"
#include "chemo/norms.hpp"

namespace chemo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double heat_rate(std::size_t m) {
  const double k = kTwoPi * static_cast<double>(m);
  return k * k;
}

// Grid with more than 4N points: the cubic u^2 d rho_u has modes up to 3N, so
// aliases of retained modes |m| <= N land beyond the band.
std::size_t cubic_grid_size(int n_modes) { return next_pow2(2 * (2 * static_cast<std::size_t>(n_modes) + 1)); }

}  // namespace

SpectralField chemotactic_flux(const SpectralField& u, double eps) {
  const int n = u.n_modes();
  const std::size_t points = cubic_grid_size(n);
  thread_local std::vector<double> ug;
  thread_local std::vector<double> dg;
  ug.resize(points);
  dg.resize(points);
  fft::coeffs_to_grid(u.half(), ug);
  fft::coeffs_to_grid(inverse_laplacian_gradient(u).half(), dg);
  for (std::size_t j = 0; j < points; ++j) ug[j] = ug[j] * ug[j] * dg[j];

  SpectralField flux(n);
  fft::grid_to_coeffs(ug, flux.half());
  const int keep = std::min(galerkin_max_mode(eps), n);
  auto c = flux.half();
  for (std::size_t m = static_cast<std::size_t>(keep) + 1; m < c.size(); ++m) c[m] = 0.0;
  return flux;
}

SpectralField nonlinearity(const SpectralField& u, double chi, double eps) {
  SpectralField out = chemotactic_flux(u, eps);
  auto c = out.half();
  c[0] = 0.0;
  for (std::size_t m = 1; m < c.size(); ++m) c[m] *= cplx(0.0, chi * kTwoPi * static_cast<double>(m));
  return out;
}

double etd_weight(int m, double h) {
  if (m == 0) return h;
  const double lambda = heat_rate(static_cast<std::size_t>(std::abs(m)));
  return -std::expm1(-lambda * h) / lambda;
}

SpectralField etd_step(const SpectralField& w, const SpectralField& z_t, const SimConfig& cfg, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("etd_step: h must be >= 0");
  const SpectralField forcing = nonlinearity(w + z_t, cfg.chi, cfg.cutoff_eps());
  SpectralField out = heat_semigroup(w, h);
  auto c = out.half();
  auto f = forcing.half();
  for (std::size_t m = 0; m < c.size(); ++m) c[m] += etd_weight(static_cast<int>(m), h) * f[m];
  return out;
}

std::vector<double> step_schedule(const SimConfig& cfg, double t0, double t_end, bool ramp) {
  std::vector<double> steps;
  double t = t0;
  const double tiny = 1e-12 * std::max(1.0, std::abs(t_end));
  if (ramp && cfg.ramp_dt0 > 0.0) {
    for (double h = cfg.ramp_dt0; h < cfg.dt; h *= cfg.ramp_factor) {
      if (t + h >= t_end - tiny) {
        steps.push_back(t_end - t);
        return steps;
      }
      steps.push_back(h);
      t += h;
    }
  }
  const double remaining = t_end - t;
  if (remaining <= tiny) return steps;
  const double ratio = remaining / cfg.dt;
  const double whole = std::round(ratio);
  if (whole >= 1.0 && std::abs(ratio - whole) <= 1e-9 * std::max(1.0, ratio)) {
    steps.insert(steps.end(), static_cast<std::size_t>(whole), cfg.dt);
    return steps;
  }
  const auto n = static_cast<std::size_t>(std::floor(ratio));
  steps.insert(steps.end(), n, cfg.dt);
  const double last = remaining - static_cast<double>(n) * cfg.dt;
  if (last > tiny) steps.push_back(last);
  return steps;
}

Diagnostics diagnose(const SpectralField& u, double t, const SimConfig& cfg) {
  Diagnostics d;
  d.t = t;
  d.mean = u.mean();
  d.l2 = u.l2_norm();
  d.l4 = lp_norm(u, 4.0);
  d.lp = lp_norm(u, static_cast<double>(cfg.diag_p));
  d.holder = holder_norm(u, cfg.alpha);
  return d;
}

std::size_t Trajectory::index_of(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= tol) return i;
  }
  std::ostringstream msg;
  msg << "time " << t << " is not on the stored grid";
  throw std::invalid_argument(msg.str());
}

Integrator::Integrator(const SpectralField& zeta, const SimConfig& cfg, DriverPath driver, double t0)
    : cfg_(cfg), eps_(cfg.cutoff_eps()), driver_(std::move(driver)), u_(zeta), t_(t0) {
  if (zeta.n_modes() != cfg.n_modes) u_ = zeta.resized(cfg.n_modes);
  if (driver_.n_modes() != cfg.n_modes) throw std::invalid_argument("driver and config disagree on n_modes");
  if (driver_.is_stochastic()) {
    u_ += driver_.noise().sample_field();
  } else {
    w_ = u_;
    u_ = w_ + driver_.at(t0);
  }
}

void Integrator::step(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be > 0");
  const std::size_t len = static_cast<std::size_t>(cfg_.n_modes) + 1;
  if (h != cached_h_) {
    heat_.resize(len);
    weight_.resize(len);
    for (std::size_t m = 0; m < len; ++m) {
      heat_[m] = std::exp(-heat_rate(m) * h);
      weight_[m] = etd_weight(static_cast<int>(m), h);
    }
    cached_h_ = h;
  }

  const SpectralField forcing = nonlinearity(u_, cfg_.chi, eps_);
  auto f = forcing.half();
  if (driver_.is_stochastic()) {
    NoiseDriver& noise = driver_.noise();
    noise.ou_step(h);
    const SpectralField inc = noise.last_increment();
    auto c = u_.half();
    auto e = inc.half();
    for (std::size_t m = 0; m < len; ++m) c[m] = heat_[m] * c[m] + weight_[m] * f[m] + e[m];
    t_ += h;
  } else {
    auto c = w_.half();
    for (std::size_t m = 0; m < len; ++m) c[m] = heat_[m] * c[m] + weight_[m] * f[m];
    t_ += h;
    u_ = w_ + driver_.at(t_);
  }
  ++steps_;
  if (!u_.all_finite()) {
    std::ostringstream msg;
    msg << "blow-up detected at t=" << t_;
    throw BlowUpError(t_, msg.str());
  }
}

void Integrator::advance(const std::vector<double>& steps) {
  for (double h : steps) step(h);
}

SpectralField Integrator::w() const {
  if (driver_.is_stochastic()) return u_ - driver_.noise().sample_field();
  return w_;
}

SpectralField Integrator::z() const {
  if (driver_.is_stochastic()) return driver_.noise().sample_field();
  return u_ - w_;
}

DriverPath default_driver(const SimConfig& cfg) {
  if (!cfg.noise) return DriverPath::zero(cfg.n_modes);
  return DriverPath::stochastic(NoiseDriver(cfg.seed, cfg.cutoff_eps(), cfg.n_modes, cfg.noise_substeps));
}

Trajectory run(const SpectralField& zeta, const SimConfig& cfg) { return run(zeta, cfg, default_driver(cfg)); }

Trajectory run(const SpectralField& zeta, const SimConfig& cfg, DriverPath driver, double t0) {
  cfg.validate();
  Integrator it(zeta, cfg, std::move(driver), t0);
  Trajectory traj;
  const auto record = [&] {
    traj.times.push_back(it.time());
    traj.u.push_back(it.u());
    traj.w.push_back(it.w());
    traj.z.push_back(it.z());
    traj.diagnostics.push_back(diagnose(it.u(), it.time(), cfg));
    if (it.driver().is_stochastic()) traj.fine_steps.push_back(it.driver().noise().fine_step());
  };
  record();
  const std::vector<double> steps = step_schedule(cfg, t0, t0 + cfg.t_end);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    it.step(steps[k]);
    if ((k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0 || k + 1 == steps.size()) record();
  }
  if (it.driver().is_stochastic()) traj.final_driver = it.driver().noise();
  return traj;
}

Restart markov_restart(const Trajectory& traj, double t, const SimConfig& cfg) {
  const std::size_t i = traj.index_of(t);
  if (traj.fine_steps.empty()) throw std::invalid_argument("markov_restart needs a stochastic trajectory");
  NoiseDriver fresh = NoiseDriver::resume(cfg.seed, cfg.cutoff_eps(), cfg.n_modes, cfg.noise_substeps,
                                          traj.fine_steps[i], traj.times[i], SpectralField(cfg.n_modes));
  return Restart{traj.u[i], DriverPath::stochastic(std::move(fresh)), traj.times[i]};
}

}  // namespace chemo
