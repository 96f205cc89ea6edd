#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chemo/noise.hpp"
#include "chemo/sim_config.hpp"
#include "chemo/spectral_field.hpp"

namespace chemo {

/// Pi_eps(u^2 d/dx rho_u), formed on a grid of more than 4N points so every
/// retained mode is alias free.
SpectralField chemotactic_flux(const SpectralField& u, double eps);

/// chi * d/dx Pi_eps(u^2 d/dx rho_u).
SpectralField nonlinearity(const SpectralField& u, double chi, double eps);

/// phi_1-weighted step factor h phi_1(h lambda_m) = (1 - e^{-lambda_m h}) / lambda_m, and h at m = 0.
double etd_weight(int m, double h);

/// w <- e^{h Lap} w + h phi_1(h Lap) nonlinearity(w + Z_t).
SpectralField etd_step(const SpectralField& w, const SpectralField& z_t, const SimConfig& cfg, double h);

/// Step sizes covering [t0, t_end]: the optional geometric startup ramp, then
/// uniform dt, with the last step clipped to land on t_end. Solution independent.
std::vector<double> step_schedule(const SimConfig& cfg, double t0, double t_end, bool ramp = true);

struct Diagnostics {
  double t = 0.0;
  double mean = 0.0;
  double l2 = 0.0;
  double l4 = 0.0;
  double lp = 0.0;
  double holder = 0.0;  // C^alpha norm of u
};

Diagnostics diagnose(const SpectralField& u, double t, const SimConfig& cfg);

/// Stored states of a run. u = w + z at every record, z being the driver
/// (the stochastic heat equation v for noisy runs).
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> w;
  std::vector<SpectralField> z;
  std::vector<SpectralField> u;
  std::vector<Diagnostics> diagnostics;
  /// Noise stream position at each record; empty for deterministic drivers.
  std::vector<std::uint64_t> fine_steps;
  std::optional<NoiseDriver> final_driver;

  std::size_t size() const { return times.size(); }
  /// Index of the record at time t, or throws std::invalid_argument if t is off-grid.
  std::size_t index_of(double t) const;
};

/// Advances u = w + Z one step at a time on a shared clock with the driver.
///
/// With a stochastic driver the update is applied to u directly,
///   u <- e^{h Lap} u + h phi_1(h Lap) N(u) + eta,   v <- e^{h Lap} v + eta,
/// which is the exponential Euler step for w = u - v written without the
/// subtraction; restarts at any step therefore reproduce the uninterrupted run
/// exactly. With a deterministic driver w is advanced and u = w + Z(t).
class Integrator {
 public:
  Integrator(const SpectralField& zeta, const SimConfig& cfg, DriverPath driver, double t0 = 0.0);

  /// Throws BlowUpError if the new state is not finite.
  void step(double h);
  /// Runs a schedule of steps.
  void advance(const std::vector<double>& steps);

  double time() const { return t_; }
  std::uint64_t steps_taken() const { return steps_; }
  const SpectralField& u() const { return u_; }
  SpectralField w() const;
  SpectralField z() const;
  const DriverPath& driver() const { return driver_; }
  const SimConfig& config() const { return cfg_; }

 private:
  SimConfig cfg_;
  double eps_;
  DriverPath driver_;
  SpectralField u_;
  SpectralField w_;  // deterministic drivers only
  double t_;
  std::uint64_t steps_ = 0;
  std::vector<double> heat_;
  std::vector<double> weight_;
  double cached_h_ = -1.0;
};

/// Default driver for cfg: the stochastic heat equation seeded by cfg.seed, or zero.
DriverPath default_driver(const SimConfig& cfg);

/// Integrates from zeta over [t0, t0 + cfg.t_end], recording every
/// cfg.record_stride steps and at the end. The startup ramp, if configured,
/// applies at the start of every run.
Trajectory run(const SpectralField& zeta, const SimConfig& cfg);
Trajectory run(const SpectralField& zeta, const SimConfig& cfg, DriverPath driver, double t0 = 0.0);

/// Restart data at a stored time: zeta' = u_t and the driver v_{t,.} sharing
/// the original stream.
struct Restart {
  SpectralField zeta;
  DriverPath driver;
  double t;
};

/// Throws std::invalid_argument if t is not a stored time.
Restart markov_restart(const Trajectory& traj, double t, const SimConfig& cfg);

}  // namespace chemo
