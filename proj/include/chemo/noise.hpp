#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "chemo/spectral_field.hpp"

namespace chemo {

/// Galerkin-truncated stochastic heat equation v_{t0,t}, advanced exactly mode
/// by mode as a complex Ornstein-Uhlenbeck process:
///   X_m <- e^{-4 pi^2 m^2 h} X_m + eta_m,  E|eta_m|^2 = (1 - e^{-8 pi^2 m^2 h}) / (8 pi^2 m^2)
/// for 0 < m < 1/eps; negative modes follow by conjugation and mode 0 is never
/// forced.
///
/// Gaussians are drawn from a counter-based stream keyed by (seed, mode, fine
/// step), so paths are reproducible regardless of scheduling. Each step of
/// size h consumes `substeps` fine increments of size h/substeps and composes
/// them exactly; a run at step h with substeps 2 therefore sees the same
/// Brownian path as a run at step h/2 with substeps 1.
class NoiseDriver {
 public:
  NoiseDriver(std::uint64_t seed, double eps, int n_modes, int substeps = 1);

  /// Rebuilds a driver mid-stream, e.g. from a serialized checkpoint.
  static NoiseDriver resume(std::uint64_t seed, double eps, int n_modes, int substeps,
                            std::uint64_t fine_step, double clock, const SpectralField& state);

  /// Throws std::invalid_argument for h <= 0.
  void ou_step(double h);

  /// Current v as a field with n_modes() modes and zero mean.
  SpectralField sample_field() const;
  /// Increment added by the most recent ou_step (zero before the first step).
  SpectralField last_increment() const;

  /// Driver for v_{t,.}: zero state at the current clock, same stream position.
  NoiseDriver restart() const;

  std::uint64_t seed() const { return seed_; }
  double eps() const { return eps_; }
  int n_modes() const { return n_modes_; }
  int max_mode() const { return max_mode_; }
  int substeps() const { return substeps_; }
  std::uint64_t fine_step() const { return fine_step_; }
  double clock() const { return clock_; }

  /// OU state of modes 1..max_mode().
  std::span<const cplx> states() const { return state_; }

 private:
  std::uint64_t seed_;
  double eps_;
  int n_modes_;
  int max_mode_;
  int substeps_;
  std::uint64_t fine_step_ = 0;
  double clock_ = 0.0;
  std::vector<cplx> state_;
  std::vector<cplx> increment_;
};

/// Value-returning form of NoiseDriver::ou_step.
NoiseDriver ou_step(NoiseDriver d, double h);

/// Time-indexed samples of a deterministic path; exact at the stored times,
/// linear in between.
class TabulatedPath {
 public:
  TabulatedPath(std::vector<double> times, std::vector<SpectralField> fields);
  SpectralField at(double t) const;
  std::span<const double> times() const { return times_; }
  std::span<const SpectralField> fields() const { return fields_; }

 private:
  std::vector<double> times_;
  std::vector<SpectralField> fields_;
};

/// Driver Z of the remainder equation: either the stochastic heat equation or
/// a deterministic mean-free path.
class DriverPath {
 public:
  using Function = std::function<SpectralField(double)>;

  static DriverPath stochastic(NoiseDriver driver);
  static DriverPath deterministic(Function z, int n_modes);
  static DriverPath tabulated(TabulatedPath path);
  static DriverPath zero(int n_modes);

  bool is_stochastic() const { return std::holds_alternative<NoiseDriver>(impl_); }
  int n_modes() const { return n_modes_; }

  NoiseDriver& noise();
  const NoiseDriver& noise() const;

  /// Deterministic value Z_t. Throws std::logic_error on a stochastic driver
  /// and std::invalid_argument if Z_t does not have zero mean.
  SpectralField at(double t) const;

 private:
  DriverPath(std::variant<NoiseDriver, Function> impl, int n_modes)
      : impl_(std::move(impl)), n_modes_(n_modes) {}
  std::variant<NoiseDriver, Function> impl_;
  int n_modes_;
};

}  // namespace chemo
