#pragma once

#include <cstdint>

namespace chemo {

/// Model, regularity and discretization parameters of one run.
struct SimConfig {
  // regularity exponents
  double alpha0 = -0.1;
  double alpha = 0.05;
  double eta = 0.19;
  double delta = 0.25;
  bool strict = false;  // tightens eta < 1/4 to eta < 1/6

  // model
  double chi = 1.0;
  double mean = 0.0;

  // discretization
  int n_modes = 32;
  double eps = 0.0;  // 0 selects 1/(n_modes + 1/2): every stored mode is kept
  double dt = 1e-3;
  double t_end = 1.0;
  int record_stride = 1;
  bool noise = true;
  int noise_substeps = 1;
  // Optional geometric startup ramp dt0, dt0*f, dt0*f^2, ... capped at dt.
  double ramp_dt0 = 0.0;
  double ramp_factor = 1.1;
  int diag_p = 6;

  std::uint64_t seed = 1;

  /// Throws ConfigError naming the first violated inequality.
  void validate() const;

  /// min(eta - (alpha - alpha0)/2, 1/2 - 2 eta); positive for valid configs.
  double theta() const;

  /// Galerkin cutoff in effect.
  double cutoff_eps() const;
};

}  // namespace chemo
