#pragma once

#include <vector>

#include "chemo/noise.hpp"
#include "chemo/sim_config.hpp"
#include "chemo/spectral_field.hpp"

namespace chemo {

struct PicardOptions {
  double c_cal = 1.0;  // constant C in T* = (1/(C r))^{1/theta} ^ T
  double tol = 1e-10;  // stop when successive iterates differ by less, in C_{eta;T*} C^alpha
  int max_iter = 200;
  int steps = 0;         // time steps on [0, T*]; 0 picks max(ceil(T*/dt), min_steps)
  int min_steps = 16;    // a horizon shorter than a few dt is still resolved
  double horizon = 0.0;  // > 0 replaces T*
};

struct PicardResult {
  std::vector<double> times;
  std::vector<SpectralField> w;
  std::vector<SpectralField> z;
  int iterations = 0;         // applications of the mild map
  std::vector<double> ratios;  // successive-difference ratios above the rounding floor
  double max_ratio = 0.0;
  double r = 0.0;       // max(1, ||Z||^3_{C_T C^alpha} + ||zeta||_{C^alpha0})
  double t_star = 0.0;  // horizon actually solved
  double weighted_norm = 0.0;  // sup t^eta ||w_t||_{C^alpha}
};

/// (1/(C r))^{1/theta} ^ t_cap.
double picard_horizon(double r, double c_cal, double theta, double t_cap);

/// Size of the data, max(1, ||Z||^3_{C_T C^alpha} + ||zeta||_{C^alpha0}), with
/// Z sampled every cfg.dt on [0, cfg.t_end].
double picard_data_size(const SpectralField& zeta, const DriverPath& z, const SimConfig& cfg);

/// Fixed-point iteration of the discretized mild map
///   (Psi w)_n = e^{t_n Lap} zeta + sum_{j<n} e^{(t_n - t_j) Lap} h N(w_j + Z_j)
/// from the start iterate e^{t Lap} zeta. Throws HorizonTooLong when a
/// successive-difference ratio reaches 1, and std::runtime_error if tol is not
/// met within max_iter.
PicardResult picard_local_solve(const SpectralField& zeta, const DriverPath& z, const SimConfig& cfg,
                                const PicardOptions& opt = {});

}  // namespace chemo
