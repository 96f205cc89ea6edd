#pragma once

#include <span>

#include "chemo/noise.hpp"
#include "chemo/norms.hpp"
#include "chemo/sim_config.hpp"
#include "chemo/solver.hpp"

namespace chemo {

/// sup over the given times of (t^eta ^ 1) ||f_t||_{C^alpha}.
double weighted_sup_norm(std::span<const double> times, std::span<const SpectralField> fields, double eta,
                         double alpha);
/// Weighted norm of the remainder w of a trajectory.
double weighted_sup_norm(const Trajectory& traj, double eta, double alpha);

/// sup over the given fields of ||Z_t||_{C^alpha}.
double sup_holder_norm(std::span<const SpectralField> fields, double alpha);

/// Discrete residual of the L^p energy balance of the remainder on [t0, t1]:
///   (||w_t1||_p^p - ||w_t0||_p^p) / (p(p-1))
///     + int <w^{p-2} dw, dw> + int <chi F(w+Z), w^{p-2} dw>,
/// F(u) = Pi_eps(u^2 d rho_u), with trapezoidal time quadrature over the stored
/// records and exact grid quadrature in space. eps = 0 keeps every stored
/// mode. Throws for odd p or off-grid t0, t1.
double energy_identity_residual(const Trajectory& traj, int p, double t0, double t1, double chi,
                                double eps = 0.0);

struct AprioriInputs {
  int p = 2;
  double chi = 1.0;
  double mean = 0.0;    // 0 or 1
  double z_norm = 0.0;  // ||Z||_{C_t C^alpha}
  double t = 1.0;
  double alpha = 0.25;
  double c_cal = 1.0;
};

/// (p(1+alpha) + 2 + alpha) / (alpha (p+2)).
double apriori_gamma(int p, double alpha);

/// max{(chi t/4)^{-1/2}, C (p v chi)^gamma Z^{1/alpha}, C (p v chi)^{(p+1)/(p+2)} m}.
/// Throws std::invalid_argument outside the admissible inputs.
double apriori_bound(const AprioriInputs& in);

/// max{(t c1 (lambda-1)/2)^{-1/(lambda-1)}, (c2/c1)^{1/lambda}}: upper bound at
/// time t for any f >= 0 with f' + c1 f^lambda <= c2.
double ode_comparison(double c1, double c2, double lambda, double t);

/// Finite-difference sensitivity of the deterministic solution map:
///   ||w - w'||_{C_{eta;T} C^alpha} / (||zeta - zeta'||_{C^alpha0} + ||Z - Z'||_{C_T C^alpha}).
/// Identical inputs give 0.
double lipschitz_probe(const SpectralField& zeta, const SpectralField& zeta2, const DriverPath& z,
                       const DriverPath& z2, const SimConfig& cfg);

/// ||e^{t Lap} f||_{C^alpha} t^{(alpha-beta)/2} / ||f||_{C^beta}.
double heat_smoothing_ratio(const SpectralField& f, double alpha, double beta, double t);

}  // namespace chemo
