#pragma once

#include <vector>

#include "chemo/noise.hpp"
#include "chemo/sim_config.hpp"
#include "chemo/spectral_field.hpp"

namespace chemo {

/// Deterministic driver h^y steering zeta to y at time T:
///   u^y_t = e^{t Lap} zeta + (t/T)(y - e^{T Lap} zeta),
///   h^y_t = -int_0^t e^{(t-s) Lap} N(u^y_s) ds + (t/T)(y - e^{T Lap} zeta),
/// tabulated on the solver's step schedule for cfg on [0, T]. The integral is
/// accumulated with the same exponential Euler weights as the solver, so the
/// closed loop reproduces u^y up to rounding.
///
/// Throws std::invalid_argument if mean(y) != mean(zeta) or y has modes beyond cfg.n_modes.
DriverPath steering_control(const SpectralField& zeta, const SpectralField& y, double T, const SimConfig& cfg);

/// The reference path u^y on the same grid.
std::vector<SpectralField> steering_reference(const SpectralField& zeta, const SpectralField& y, double T,
                                              const SimConfig& cfg);

}  // namespace chemo
