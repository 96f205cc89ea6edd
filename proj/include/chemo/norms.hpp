#pragma once

#include <limits>

#include "chemo/spectral_field.hpp"

namespace chemo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Besov exponents; p and q accept kInf.
struct BesovParams {
  double alpha = 0.0;
  double p = kInf;
  double q = kInf;
};

/// L^p(T) norm by grid quadrature. Exact for even integer p; for p = kInf the
/// grid maximum on a 4x oversampled grid, which is a lower bound of the sup.
double lp_norm(const SpectralField& f, double p);

/// int_T |f|^p for even integer p, exact.
double lp_power(const SpectralField& f, int p);

/// ell^q over sharp dyadic blocks of 2^{alpha max(k,0)} ||Delta_k f||_{L^p}.
double besov_norm(const SpectralField& f, const BesovParams& bp);

/// Hoelder-Besov norm C^alpha = B^alpha_{inf,inf}.
inline double holder_norm(const SpectralField& f, double alpha) { return besov_norm(f, {alpha, kInf, kInf}); }

}  // namespace chemo
