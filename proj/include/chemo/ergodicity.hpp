#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chemo/sim_config.hpp"
#include "chemo/spectral_field.hpp"

namespace chemo {

struct EnsembleOptions {
  std::vector<int> p_values = {2, 4};
  std::vector<double> times;  // must lie on the step schedule of cfg
  bool same_seed = false;     // every path uses cfg.seed (zero-variance control)
};

/// Monte Carlo moments (t^{p/2} ^ 1) E||u_t||_p^p per initial condition.
/// Path i uses the seed child_seed(cfg.seed, i) for every initial condition,
/// so differences between initial conditions are measured with common noise.
struct EnsembleSummary {
  std::size_t n_paths = 0;
  std::uint64_t master_seed = 0;
  std::vector<int> p_values;
  std::vector<double> times;
  // [initial condition][p index][time index]
  std::vector<std::vector<std::vector<double>>> moment;
  std::vector<std::vector<std::vector<double>>> moment_se;
};

/// Throws std::invalid_argument for n_paths < 2 or off-schedule times.
EnsembleSummary ensemble_run(const SimConfig& cfg, std::size_t n_paths, const std::vector<SpectralField>& initial,
                             const EnsembleOptions& opt);

/// Fields sampled every `stride` steps of size cfg.dt along one trajectory from
/// zeta (seed cfg.seed), after a burn-in of `burn_in` time units.
std::vector<SpectralField> sample_invariant(const SimConfig& cfg, const SpectralField& zeta, double burn_in,
                                            std::size_t stride, std::size_t n_samples);

struct TailFit {
  double lambda_hat = 0.0;
  double stretch_hat = 0.0;
  double r2 = 0.0;
  double stretch_lo = 0.0;  // 95% bootstrap interval
  double stretch_hi = 0.0;
  double proxy = 0.0;  // mean of exp(lambda_hat r^{1-2 delta} / 2)
  std::size_t n_fit = 0;
  // Empirical upper tail used by the fit.
  std::vector<double> r;
  std::vector<double> survival;
};

/// Fits log(-log S(r)) = stretch log r + log Lambda on the empirical survival
/// S between the top decile and the top percentile, with plotting positions
/// S_i = (n - i - 1/2)/n. Throws TailUnderresolved for fewer than 1000
/// samples or a degenerate tail.
TailFit tail_fit(std::span<const double> norms, double delta, int bootstrap = 200, std::uint64_t seed = 1);
TailFit tail_fit(const std::vector<SpectralField>& samples, double p, double delta, int bootstrap = 200,
                 std::uint64_t seed = 1);

/// Mean of exp(lambda r^{1 - 2 delta} / 2).
double integrability_proxy(std::span<const double> norms, double lambda, double delta);

/// Low-dimensional observables of u: Re u_1, Im u_1, Re u_2, Im u_2, ||u||_{L2}.
std::vector<double> observables(const SpectralField& u);

struct TvOptions {
  std::vector<double> times;  // must lie on the step schedule of cfg
  std::size_t n_paths = 1000;
  std::uint64_t seed1 = 1;
  std::uint64_t seed2 = 2;
  int bootstrap = 200;
  double floor_factor = 2.0;  // fit only where d > floor_factor * floor
  double saturation = 0.9;    // and d < saturation
};

struct TvResult {
  std::vector<double> times;
  std::vector<double> d;      // max over observables of the histogram TV
  std::vector<double> se;     // bootstrap standard error
  std::vector<double> floor;  // null-distribution level
  std::size_t fit_begin = 0;  // fit segment [fit_begin, fit_end)
  std::size_t fit_end = 0;
  double c_hat = 0.0;
  double c_lo = 0.0;  // 95% bootstrap interval
  double c_hi = 0.0;
  double amplitude = 0.0;  // smallest A with d <= A e^{-c t} on the fit segment
};

/// Independent ensembles from zeta1 (seed tree seed1) and zeta2 (seed2).
/// Throws std::invalid_argument if the means differ; throws std::runtime_error
/// if fewer than three times fall on the decaying segment.
TvResult tv_mixing(const SimConfig& cfg, const SpectralField& zeta1, const SpectralField& zeta2,
                   const TvOptions& opt);

/// Curve only, without fitting or bootstrap.
std::vector<double> tv_curve(const SimConfig& cfg, const SpectralField& zeta1, const SpectralField& zeta2,
                             const TvOptions& opt);

}  // namespace chemo
