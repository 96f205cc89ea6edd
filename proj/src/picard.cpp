#include "chemo/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chemo/analysis.hpp"
#include "chemo/errors.hpp"
#include "chemo/solver.hpp"

namespace chemo {
namespace {

// Driver values at t_k = k h, k = 0..n.
std::vector<SpectralField> sample_driver(const DriverPath& z, double h, std::size_t n, int n_modes) {
  std::vector<SpectralField> out;
  out.reserve(n + 1);
  if (z.is_stochastic()) {
    NoiseDriver d = z.noise();
    out.push_back(d.sample_field().resized(n_modes));
    for (std::size_t k = 0; k < n; ++k) {
      d.ou_step(h);
      out.push_back(d.sample_field().resized(n_modes));
    }
  } else {
    for (std::size_t k = 0; k <= n; ++k) out.push_back(z.at(static_cast<double>(k) * h).resized(n_modes));
  }
  return out;
}

}  // namespace

double picard_horizon(double r, double c_cal, double theta, double t_cap) {
  if (!(r > 0.0) || !(c_cal > 0.0) || !(theta > 0.0)) throw std::invalid_argument("picard_horizon: bad arguments");
  return std::min(std::pow(1.0 / (c_cal * r), 1.0 / theta), t_cap);
}

double picard_data_size(const SpectralField& zeta, const DriverPath& z, const SimConfig& cfg) {
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  const std::vector<SpectralField> zs = sample_driver(z, cfg.t_end / static_cast<double>(n), n, cfg.n_modes);
  const double zn = sup_holder_norm(zs, cfg.alpha);
  return std::max(1.0, zn * zn * zn + holder_norm(zeta, cfg.alpha0));
}

PicardResult picard_local_solve(const SpectralField& zeta_in, const DriverPath& z, const SimConfig& cfg,
                                const PicardOptions& opt) {
  cfg.validate();
  const SpectralField zeta = zeta_in.resized(cfg.n_modes);
  PicardResult res;
  res.r = picard_data_size(zeta, z, cfg);
  res.t_star = opt.horizon > 0.0 ? opt.horizon : picard_horizon(res.r, opt.c_cal, cfg.theta(), cfg.t_end);
  const auto n = static_cast<std::size_t>(
      opt.steps > 0 ? opt.steps
                    : std::max({1.0, static_cast<double>(opt.min_steps), std::ceil(res.t_star / cfg.dt - 1e-9)}));
  const double h = res.t_star / static_cast<double>(n);
  const double eps = cfg.cutoff_eps();

  res.times.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) res.times[k] = static_cast<double>(k) * h;
  res.z = sample_driver(z, h, n, cfg.n_modes);

  std::vector<SpectralField> free(n + 1);
  for (std::size_t k = 0; k <= n; ++k) free[k] = heat_semigroup(zeta, res.times[k]);
  std::vector<SpectralField> w = free;

  std::vector<SpectralField> next(n + 1);
  std::vector<SpectralField> diff(n + 1);
  double prev_diff = -1.0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    // Duhamel sum by recursion: I_{k+1} = e^{h Lap}(I_k + h N_k).
    SpectralField acc(cfg.n_modes);
    next[0] = free[0];
    for (std::size_t k = 0; k < n; ++k) {
      acc += h * nonlinearity(w[k] + res.z[k], cfg.chi, eps);
      acc = heat_semigroup(acc, h);
      next[k + 1] = free[k + 1] + acc;
    }
    double scale = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      diff[k] = next[k] - w[k];
      scale = std::max(scale, next[k].l2_norm());
    }
    const double d = weighted_sup_norm(res.times, diff, cfg.eta, cfg.alpha);
    w.swap(next);
    res.iterations = it;

    const double floor = 1e-12 * (1.0 + scale);
    if (prev_diff > floor && d > floor) {
      const double ratio = d / prev_diff;
      res.ratios.push_back(ratio);
      res.max_ratio = std::max(res.max_ratio, ratio);
      if (ratio >= 1.0) {
        std::ostringstream msg;
        msg << "mild map does not contract on [0, " << res.t_star << "]: ratio " << ratio;
        throw HorizonTooLong(res.t_star, ratio, msg.str());
      }
    }
    if (d < opt.tol) {
      res.w = std::move(w);
      res.weighted_norm = weighted_sup_norm(res.times, res.w, cfg.eta, cfg.alpha);
      return res;
    }
    prev_diff = d;
  }
  throw std::runtime_error("picard iteration did not reach tolerance");
}

}  // namespace chemo
