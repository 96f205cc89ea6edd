#include "chemo/sim_config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemo/errors.hpp"

namespace chemo {
namespace {

void require(bool ok, const char* field, const std::string& inequality) {
  if (!ok) throw ConfigError(field, 0, inequality + " violated");
}

}  // namespace

void SimConfig::validate() const {
  require(std::isfinite(alpha0) && alpha0 > -0.5 && alpha0 < 0.0, "alpha0", "-1/2 < alpha0 < 0");
  require(std::isfinite(alpha) && alpha > 0.0, "alpha", "alpha > 0");
  require(alpha < alpha0 + 0.5, "alpha", "alpha < alpha0 + 1/2");
  require(std::isfinite(eta) && eta > 0.5 * (alpha - alpha0), "eta", "(alpha - alpha0)/2 < eta");
  require(eta < 0.25, "eta", "eta < 1/4");
  if (strict) require(eta < 1.0 / 6.0, "eta", "eta < 1/6");
  require(std::isfinite(delta) && delta > 0.0 && delta < 0.5, "delta", "0 < delta < 1/2");
  require(theta() > 0.0, "eta", "theta > 0");
  require(std::isfinite(chi), "chi", "chi finite");
  require(std::isfinite(mean), "mean", "mean finite");
  require(n_modes >= 1, "modes", "modes >= 1");
  require(eps == 0.0 || (eps > 0.0 && eps < 1.0), "eps", "0 < eps < 1");
  require(std::isfinite(dt) && dt > 0.0, "dt", "dt > 0");
  require(std::isfinite(t_end) && t_end > 0.0, "t_end", "t_end > 0");
  require(record_stride >= 1, "record_stride", "record_stride >= 1");
  require(noise_substeps >= 1, "noise_substeps", "noise_substeps >= 1");
  require(ramp_dt0 >= 0.0 && ramp_dt0 <= dt, "ramp_dt0", "0 <= ramp_dt0 <= dt");
  require(ramp_dt0 == 0.0 || ramp_factor > 1.0, "ramp_factor", "ramp_factor > 1");
  require(diag_p >= 2 && diag_p % 2 == 0, "diag_p", "diag_p even and >= 2");
}

double SimConfig::theta() const { return std::min(eta - 0.5 * (alpha - alpha0), 0.5 - 2.0 * eta); }

double SimConfig::cutoff_eps() const { return eps > 0.0 ? eps : 1.0 / (n_modes + 0.5); }

}  // namespace chemo
