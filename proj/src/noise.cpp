#include "chemo/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "chemo/rng.hpp"

namespace chemo {
namespace {

double ou_rate(int m) {
  const double k = 2.0 * std::numbers::pi * m;
  return k * k;
}

}  // namespace

NoiseDriver::NoiseDriver(std::uint64_t seed, double eps, int n_modes, int substeps)
    : seed_(seed), eps_(eps), n_modes_(n_modes), max_mode_(galerkin_max_mode(eps)), substeps_(substeps) {
  if (n_modes < 0) throw std::invalid_argument("n_modes must be nonnegative");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  max_mode_ = std::min(max_mode_, n_modes);
  state_.assign(static_cast<std::size_t>(max_mode_), cplx(0.0, 0.0));
  increment_ = state_;
}

NoiseDriver NoiseDriver::resume(std::uint64_t seed, double eps, int n_modes, int substeps,
                                std::uint64_t fine_step, double clock, const SpectralField& state) {
  NoiseDriver d(seed, eps, n_modes, substeps);
  d.fine_step_ = fine_step;
  d.clock_ = clock;
  for (int m = 1; m <= d.max_mode_; ++m) d.state_[static_cast<std::size_t>(m - 1)] = state.coeff(m);
  return d;
}

void NoiseDriver::ou_step(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("ou_step: h must be > 0");
  const double sub = h / substeps_;
  for (int m = 1; m <= max_mode_; ++m) {
    const double rate = ou_rate(m);
    const double decay_sub = std::exp(-rate * sub);
    // Per-component standard deviation: half of E|eta|^2 on each of re, im.
    const double sd = std::sqrt(-std::expm1(-2.0 * rate * sub) / (2.0 * rate) * 0.5);
    cplx inc(0.0, 0.0);
    for (int s = 0; s < substeps_; ++s) {
      const auto [z1, z2] = rng::gaussian_pair(seed_, rng::Stream::kNoise, static_cast<std::uint32_t>(m),
                                               fine_step_ + static_cast<std::uint64_t>(s));
      inc = decay_sub * inc + cplx(sd * z1, sd * z2);
    }
    const auto idx = static_cast<std::size_t>(m - 1);
    state_[idx] = std::exp(-rate * h) * state_[idx] + inc;
    increment_[idx] = inc;
  }
  fine_step_ += static_cast<std::uint64_t>(substeps_);
  clock_ += h;
}

SpectralField NoiseDriver::sample_field() const {
  SpectralField f(n_modes_);
  auto c = f.half();
  for (int m = 1; m <= max_mode_; ++m) c[static_cast<std::size_t>(m)] = state_[static_cast<std::size_t>(m - 1)];
  return f;
}

SpectralField NoiseDriver::last_increment() const {
  SpectralField f(n_modes_);
  auto c = f.half();
  for (int m = 1; m <= max_mode_; ++m) c[static_cast<std::size_t>(m)] = increment_[static_cast<std::size_t>(m - 1)];
  return f;
}

NoiseDriver NoiseDriver::restart() const {
  NoiseDriver d = *this;
  std::fill(d.state_.begin(), d.state_.end(), cplx(0.0, 0.0));
  std::fill(d.increment_.begin(), d.increment_.end(), cplx(0.0, 0.0));
  return d;
}

NoiseDriver ou_step(NoiseDriver d, double h) {
  d.ou_step(h);
  return d;
}

TabulatedPath::TabulatedPath(std::vector<double> times, std::vector<SpectralField> fields)
    : times_(std::move(times)), fields_(std::move(fields)) {
  if (times_.empty() || times_.size() != fields_.size()) {
    throw std::invalid_argument("tabulated path needs matching, nonempty times and fields");
  }
  if (!std::is_sorted(times_.begin(), times_.end())) throw std::invalid_argument("times must be sorted");
}

SpectralField TabulatedPath::at(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  if (t < times_.front() - tol || t > times_.back() + tol) {
    throw std::out_of_range("tabulated path queried outside its time range");
  }
  auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
  auto i = static_cast<std::size_t>(it - times_.begin());
  if (i < times_.size() && std::abs(times_[i] - t) <= tol) return fields_[i];
  if (i == 0) return fields_.front();
  if (i >= times_.size()) return fields_.back();
  const double lam = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return (1.0 - lam) * fields_[i - 1] + lam * fields_[i];
}

DriverPath DriverPath::stochastic(NoiseDriver driver) {
  const int n = driver.n_modes();
  return DriverPath(std::move(driver), n);
}

DriverPath DriverPath::deterministic(Function z, int n_modes) {
  if (!z) throw std::invalid_argument("empty driver function");
  return DriverPath(std::move(z), n_modes);
}

DriverPath DriverPath::tabulated(TabulatedPath path) {
  const int n = path.fields().front().n_modes();
  return deterministic([p = std::move(path)](double t) { return p.at(t); }, n);
}

DriverPath DriverPath::zero(int n_modes) {
  return deterministic([n_modes](double) { return SpectralField(n_modes); }, n_modes);
}

NoiseDriver& DriverPath::noise() {
  if (!is_stochastic()) throw std::logic_error("driver path is deterministic");
  return std::get<NoiseDriver>(impl_);
}

const NoiseDriver& DriverPath::noise() const {
  if (!is_stochastic()) throw std::logic_error("driver path is deterministic");
  return std::get<NoiseDriver>(impl_);
}

SpectralField DriverPath::at(double t) const {
  if (is_stochastic()) throw std::logic_error("stochastic driver has no closed-form value");
  SpectralField z = std::get<Function>(impl_)(t);
  if (z.n_modes() != n_modes_) z = z.resized(n_modes_);
  if (std::abs(z.mean()) > 1e-12 * (1.0 + z.l2_norm())) {
    throw std::invalid_argument("driver path must have zero spatial mean");
  }
  return z;
}

}  // namespace chemo
