#include <cmath>
#include <stdexcept>
#include <vector>

#include "chemo/ergodicity.hpp"
#include "chemo/errors.hpp"
#include "chemo/norms.hpp"
#include "chemo/rng.hpp"
#include "doctest.h"

using chemo::SimConfig;
using chemo::SpectralField;

namespace {

// Exp(1) samples: S(r) = exp(-r), stretch 1, Lambda 1.
std::vector<double> exponential_sample(std::size_t n, std::uint64_t seed) {
  std::vector<double> x;
  for (std::size_t k = 0; x.size() < n; ++k) {
    const auto [a, b] = chemo::rng::uniform_pair(seed, chemo::rng::Stream::kSynthetic, 1, k);
    x.push_back(-std::log(a));
    x.push_back(-std::log(b));
  }
  x.resize(n);
  return x;
}

// Norm of a standard planar Gaussian: S(r) = exp(-r^2/2), stretch 2, Lambda 1/2.
std::vector<double> gaussian_norm_sample(std::size_t n, std::uint64_t seed) {
  std::vector<double> x;
  for (std::size_t k = 0; x.size() < n; ++k) {
    const auto [a, b] = chemo::rng::gaussian_pair(seed, chemo::rng::Stream::kSynthetic, 2, k);
    x.push_back(std::hypot(a, b));
  }
  return x;
}

SimConfig small_config() {
  SimConfig c;
  c.n_modes = 8;
  c.dt = 1e-3;
  c.t_end = 0.2;
  return c;
}

}  // namespace

TEST_CASE("tail fit recovers the stretch of exponential and Gaussian tails") {
  const chemo::TailFit e = chemo::tail_fit(exponential_sample(20000, 1), 0.25, 100, 3);
  CHECK(e.stretch_hat == doctest::Approx(1.0).epsilon(0.1));
  CHECK(e.lambda_hat == doctest::Approx(1.0).epsilon(0.3));
  CHECK(e.stretch_lo <= e.stretch_hat);
  CHECK(e.stretch_hi >= e.stretch_hat);
  CHECK(e.r2 > 0.99);
  CHECK(e.r.size() == e.survival.size());
  CHECK(e.n_fit == e.r.size());

  const chemo::TailFit g = chemo::tail_fit(gaussian_norm_sample(20000, 2), 0.25, 100, 3);
  CHECK(g.stretch_hat == doctest::Approx(2.0).epsilon(0.1));
  CHECK(g.lambda_hat == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("tail fit refuses underresolved samples") {
  CHECK_THROWS_AS(chemo::tail_fit(exponential_sample(999, 1), 0.25), chemo::TailUnderresolved);
  CHECK_THROWS_AS(chemo::tail_fit(std::vector<double>(5000, 1.0), 0.25), chemo::TailUnderresolved);
}

TEST_CASE("integrability proxy") {
  const std::vector<double> r = {0.0, 1.0, 4.0};
  CHECK(chemo::integrability_proxy(r, 0.0, 0.25) == 1.0);
  // exponent 1 - 2 delta = 1/2: terms exp(0), exp(1/2), exp(1).
  CHECK(chemo::integrability_proxy(r, 1.0, 0.25) == doctest::Approx((1.0 + std::exp(0.5) + std::exp(1.0)) / 3.0));
}

TEST_CASE("observables read the two lowest modes and the L2 norm") {
  const SpectralField u = SpectralField::cosine(4, 1, 2.0) + SpectralField::sine(4, 2, 1.0);
  const std::vector<double> o = chemo::observables(u);
  REQUIRE(o.size() == 5);
  CHECK(o[0] == doctest::Approx(1.0));
  CHECK(o[1] == doctest::Approx(0.0));
  CHECK(o[2] == doctest::Approx(0.0));
  CHECK(o[3] == doctest::Approx(-0.5));
  CHECK(o[4] == doctest::Approx(u.l2_norm()));
}

TEST_CASE("ensemble moments: same-seed control has zero spread") {
  SimConfig c = small_config();
  chemo::EnsembleOptions opt;
  opt.times = {0.1, 0.2};
  opt.same_seed = true;
  const auto s = chemo::ensemble_run(c, 8, {SpectralField::cosine(8, 1)}, opt);
  for (const auto& per_p : s.moment_se[0]) {
    for (double se : per_p) CHECK(se == 0.0);
  }
  opt.same_seed = false;
  const auto r = chemo::ensemble_run(c, 8, {SpectralField::cosine(8, 1)}, opt);
  CHECK(r.moment_se[0][0][1] > 0.0);
  CHECK(r.p_values == std::vector<int>{2, 4});
}

TEST_CASE("ensemble moments use common noise across initial conditions") {
  SimConfig c = small_config();
  chemo::EnsembleOptions opt;
  opt.times = {0.2};
  const SpectralField z = SpectralField::cosine(8, 2, 0.5);
  const auto s = chemo::ensemble_run(c, 4, {z, z}, opt);
  CHECK(s.moment[0] == s.moment[1]);
}

TEST_CASE("ensemble weight t^{p/2} is applied below t = 1") {
  SimConfig c = small_config();
  c.noise = false;
  chemo::EnsembleOptions opt;
  opt.times = {0.1};
  opt.p_values = {2};
  const SpectralField z = SpectralField::constant(8, 3.0);
  const auto s = chemo::ensemble_run(c, 2, {z}, opt);
  CHECK(s.moment[0][0][0] == doctest::Approx(0.1 * 9.0));
}

TEST_CASE("ensemble argument checks") {
  SimConfig c = small_config();
  chemo::EnsembleOptions opt;
  opt.times = {0.1};
  CHECK_THROWS_AS(chemo::ensemble_run(c, 1, {SpectralField(8)}, opt), std::invalid_argument);
  opt.times = {0.1005};
  CHECK_THROWS_AS(chemo::ensemble_run(c, 4, {SpectralField(8)}, opt), std::invalid_argument);
  opt.times = {0.3};
  CHECK_THROWS_AS(chemo::ensemble_run(c, 4, {SpectralField(8)}, opt), std::invalid_argument);
}

TEST_CASE("invariant sampling preserves mass and validates its arguments") {
  SimConfig c = small_config();
  c.mean = 0.7;
  const auto v = chemo::sample_invariant(c, SpectralField::constant(8, 0.7), 1.0, 10, 20);
  CHECK(v.size() == 20);
  for (const auto& u : v) CHECK(u.mean() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(!(v[0] == v[1]));
  CHECK_THROWS_AS(chemo::sample_invariant(c, SpectralField(8), 0.5, 10, 2), std::invalid_argument);
  CHECK_THROWS_AS(chemo::sample_invariant(c, SpectralField(8), 1.0, 0, 2), std::invalid_argument);
}

TEST_CASE("identical-seed control gives a total variation curve of exactly zero") {
  SimConfig c = small_config();
  chemo::TvOptions opt;
  opt.times = {0.01, 0.05, 0.1};
  opt.n_paths = 50;
  opt.seed1 = opt.seed2 = 9;
  const SpectralField z = SpectralField::cosine(8, 1, 2.0);
  for (double d : chemo::tv_curve(c, z, z, opt)) CHECK(d == 0.0);
}

TEST_CASE("total variation requires equal means") {
  SimConfig c = small_config();
  chemo::TvOptions opt;
  opt.times = {0.01};
  opt.n_paths = 10;
  CHECK_THROWS_AS(chemo::tv_curve(c, SpectralField(8), SpectralField::constant(8, 1.0), opt), std::invalid_argument);
}

TEST_CASE("total variation decays from separated initial conditions") {
  SimConfig c = small_config();
  chemo::TvOptions opt;
  for (int k = 1; k <= 20; ++k) opt.times.push_back(0.005 * k);
  opt.n_paths = 400;
  opt.bootstrap = 50;
  const SpectralField z1 = SpectralField::cosine(8, 1, 0.3);
  const SpectralField z2 = SpectralField::cosine(8, 1, -0.3);
  const chemo::TvResult r = chemo::tv_mixing(c, z1, z2, opt);
  CHECK(r.d.front() > r.d.back());
  CHECK(r.fit_end - r.fit_begin >= 3);
  CHECK(r.c_hat > 0.0);
  CHECK(r.c_lo <= r.c_hat);
  CHECK(r.c_hi >= r.c_hat);
  for (std::size_t t = r.fit_begin; t < r.fit_end; ++t) {
    CHECK(r.d[t] <= r.amplitude * std::exp(-r.c_hat * r.times[t]) * (1.0 + 1e-12));
  }
}
