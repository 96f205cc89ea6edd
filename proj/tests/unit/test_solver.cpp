#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chemo/errors.hpp"
#include "chemo/picard.hpp"
#include "chemo/sim_config.hpp"
#include "chemo/solver.hpp"
#include "chemo/stats.hpp"
#include "chemo/steering.hpp"
#include "doctest.h"

using chemo::DriverPath;
using chemo::SimConfig;
using chemo::SpectralField;

namespace {

SimConfig small_config(int n = 16, double dt = 1e-3, double t_end = 0.1) {
  SimConfig cfg;
  cfg.n_modes = n;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.noise = false;
  return cfg;
}

SpectralField bumpy(int n, double mean = 1.0) {
  return SpectralField::constant(n, mean) + SpectralField::cosine(n, 1, 2.0) + SpectralField::sine(n, 2, 1.0);
}

// Smooth mean-free deterministic driver.
DriverPath wave_driver(int n, double scale = 1.0) {
  return DriverPath::deterministic(
      [n, scale](double t) {
        return scale * (SpectralField::cosine(n, 3, 0.4 * std::cos(2.0 * std::numbers::pi * t)) +
                        SpectralField::sine(n, 1, 0.3 * t));
      },
      n);
}

}  // namespace

TEST_CASE("config validation names the violated inequality") {
  SimConfig cfg;
  cfg.alpha0 = -0.25;
  cfg.alpha = 0.1;
  cfg.eta = 0.2;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.theta() == doctest::Approx(0.025));
  cfg.eta = 0.3;
  try {
    cfg.validate();
    FAIL("accepted eta = 0.3");
  } catch (const chemo::ConfigError& e) {
    CHECK(std::string(e.what()).find("eta < 1/4 violated") != std::string::npos);
    CHECK(e.field() == "eta");
  }
  cfg.eta = 0.2;
  cfg.alpha = 0.4;
  try {
    cfg.validate();
    FAIL("accepted alpha = 0.4");
  } catch (const chemo::ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha < alpha0 + 1/2 violated") != std::string::npos);
  }
  SimConfig strict;
  strict.strict = true;
  strict.eta = 0.19;
  CHECK_THROWS_AS(strict.validate(), chemo::ConfigError);
}

TEST_CASE("the nonlinearity is linear in chi") {
  const SpectralField u = bumpy(8);
  const SpectralField a = chemo::nonlinearity(u, 2.0, 0.1);
  const SpectralField b = chemo::nonlinearity(u, 1.0, 0.1);
  CHECK((a - 2.0 * b).l2_norm() == 0.0);
}

TEST_CASE("exponential step without forcing is the heat flow") {
  SimConfig cfg = small_config(8);
  cfg.chi = 0.0;
  const SpectralField w = bumpy(8);
  CHECK(chemo::etd_step(w, SpectralField(8), cfg, 0.01) == chemo::heat_semigroup(w, 0.01));
  cfg.chi = 1.0;
  CHECK(chemo::etd_step(w, SpectralField(8), cfg, 0.0) == w);
  CHECK(chemo::etd_weight(0, 0.01) == 0.01);
  CHECK(chemo::etd_weight(2, 0.01) == doctest::Approx((1.0 - std::exp(-16.0 * M_PI * M_PI * 0.01)) /
                                                      (16.0 * M_PI * M_PI)));
}

TEST_CASE("constant data without noise is stationary") {
  const SimConfig cfg = small_config(16, 1e-3, 0.05);
  const chemo::Trajectory traj = chemo::run(SpectralField::constant(16, 0.7), cfg);
  for (const SpectralField& u : traj.u) CHECK(u == SpectralField::constant(16, 0.7));
}

TEST_CASE("step schedules land on the end time") {
  SimConfig cfg = small_config(8, 0.03, 0.1);
  auto s = chemo::step_schedule(cfg, 0.0, 0.1);
  REQUIRE(s.size() == 4);
  CHECK(s.back() == doctest::Approx(0.01));
  cfg.dt = 0.01;
  CHECK(chemo::step_schedule(cfg, 0.0, 0.1).size() == 10);
  cfg.ramp_dt0 = 1e-4;
  cfg.ramp_factor = 2.0;
  s = chemo::step_schedule(cfg, 0.0, 0.1);
  CHECK(s.front() == 1e-4);
  double total = 0.0;
  for (double h : s) {
    CHECK(h <= cfg.dt);
    total += h;
  }
  CHECK(total == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("trajectories satisfy u = w + z and conserve mass") {
  SimConfig cfg = small_config(32, 1e-3, 0.2);
  cfg.noise = true;
  cfg.seed = 9;
  cfg.chi = 2.0;
  cfg.record_stride = 10;
  const SpectralField zeta = bumpy(32, 0.6);
  const chemo::Trajectory traj = chemo::run(zeta, cfg);
  REQUIRE(traj.size() == 21);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK((traj.u[i] - traj.w[i] - traj.z[i]).l2_norm() < 1e-12);
    CHECK(std::abs(traj.u[i].mean() - 0.6) < 1e-12);
    CHECK(traj.z[i].mean() == 0.0);
  }
  const chemo::Trajectory again = chemo::run(zeta, cfg);
  CHECK(again.u.back() == traj.u.back());
  CHECK(traj.index_of(0.1) == 10);
  CHECK_THROWS_AS(traj.index_of(0.105), std::invalid_argument);
}

TEST_CASE("zero driver reproduces the deterministic equation") {
  SimConfig cfg = small_config(16, 1e-3, 0.05);
  cfg.chi = 1.5;
  const SpectralField zeta = bumpy(16);
  const chemo::Trajectory a = chemo::run(zeta, cfg);
  SpectralField w = zeta;
  for (int k = 0; k < 50; ++k) w = chemo::etd_step(w, SpectralField(16), cfg, 1e-3);
  CHECK((a.u.back() - w).l2_norm() < 1e-13);
}

TEST_CASE("stochastic run minus its noise equals the remainder") {
  SimConfig cfg = small_config(16, 1e-3, 0.05);
  cfg.noise = true;
  cfg.seed = 4;
  const chemo::Trajectory traj = chemo::run(bumpy(16), cfg);
  chemo::NoiseDriver d(4, cfg.cutoff_eps(), 16);
  for (int k = 0; k < 50; ++k) d.ou_step(1e-3);
  CHECK(traj.z.back() == d.sample_field());
  CHECK((traj.u.back() - d.sample_field() - traj.w.back()).l2_norm() == 0.0);
}

TEST_CASE("exponential Euler converges at first order") {
  SimConfig cfg = small_config(16, 2e-3, 0.1);
  cfg.chi = 2.0;
  const SpectralField zeta = bumpy(16);
  const auto final_u = [&](double dt) {
    SimConfig c = cfg;
    c.dt = dt;
    return chemo::run(zeta, c).u.back();
  };
  const SpectralField a = final_u(2e-3);
  const SpectralField b = final_u(1e-3);
  const SpectralField c = final_u(5e-4);
  const double ratio = (a - b).l2_norm() / (b - c).l2_norm();
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
}

TEST_CASE("scaling covariance: (c zeta, c Z, chi / c^2) gives c times the solution") {
  SimConfig cfg = small_config(12, 1e-3, 0.05);
  cfg.chi = 1.0;
  const SpectralField zeta = bumpy(12, 0.0);
  const chemo::Trajectory base = chemo::run(zeta, cfg, wave_driver(12));
  for (double c : {0.5, 3.0}) {
    SimConfig scaled = cfg;
    scaled.chi = cfg.chi / (c * c);
    const chemo::Trajectory other = chemo::run(c * zeta, scaled, wave_driver(12, c));
    CHECK((other.u.back() - c * base.u.back()).l2_norm() < 1e-8 * c * base.u.back().l2_norm());
  }
}

TEST_CASE("remainder is continuous at t = 0") {
  SimConfig cfg = small_config(16, 1e-4, 0.01);
  cfg.chi = 1.0;
  const SpectralField zeta = bumpy(16);
  const chemo::Trajectory traj = chemo::run(zeta, cfg, wave_driver(16));
  double prev = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double d = (traj.w[i] - zeta).l2_norm();
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("markov restart continues the run bit for bit") {
  SimConfig cfg = small_config(16, 1e-3, 0.2);
  cfg.noise = true;
  cfg.seed = 17;
  cfg.chi = 1.0;
  cfg.record_stride = 25;
  const chemo::Trajectory traj = chemo::run(bumpy(16), cfg);
  const chemo::Restart r = chemo::markov_restart(traj, 0.1, cfg);
  SimConfig rest = cfg;
  rest.t_end = 0.1;
  const chemo::Trajectory cont = chemo::run(r.zeta, rest, r.driver, r.t);
  CHECK(cont.u.back() == traj.u.back());
  const chemo::Restart r2 = chemo::markov_restart(traj, 0.1, cfg);
  CHECK(chemo::run(r2.zeta, rest, r2.driver, r2.t).u.back() == cont.u.back());
  CHECK_THROWS_AS(chemo::markov_restart(traj, 0.11, cfg), std::invalid_argument);
}

TEST_CASE("restart from u_t with fresh noise has the law of the direct run") {
  SimConfig cfg = small_config(8, 5e-3, 0.5);
  cfg.noise = true;
  cfg.chi = 1.0;
  const SpectralField zeta = bumpy(8);
  const std::size_t paths = 1000;
  std::vector<double> direct;
  std::vector<double> restarted;
  for (std::size_t i = 0; i < paths; ++i) {
    SimConfig c = cfg;
    c.seed = 1 + i;
    chemo::Integrator it(zeta, c, chemo::default_driver(c));
    it.advance(chemo::step_schedule(c, 0.0, 0.5));
    direct.push_back(it.u().coeff(1).real());

    chemo::Integrator first(zeta, c, chemo::default_driver(c));
    first.advance(chemo::step_schedule(c, 0.0, 0.25));
    chemo::Integrator second(first.u(), c,
                             DriverPath::stochastic(chemo::NoiseDriver(100000 + i, c.cutoff_eps(), 8)), 0.25);
    second.advance(chemo::step_schedule(c, 0.25, 0.5));
    restarted.push_back(second.u().coeff(1).real());
  }
  CHECK(chemo::stats::ks_statistic(direct, restarted) < chemo::stats::ks_critical(0.01, paths, paths));
}

TEST_CASE("non-finite states are reported as blow-up") {
  SimConfig cfg = small_config(8, 1e-3, 0.01);
  SpectralField zeta = bumpy(8);
  zeta.set_coeff(2, chemo::cplx(NAN, 0.0));
  CHECK_THROWS_AS(chemo::run(zeta, cfg), chemo::BlowUpError);
}

TEST_CASE("picard fixed point of constant data is immediate") {
  SimConfig cfg = small_config(8, 1e-3, 0.1);
  const chemo::PicardResult r =
      chemo::picard_local_solve(SpectralField::constant(8, 0.4), DriverPath::zero(8), cfg, {});
  CHECK(r.iterations == 1);
  for (const SpectralField& w : r.w) CHECK(w == SpectralField::constant(8, 0.4));
}

TEST_CASE("picard limit agrees with the exponential integrator") {
  SimConfig cfg = small_config(4, 1e-4, 0.05);
  const SpectralField zeta = SpectralField::cosine(4, 1);
  chemo::PicardOptions opt;
  opt.horizon = 0.05;
  const chemo::PicardResult r = chemo::picard_local_solve(zeta, DriverPath::zero(4), cfg, opt);
  CHECK(r.max_ratio < 1.0);
  const chemo::Trajectory traj = chemo::run(zeta, cfg);
  CHECK((r.w.back() - traj.u.back()).l2_norm() < 1e-4);
}

TEST_CASE("picard horizon and data size") {
  CHECK(chemo::picard_horizon(2.0, 1.0, 0.5, 10.0) == doctest::Approx(0.25));
  CHECK(chemo::picard_horizon(0.5, 1.0, 0.5, 1.0) == 1.0);
  SimConfig cfg = small_config(8, 1e-3, 0.1);
  CHECK(chemo::picard_data_size(SpectralField(8), DriverPath::zero(8), cfg) == 1.0);
}

TEST_CASE("an overlong horizon is flagged") {
  SimConfig cfg = small_config(16, 1e-3, 1.0);
  cfg.chi = 50.0;
  chemo::PicardOptions opt;
  opt.horizon = 1.0;
  const SpectralField zeta = SpectralField::constant(16, 3.0) + SpectralField::cosine(16, 1, 3.0);
  CHECK_THROWS_AS(chemo::picard_local_solve(zeta, DriverPath::zero(16), cfg, opt), chemo::HorizonTooLong);
}

TEST_CASE("steering reaches band-limited targets and rejects mean mismatch") {
  SimConfig cfg = small_config(16, 1e-3, 0.1);
  const SpectralField zeta = bumpy(16, 0.5);
  const SpectralField y = SpectralField::constant(16, 0.5) + SpectralField::cosine(16, 2, 0.8);
  const DriverPath h = chemo::steering_control(zeta, y, 0.1, cfg);
  const chemo::Trajectory traj = chemo::run(zeta, cfg, h);
  CHECK((traj.u.back() - y).l2_norm() < 1e-10);
  CHECK(std::abs(traj.u.back().mean() - 0.5) < 1e-12);
  CHECK_THROWS_AS(chemo::steering_control(zeta, SpectralField::constant(16, 0.0), 0.1, cfg), std::invalid_argument);

  // Constant data and target: no control needed.
  const DriverPath zero = chemo::steering_control(SpectralField::constant(16, 2.0), SpectralField::constant(16, 2.0),
                                                  0.1, cfg);
  CHECK(zero.at(0.05).l2_norm() == 0.0);
}
