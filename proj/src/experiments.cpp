#include "chemo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "chemo/analysis.hpp"
#include "chemo/ergodicity.hpp"
#include "chemo/errors.hpp"
#include "chemo/io.hpp"
#include "chemo/norms.hpp"
#include "chemo/parallel.hpp"
#include "chemo/rng.hpp"
#include "chemo/solver.hpp"
#include "chemo/steering.hpp"

namespace chemo {
namespace {

constexpr int kMinExponent = -20;
constexpr int kMaxExponent = 20;

// Rows of report.csv; the run passes iff every row passes.
class Report {
 public:
  void add(const std::string& quantity, double t, double value, double bound, bool pass) {
    rows_.push_back({quantity, io::fmt(t), io::fmt(value), io::fmt(bound), pass ? "1" : "0"});
    pass_ = pass_ && pass;
  }
  void info(const std::string& quantity, double t, double value) {
    rows_.push_back({quantity, io::fmt(t), io::fmt(value), "", ""});
  }
  void fail(const std::string& quantity, double t) {
    rows_.push_back({quantity, io::fmt(t), "", "", "0"});
    pass_ = false;
  }
  bool pass() const { return pass_; }
  void write(const std::filesystem::path& file, const std::string& header) const {
    io::CsvWriter csv(file,
                      header + "\ncolumns: quantity, time t (NaN if not time resolved), value, gate bound "
                               "(empty for informational rows), pass (1/0, empty for informational rows)",
                      {"quantity", "t", "value", "bound", "pass"});
    for (const auto& r : rows_) csv.row(r);
  }

 private:
  std::vector<std::vector<std::string>> rows_;
  bool pass_ = true;
};

constexpr double kNoTime = std::numeric_limits<double>::quiet_NaN();

// 0 for constant, else mean + a cos(2 pi m x + phase) with L2 size `size`.
SpectralField sized_datum(const SimConfig& cfg, double size, int mode) {
  SpectralField f = SpectralField::constant(cfg.n_modes, cfg.mean);
  if (size > 0.0) f += SpectralField::cosine(cfg.n_modes, mode, size * std::numbers::sqrt2);
  return f;
}

double apriori_phase(std::uint64_t seed) { return rng::uniform_pair(seed, rng::Stream::kInitialData, 0, 0).first; }

Calibration load_calibration(const RunManifest& m) {
  return m.calibration.empty() ? Calibration{} : read_calibration(m.calibration);
}

std::vector<std::uint64_t> seed_battery(const RunManifest& m) {
  std::vector<std::uint64_t> seeds(m.paths);
  for (std::size_t i = 0; i < m.paths; ++i) seeds[i] = m.cfg.seed + i;
  return seeds;
}

std::string fmt_short(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

// --- experiments -----------------------------------------------------------

void do_simulate(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  const SpectralField zeta = initial_field(m.initial, m.cfg);
  const Trajectory traj = run(zeta, m.cfg);
  io::write_trajectory(m.out, traj, header);
  double drift = 0.0;
  for (const auto& d : traj.diagnostics) drift = std::max(drift, std::abs(d.mean - zeta.mean()));
  const bool ok = drift < 1e-10;
  report.add("mass_drift", traj.times.back(), drift, 1e-10, ok);
  report.info("final_l2", traj.times.back(), traj.diagnostics.back().l2);
  if (!ok) log << "mass conservation violated: drift " << drift << "\n";
}

void do_picard(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  const Calibration cal = load_calibration(m);
  const SpectralField zeta = initial_field(m.initial, m.cfg);
  const DriverPath driver = default_driver(m.cfg);
  PicardOptions opt;
  opt.c_cal = cal.picard_c;
  PicardResult res;
  bool shrunk = false;
  for (int attempt = 0;; ++attempt) {
    try {
      res = picard_local_solve(zeta, driver, m.cfg, opt);
      break;
    } catch (const HorizonTooLong& e) {
      if (attempt >= 40) throw;
      log << e.what() << "; retrying on half the horizon\n";
      report.add("contraction_ratio", e.horizon(), e.ratio(), cal.contraction_target, false);
      opt.horizon = 0.5 * e.horizon();
      shrunk = true;
    }
  }
  {
    io::CsvWriter csv(m.out / "picard.csv", header + "\ncolumns: t, L2 norm of the remainder w, C^alpha norm of w",
                      {"t", "w_l2", "w_holder"});
    for (std::size_t k = 0; k < res.times.size(); ++k) {
      csv.row({io::fmt(res.times[k]), io::fmt(res.w[k].l2_norm()), io::fmt(holder_norm(res.w[k], m.cfg.alpha))});
    }
  }
  report.info("data_size_r", kNoTime, res.r);
  report.info("t_star", kNoTime, res.t_star);
  report.info("iterations", kNoTime, res.iterations);
  report.info("weighted_norm", kNoTime, res.weighted_norm);
  const bool ok = res.max_ratio <= cal.contraction_target;
  report.add("contraction_ratio", res.t_star, res.max_ratio, cal.contraction_target, ok && !shrunk);
  if (!ok) log << "local existence: contraction ratio " << res.max_ratio << " above " << cal.contraction_target << "\n";
}

void do_steer(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  const SpectralField zeta = initial_field(m.initial, m.cfg);
  SpectralField y = SpectralField::constant(m.cfg.n_modes, m.cfg.mean);
  y += SpectralField::cosine(m.cfg.n_modes, m.initial.target_mode, m.initial.target_amplitude);
  const double T = m.cfg.t_end;
  const Trajectory traj = run(zeta, m.cfg, steering_control(zeta, y, T, m.cfg));
  io::write_trajectory(m.out, traj, header);
  const double err = (traj.u.back() - y).l2_norm();
  const bool ok = err < 1e-3;
  report.add("steering_error_l2", T, err, 1e-3, ok);
  if (!ok) log << "steering control missed the target at t=" << T << ": error " << err << "\n";
}

void do_apriori(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  const Calibration cal = load_calibration(m);
  const std::vector<std::uint64_t> seeds = seed_battery(m);
  const std::vector<double> means = {0.0, 1.0};
  const std::vector<int> ps = {2, 4, 6};
  const std::vector<AprioriSample> samples = apriori_samples(m.cfg, seeds, means, ps);

  // Worst seed per (mean, p, step), written at record steps.
  std::map<std::tuple<double, int, std::size_t>, std::pair<double, const AprioriSample*>> worst;
  const std::size_t last = step_schedule(m.cfg, 0.0, m.cfg.t_end).size();
  const auto stride = static_cast<std::size_t>(m.cfg.record_stride);
  for (const AprioriSample& s : samples) {
    if (s.step % stride != 0 && s.step != last) continue;
    const double ratio = s.value / apriori_envelope(s, m.cfg, cal.apriori_c);
    auto key = std::make_tuple(s.mean, s.p, s.step);
    auto it = worst.find(key);
    if (it == worst.end() || ratio > it->second.first) worst[key] = {ratio, &s};
  }
  {
    io::CsvWriter csv(m.out / "envelope.csv",
                      header + "\ncolumns: mean, p, t, value = ||w_t||_{L^p} of the seed closest to its bound, "
                               "bound = a priori envelope for that seed, ratio = value/bound, seed",
                      {"mean", "p", "t", "value", "bound", "ratio", "seed"});
    for (const auto& [key, entry] : worst) {
      const AprioriSample& s = *entry.second;
      csv.row({io::fmt(s.mean), std::to_string(s.p), io::fmt(s.t), io::fmt(s.value),
               io::fmt(apriori_envelope(s, m.cfg, cal.apriori_c)), io::fmt(entry.first), std::to_string(s.seed)});
    }
  }
  const EnvelopeCheck check = check_envelope(samples, m.cfg, cal.apriori_c);
  report.info("calibrated_C", kNoTime, cal.apriori_c);
  report.info("violations", kNoTime, static_cast<double>(check.violations));
  report.add("envelope_ratio", check.worst.t, check.worst_ratio, 1.0, check.violations == 0);
  if (check.violations > 0) {
    log << "a priori envelope violated at t=" << fmt_short(check.worst.t) << ", p=" << check.worst.p
        << " (mean " << check.worst.mean << ", seed " << check.worst.seed << ", ratio " << check.worst_ratio << ")\n";
  }
}

void do_ensemble(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  std::vector<SpectralField> initial;
  for (double size : m.initial.battery) initial.push_back(sized_datum(m.cfg, size, m.initial.mode));
  EnsembleOptions opt;
  opt.times = record_times(m.cfg);
  const EnsembleSummary s = ensemble_run(m.cfg, m.paths, initial, opt);
  {
    io::CsvWriter csv(m.out / "moments.csv",
                      header + "\ncolumns: size = L2 norm of the initial datum minus its mean, p, t, "
                               "moment = (t^{p/2} ^ 1) mean ||u_t||_p^p over paths, se = its standard error",
                      {"size", "p", "t", "moment", "se"});
    for (std::size_t ic = 0; ic < initial.size(); ++ic) {
      for (std::size_t q = 0; q < s.p_values.size(); ++q) {
        for (std::size_t k = 0; k < s.times.size(); ++k) {
          csv.row({io::fmt(m.initial.battery[ic]), std::to_string(s.p_values[q]), io::fmt(s.times[k]),
                   io::fmt(s.moment[ic][q][k]), io::fmt(s.moment_se[ic][q][k])});
        }
      }
    }
  }
  bool any = false;
  for (std::size_t q = 0; q < s.p_values.size(); ++q) {
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      if (s.times[k] < 1.0 - 1e-12) continue;
      double worst = 0.0;
      for (std::size_t i = 0; i < initial.size(); ++i) {
        for (std::size_t j = i + 1; j < initial.size(); ++j) {
          const double se = std::hypot(s.moment_se[i][q][k], s.moment_se[j][q][k]);
          const double z = se > 0.0 ? std::abs(s.moment[i][q][k] - s.moment[j][q][k]) / se : 0.0;
          worst = std::max(worst, z);
        }
      }
      any = true;
      const bool ok = worst <= 3.0;
      report.add("moment_gap_p" + std::to_string(s.p_values[q]) + "_in_se", s.times[k], worst, 3.0, ok);
      if (!ok) {
        log << "uniform moment bound: initial conditions disagree at t=" << fmt_short(s.times[k])
            << ", p=" << s.p_values[q] << " (" << worst << " SE)\n";
      }
    }
  }
  if (!any) report.info("no_times_after_1", kNoTime, 0.0);
}

void do_tail(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  const SpectralField zeta = initial_field(m.initial, m.cfg);
  const std::vector<SpectralField> samples = sample_invariant(m.cfg, zeta, m.burn_in, m.stride, m.samples);
  std::vector<double> norms(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) norms[i] = lp_norm(samples[i], m.cfg.diag_p);
  const TailFit full = tail_fit(norms, m.cfg.delta, 200, m.cfg.seed);
  const TailFit half = tail_fit(std::span<const double>(norms).first(norms.size() / 2), m.cfg.delta, 200, m.cfg.seed);
  {
    io::CsvWriter csv(m.out / "tail.csv",
                      header + "\ncolumns: r = ||u||_{L^p} order statistic in the fitted tail, survival = "
                               "plotting position (n - i - 1/2)/n",
                      {"r", "survival"});
    for (std::size_t i = 0; i < full.r.size(); ++i) csv.row({io::fmt(full.r[i]), io::fmt(full.survival[i])});
  }
  {
    io::CsvWriter csv(m.out / "tail_fit.csv",
                      header + "\nfit of log(-log S) = stretch log r + log lambda; proxy = mean exp(lambda r^{1-2 "
                               "delta}/2); *_half use the first half of the samples",
                      {"quantity", "value"});
    const std::vector<std::pair<std::string, double>> kv = {
        {"lambda_hat", full.lambda_hat}, {"stretch_hat", full.stretch_hat}, {"stretch_lo", full.stretch_lo},
        {"stretch_hi", full.stretch_hi}, {"r2", full.r2},                   {"proxy", full.proxy},
        {"n_samples", static_cast<double>(norms.size())},                   {"n_fit", static_cast<double>(full.n_fit)},
        {"lambda_hat_half", half.lambda_hat}, {"stretch_hat_half", half.stretch_hat}, {"proxy_half", half.proxy},
    };
    for (const auto& [k, v] : kv) csv.row({k, io::fmt(v)});
  }
  report.info("stretch_hat", kNoTime, full.stretch_hat);
  report.info("stretch_lo", kNoTime, full.stretch_lo);
  report.info("stretch_hi", kNoTime, full.stretch_hi);
  report.info("proxy", kNoTime, full.proxy);
  const double change = std::abs(full.proxy - half.proxy) / full.proxy;
  const bool ok = std::isfinite(change) && change <= 0.1;
  report.add("proxy_relative_change_under_doubling", kNoTime, change, 0.1, ok);
  if (!ok) log << "stretched-exponential integrability proxy unstable under sample doubling: change " << change << "\n";
}

void do_tv(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  const SpectralField zeta1 = SpectralField::constant(m.cfg.n_modes, m.cfg.mean) +
                              SpectralField::cosine(m.cfg.n_modes, m.initial.mode, m.initial.amplitude);
  const SpectralField zeta2 = SpectralField::constant(m.cfg.n_modes, m.cfg.mean) +
                              SpectralField::cosine(m.cfg.n_modes, m.initial.mode, -m.initial.amplitude);
  TvOptions opt;
  opt.times = record_times(m.cfg);
  opt.n_paths = m.paths;
  opt.seed1 = m.cfg.seed;
  opt.seed2 = rng::splitmix64(m.cfg.seed);

  TvOptions control = opt;
  control.seed2 = opt.seed1;
  const std::vector<double> zero = tv_curve(m.cfg, zeta1, zeta1, control);
  const double control_max = *std::max_element(zero.begin(), zero.end());
  report.add("identical_seed_control_tv", kNoTime, control_max, 0.0, control_max == 0.0);

  const TvResult res = tv_mixing(m.cfg, zeta1, zeta2, opt);
  {
    io::CsvWriter csv(m.out / "tv.csv",
                      header + "\ncolumns: t, d = max over observables of the histogram TV distance, se = bootstrap "
                               "standard error, floor = same-law level, in_fit = 1 on the fitted segment",
                      {"t", "d", "se", "floor", "in_fit"});
    for (std::size_t k = 0; k < res.times.size(); ++k) {
      const bool in_fit = k >= res.fit_begin && k < res.fit_end;
      csv.row({io::fmt(res.times[k]), io::fmt(res.d[k]), io::fmt(res.se[k]), io::fmt(res.floor[k]),
               in_fit ? "1" : "0"});
    }
  }
  {
    io::CsvWriter csv(m.out / "tv_fit.csv", header + "\nfit d ~ amplitude exp(-c t) on the decaying segment",
                      {"quantity", "value"});
    for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{
             {"c_hat", res.c_hat}, {"c_lo", res.c_lo}, {"c_hi", res.c_hi}, {"amplitude", res.amplitude},
             {"fit_t_begin", res.times[res.fit_begin]}, {"fit_t_end", res.times[res.fit_end - 1]}}) {
      csv.row({k, io::fmt(v)});
    }
  }
  report.info("c_hat", kNoTime, res.c_hat);
  report.info("amplitude", kNoTime, res.amplitude);
  const bool rate_ok = res.c_lo > 0.0;
  report.add("rate_ci_lower", kNoTime, res.c_lo, 0.0, rate_ok);
  if (!rate_ok) log << "exponential mixing: bootstrap interval of the rate includes 0 (" << res.c_lo << ")\n";
  for (std::size_t k = 0; k + 1 < res.times.size(); ++k) {
    if (res.times[k] < 1.0 - 1e-12) continue;
    const double slack = 2.0 * std::hypot(res.se[k], res.se[k + 1]);
    const double rise = res.d[k + 1] - res.d[k];
    const bool ok = rise <= slack;
    report.add("tv_increase", res.times[k + 1], rise, slack, ok);
    if (!ok) log << "exponential mixing: TV distance increases at t=" << fmt_short(res.times[k + 1]) << "\n";
  }
}

void do_calibrate(const RunManifest& m, const std::string& header, Report& report, std::ostream& log) {
  const std::vector<std::uint64_t> seeds = seed_battery(m);
  Calibration cal;
  cal.seeds = seeds;
  cal.picard_c = calibrate_picard(picard_gate_config(), seeds, cal.contraction_target);
  log << "local existence constant C = " << cal.picard_c << "\n";
  const SimConfig acfg = apriori_gate_config();
  const std::vector<double> means = {0.0, 1.0};
  const std::vector<int> ps = {2, 4, 6};
  cal.apriori_c = calibrate_apriori(apriori_samples(acfg, seeds, means, ps), acfg);
  log << "a priori constant C = " << cal.apriori_c << "\n";
  write_calibration(m.out / "calibration.txt", cal,
                    header + "\nsmallest powers of two passing the gate configurations on the seeds below");
  report.info("picard_C", kNoTime, cal.picard_c);
  report.info("apriori_C", kNoTime, cal.apriori_c);
}

}  // namespace

SimConfig picard_gate_config() {
  SimConfig cfg;
  cfg.alpha0 = -0.1;
  cfg.alpha = 0.05;
  cfg.eta = 0.19;
  cfg.chi = 1.0;
  cfg.n_modes = 16;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  return cfg;
}

SimConfig apriori_gate_config() {
  SimConfig cfg;
  cfg.alpha0 = -0.1;
  cfg.alpha = 0.25;
  cfg.eta = 0.2;
  cfg.chi = 4.0;
  cfg.n_modes = 64;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  return cfg;
}

std::vector<double> record_times(const SimConfig& cfg) {
  const std::vector<double> steps = step_schedule(cfg, 0.0, cfg.t_end);
  std::vector<double> out;
  double t = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    t += steps[k];
    if ((k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0 || k + 1 == steps.size()) out.push_back(t);
  }
  return out;
}

PicardResult picard_case(const SimConfig& cfg, std::uint64_t seed, const PicardOptions& opt, double amplitude) {
  SimConfig c = cfg;
  c.seed = seed;
  const SpectralField zeta =
      SpectralField::constant(c.n_modes, c.mean) + SpectralField::cosine(c.n_modes, 1, amplitude);
  return picard_local_solve(zeta, DriverPath::stochastic(NoiseDriver(seed, c.cutoff_eps(), c.n_modes, c.noise_substeps)),
                            c, opt);
}

double calibrate_picard(const SimConfig& cfg, std::span<const std::uint64_t> seeds, double target) {
  const auto passes = [&](int k) {
    PicardOptions opt;
    opt.c_cal = std::exp2(k);
    constexpr std::size_t n_amp = std::size(kPicardAmplitudes);
    std::vector<char> ok(seeds.size() * n_amp, 0);
    parallel_for(ok.size(), [&](std::size_t i) {
      try {
        ok[i] = picard_case(cfg, seeds[i / n_amp], opt, kPicardAmplitudes[i % n_amp]).max_ratio <= target;
      } catch (const HorizonTooLong&) {
        ok[i] = 0;
      }
    });
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  };
  // The ratio is not monotone in the horizon, so no bisection: C is the
  // smallest power of two above which every power passes.
  if (!passes(kMaxExponent)) throw std::runtime_error("calibrate_picard: no contraction even at C = 2^20");
  for (int k = kMaxExponent - 1; k >= kMinExponent; --k) {
    if (!passes(k)) return std::exp2(k + 1);
  }
  return std::exp2(kMinExponent);
}

std::vector<AprioriSample> apriori_samples(const SimConfig& cfg, std::span<const std::uint64_t> seeds,
                                           std::span<const double> means, std::span<const int> p_values) {
  cfg.validate();
  const std::vector<double> steps = step_schedule(cfg, 0.0, cfg.t_end);
  const std::size_t n_runs = seeds.size() * means.size();
  std::vector<std::vector<AprioriSample>> per_run(n_runs);
  parallel_for(n_runs, [&](std::size_t run_index) {
    SimConfig c = cfg;
    c.seed = seeds[run_index / means.size()];
    c.mean = means[run_index % means.size()];
    SpectralField zeta = SpectralField::constant(c.n_modes, c.mean);
    zeta += SpectralField::cosine(c.n_modes, 1, 2.0, 2.0 * std::numbers::pi * apriori_phase(c.seed));
    Integrator it(zeta, c, DriverPath::stochastic(NoiseDriver(c.seed, c.cutoff_eps(), c.n_modes, c.noise_substeps)));
    auto& out = per_run[run_index];
    out.reserve(steps.size() * p_values.size());
    double z_sup = 0.0;  // Z_0 = 0
    for (std::size_t k = 0; k < steps.size(); ++k) {
      it.step(steps[k]);
      z_sup = std::max(z_sup, holder_norm(it.z(), c.alpha));
      const SpectralField w = it.w();
      for (int p : p_values) out.push_back({c.seed, c.mean, p, k + 1, it.time(), lp_norm(w, p), z_sup});
    }
  });
  std::vector<AprioriSample> all;
  for (auto& r : per_run) all.insert(all.end(), r.begin(), r.end());
  return all;
}

double apriori_envelope(const AprioriSample& s, const SimConfig& cfg, double c_cal) {
  AprioriInputs in;
  in.p = s.p;
  in.chi = cfg.chi;
  in.mean = s.mean;
  in.z_norm = s.z_norm;
  in.t = s.t;
  in.alpha = cfg.alpha;
  in.c_cal = c_cal;
  return apriori_bound(in);
}

EnvelopeCheck check_envelope(std::span<const AprioriSample> samples, const SimConfig& cfg, double c_cal) {
  EnvelopeCheck out;
  out.worst_ratio = -1.0;
  for (const AprioriSample& s : samples) {
    const double ratio = s.value / apriori_envelope(s, cfg, c_cal);
    if (!(ratio <= 1.0)) ++out.violations;
    if (!(ratio <= out.worst_ratio)) {
      out.worst_ratio = ratio;
      out.worst = s;
    }
  }
  return out;
}

double calibrate_apriori(std::span<const AprioriSample> samples, const SimConfig& cfg) {
  for (int k = kMinExponent; k <= kMaxExponent; ++k) {
    if (check_envelope(samples, cfg, std::exp2(k)).violations == 0) return std::exp2(k);
  }
  throw std::runtime_error("calibrate_apriori: envelope violated even at C = 2^20");
}

int orchestrate(const RunManifest& m, std::ostream& log) {
  const std::string header = std::string("manifest\n") + m.echo();
  Report report;
  int status = 0;
  try {
    std::filesystem::create_directories(m.out);
    {
      std::ofstream out(m.out / "manifest.txt", std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + (m.out / "manifest.txt").string());
      out << m.echo();
    }
    switch (m.kind) {
      case Experiment::kSimulate: do_simulate(m, header, report, log); break;
      case Experiment::kPicard: do_picard(m, header, report, log); break;
      case Experiment::kSteer: do_steer(m, header, report, log); break;
      case Experiment::kApriori: do_apriori(m, header, report, log); break;
      case Experiment::kEnsemble: do_ensemble(m, header, report, log); break;
      case Experiment::kTail: do_tail(m, header, report, log); break;
      case Experiment::kTv: do_tv(m, header, report, log); break;
      case Experiment::kCalibrate: do_calibrate(m, header, report, log); break;
      case Experiment::kPlotdata:
        for (const auto& f : emit_plotdata(m.out)) log << "wrote " << f.string() << "\n";
        return 0;
    }
    status = report.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const BlowUpError& e) {
    log << "numerical blow-up: " << e.what() << "\n";
    report.fail("blow_up", e.time());
    status = 3;
  } catch (const std::runtime_error& e) {
    log << experiment_name(m.kind) << " gate failed: " << e.what() << "\n";
    report.fail(experiment_name(m.kind), kNoTime);
    status = 1;
  }
  report.write(m.out / "report.csv", header);
  return status;
}

std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& dir) {
  const std::filesystem::path envelope = dir / "envelope.csv";
  const std::filesystem::path tail = dir / "tail.csv";
  const std::filesystem::path tail_params = dir / "tail_fit.csv";
  const std::filesystem::path tv = dir / "tv.csv";
  const std::filesystem::path tv_params = dir / "tv_fit.csv";
  const bool has_envelope = std::filesystem::exists(envelope);
  const bool has_tail = std::filesystem::exists(tail) && std::filesystem::exists(tail_params);
  const bool has_tv = std::filesystem::exists(tv) && std::filesystem::exists(tv_params);
  if (!has_envelope && !has_tail && !has_tv) {
    throw std::runtime_error("no plot inputs in " + dir.string() +
                             "; expected envelope.csv (apriori run), tail.csv and tail_fit.csv (tail run), "
                             "or tv.csv and tv_fit.csv (tv run)");
  }
  const auto params = [](const std::filesystem::path& file) {
    const io::CsvTable t = io::read_csv(file);
    std::map<std::string, double> kv;
    for (const auto& row : t.rows) kv[row[0]] = std::stod(row[1]);
    return kv;
  };
  const auto need = [](const std::map<std::string, double>& kv, const std::string& key,
                       const std::filesystem::path& file) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(file.string() + " lacks " + key);
    return it->second;
  };

  std::vector<std::filesystem::path> written;
  if (has_envelope) {
    const io::CsvTable t = io::read_csv(envelope);
    const std::size_t cm = t.column("mean"), cp = t.column("p"), ct = t.column("t"), cv = t.column("value"),
                      cb = t.column("bound");
    bool pass = true;
    for (const auto& row : t.rows) pass = pass && std::stod(row[cv]) <= std::stod(row[cb]);
    const std::filesystem::path file = dir / "plot_envelope.csv";
    io::CsvWriter csv(file,
                      "norm of the remainder against time with the a priori envelope\n"
                      "columns: mean (spatial mean of the data), p, t, value = ||w_t||_{L^p} (worst seed), "
                      "bound = envelope for that seed, gate_pass = 1 iff every row has value <= bound",
                      {"mean", "p", "t", "value", "bound", "gate_pass"});
    for (const auto& row : t.rows) csv.row({row[cm], row[cp], row[ct], row[cv], row[cb], pass ? "1" : "0"});
    written.push_back(file);
  }
  if (has_tail) {
    const auto kv = params(tail_params);
    const double lambda = need(kv, "lambda_hat", tail_params);
    const double stretch = need(kv, "stretch_hat", tail_params);
    const io::CsvTable t = io::read_csv(tail);
    const std::size_t cr = t.column("r"), cs = t.column("survival");
    const std::filesystem::path file = dir / "plot_tail.csv";
    io::CsvWriter csv(file,
                      "empirical tail survival of ||u||_{L^p} under the invariant measure with the fitted "
                      "stretched exponential\ncolumns: r, survival = empirical P(||u|| > r), fit = exp(-lambda_hat "
                      "r^stretch_hat) with lambda_hat = " + io::fmt(lambda) + ", stretch_hat = " + io::fmt(stretch),
                      {"r", "survival", "fit"});
    for (const auto& row : t.rows) {
      csv.row({row[cr], row[cs], io::fmt(std::exp(-lambda * std::pow(std::stod(row[cr]), stretch)))});
    }
    written.push_back(file);
  }
  if (has_tv) {
    const auto kv = params(tv_params);
    const double c = need(kv, "c_hat", tv_params);
    const double a = need(kv, "amplitude", tv_params);
    const io::CsvTable t = io::read_csv(tv);
    const std::size_t ct = t.column("t"), cd = t.column("d"), cse = t.column("se"), cf = t.column("floor"),
                      cin = t.column("in_fit");
    const std::filesystem::path file = dir / "plot_tv.csv";
    io::CsvWriter csv(file,
                      "total variation distance between ensembles against time with the fitted exponential\n"
                      "columns: t, d, se = bootstrap standard error, floor = same-law level, fit = amplitude "
                      "exp(-c_hat t) with amplitude = " + io::fmt(a) + ", c_hat = " + io::fmt(c) +
                          ", in_fit = 1 on the fitted segment",
                      {"t", "d", "se", "floor", "fit", "in_fit"});
    for (const auto& row : t.rows) {
      csv.row({row[ct], row[cd], row[cse], row[cf], io::fmt(a * std::exp(-c * std::stod(row[ct]))), row[cin]});
    }
    written.push_back(file);
  }
  return written;
}

}  // namespace chemo
