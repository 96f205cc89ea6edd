#include "chemo/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chemo/errors.hpp"
#include "chemo/norms.hpp"
#include "chemo/parallel.hpp"
#include "chemo/rng.hpp"
#include "chemo/solver.hpp"
#include "chemo/stats.hpp"

namespace chemo {
namespace {

// Step schedule to the last requested time and, per step count, the record
// slot it fills (-1 for none).
struct RecordPlan {
  std::vector<double> steps;
  std::vector<int> slot_after;  // size steps + 1; entry k is the slot filled after k steps
};

RecordPlan plan_records(const SimConfig& cfg, const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("no record times given");
  if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("record times must be sorted");
  if (times.back() > cfg.t_end * (1.0 + 1e-12)) throw std::invalid_argument("record time beyond t_end");
  RecordPlan plan;
  plan.steps = step_schedule(cfg, 0.0, cfg.t_end);
  plan.slot_after.assign(plan.steps.size() + 1, -1);
  double t = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k <= plan.steps.size() && next < times.size(); ++k) {
    if (k > 0) t += plan.steps[k - 1];
    if (std::abs(t - times[next]) <= 1e-9 * std::max(1.0, std::abs(t))) {
      plan.slot_after[k] = static_cast<int>(next);
      ++next;
    }
  }
  if (next != times.size()) throw std::invalid_argument("record time is not on the step schedule");
  // Nothing is recorded after the last slot, so the tail of the schedule is dropped.
  std::size_t last = plan.steps.size();
  while (last > 0 && plan.slot_after[last] < 0) --last;
  plan.steps.resize(last);
  plan.slot_after.resize(last + 1);
  return plan;
}

// Runs one path and hands u to `sink(slot, u)` at every record time.
template <class Sink>
void run_path(const SimConfig& cfg, const SpectralField& zeta, const RecordPlan& plan, Sink&& sink) {
  Integrator it(zeta, cfg, default_driver(cfg));
  if (plan.slot_after[0] >= 0) sink(static_cast<std::size_t>(plan.slot_after[0]), it.u());
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    it.step(plan.steps[k]);
    const int slot = plan.slot_after[k + 1];
    if (slot >= 0) sink(static_cast<std::size_t>(slot), it.u());
  }
}

std::uint64_t path_seed(std::uint64_t master, std::size_t i) { return rng::child_seed(master, i); }

stats::LinearFit tail_regression(std::span<const double> sorted, std::vector<double>* r_out,
                                 std::vector<double>* s_out) {
  const auto n = static_cast<double>(sorted.size());
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double s = (n - static_cast<double>(i) - 0.5) / n;
    if (s > 0.1 || s < 0.01) continue;
    if (!(sorted[i] > 0.0)) continue;
    x.push_back(std::log(sorted[i]));
    y.push_back(std::log(-std::log(s)));
    if (r_out != nullptr) {
      r_out->push_back(sorted[i]);
      s_out->push_back(s);
    }
  }
  if (x.size() < 5 || x.front() == x.back()) throw TailUnderresolved("tail underresolved: degenerate upper tail");
  return stats::ols(x, y);
}

}  // namespace

EnsembleSummary ensemble_run(const SimConfig& cfg, std::size_t n_paths, const std::vector<SpectralField>& initial,
                             const EnsembleOptions& opt) {
  if (n_paths < 2) throw std::invalid_argument("ensemble_run: need at least two paths");
  if (initial.empty()) throw std::invalid_argument("ensemble_run: no initial conditions");
  cfg.validate();
  const RecordPlan plan = plan_records(cfg, opt.times);
  const std::size_t n_ic = initial.size();
  const std::size_t n_p = opt.p_values.size();
  const std::size_t n_t = opt.times.size();

  // values[task][p][t], task = ic * n_paths + path
  std::vector<std::vector<std::vector<double>>> values(n_ic * n_paths);
  parallel_for(n_ic * n_paths, [&](std::size_t task) {
    const std::size_t ic = task / n_paths;
    const std::size_t path = task % n_paths;
    SimConfig c = cfg;
    c.seed = opt.same_seed ? cfg.seed : path_seed(cfg.seed, path);
    auto& out = values[task];
    out.assign(n_p, std::vector<double>(n_t, 0.0));
    run_path(c, initial[ic], plan, [&](std::size_t slot, const SpectralField& u) {
      for (std::size_t q = 0; q < n_p; ++q) out[q][slot] = lp_power(u, opt.p_values[q]);
    });
  });

  EnsembleSummary s;
  s.n_paths = n_paths;
  s.master_seed = cfg.seed;
  s.p_values = opt.p_values;
  s.times = opt.times;
  s.moment.assign(n_ic, std::vector<std::vector<double>>(n_p, std::vector<double>(n_t)));
  s.moment_se = s.moment;
  std::vector<double> sample(n_paths);
  for (std::size_t ic = 0; ic < n_ic; ++ic) {
    for (std::size_t q = 0; q < n_p; ++q) {
      for (std::size_t k = 0; k < n_t; ++k) {
        const double weight = std::min(std::pow(opt.times[k], 0.5 * opt.p_values[q]), 1.0);
        for (std::size_t i = 0; i < n_paths; ++i) sample[i] = weight * values[ic * n_paths + i][q][k];
        s.moment[ic][q][k] = stats::mean(sample);
        s.moment_se[ic][q][k] = stats::standard_error(sample);
      }
    }
  }
  return s;
}

std::vector<SpectralField> sample_invariant(const SimConfig& cfg, const SpectralField& zeta, double burn_in,
                                            std::size_t stride, std::size_t n_samples) {
  if (!(burn_in >= 1.0)) throw std::invalid_argument("sample_invariant: burn_in must be >= 1");
  if (stride == 0) throw std::invalid_argument("sample_invariant: stride must be >= 1");
  cfg.validate();
  Integrator it(zeta, cfg, default_driver(cfg));
  it.advance(step_schedule(cfg, 0.0, burn_in));
  std::vector<SpectralField> out;
  out.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t k = 0; k < stride; ++k) it.step(cfg.dt);
    out.push_back(it.u());
  }
  return out;
}

double integrability_proxy(std::span<const double> norms, double lambda, double delta) {
  std::vector<double> terms(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    terms[i] = std::exp(0.5 * lambda * std::pow(norms[i], 1.0 - 2.0 * delta));
  }
  return stats::mean(terms);
}

TailFit tail_fit(std::span<const double> norms, double delta, int bootstrap, std::uint64_t seed) {
  if (norms.size() < 1000) throw TailUnderresolved("tail underresolved: fewer than 1000 samples");
  std::vector<double> sorted(norms.begin(), norms.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw TailUnderresolved("tail underresolved: all samples equal");

  TailFit fit;
  const stats::LinearFit line = tail_regression(sorted, &fit.r, &fit.survival);
  fit.stretch_hat = line.slope;
  fit.lambda_hat = std::exp(line.intercept);
  fit.r2 = line.r2;
  fit.n_fit = fit.r.size();
  fit.proxy = integrability_proxy(norms, fit.lambda_hat, delta);

  std::vector<double> slopes;
  std::vector<double> resample(sorted.size());
  for (int b = 0; b < bootstrap; ++b) {
    const auto idx = stats::bootstrap_indices(sorted.size(), seed, static_cast<std::uint32_t>(b));
    for (std::size_t i = 0; i < idx.size(); ++i) resample[i] = sorted[idx[i]];
    std::sort(resample.begin(), resample.end());
    try {
      slopes.push_back(tail_regression(resample, nullptr, nullptr).slope);
    } catch (const TailUnderresolved&) {
      // a degenerate replicate carries no slope information
    }
  }
  if (slopes.size() >= 2) {
    fit.stretch_lo = stats::quantile(slopes, 0.025);
    fit.stretch_hi = stats::quantile(slopes, 0.975);
  } else {
    fit.stretch_lo = fit.stretch_hi = fit.stretch_hat;
  }
  return fit;
}

TailFit tail_fit(const std::vector<SpectralField>& samples, double p, double delta, int bootstrap,
                 std::uint64_t seed) {
  std::vector<double> norms(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) norms[i] = lp_norm(samples[i], p);
  return tail_fit(norms, delta, bootstrap, seed);
}

std::vector<double> observables(const SpectralField& u) {
  const cplx c1 = u.coeff(1);
  const cplx c2 = u.coeff(2);
  return {c1.real(), c1.imag(), c2.real(), c2.imag(), u.l2_norm()};
}

namespace {

constexpr std::size_t kObservables = 5;

// obs[path][time][observable]
using ObservableTable = std::vector<std::vector<std::vector<double>>>;

ObservableTable simulate_observables(const SimConfig& cfg, const SpectralField& zeta, std::uint64_t master,
                                     std::size_t n_paths, const RecordPlan& plan, std::size_t n_t) {
  ObservableTable table(n_paths);
  parallel_for(n_paths, [&](std::size_t path) {
    SimConfig c = cfg;
    c.seed = path_seed(master, path);
    table[path].assign(n_t, {});
    run_path(c, zeta, plan, [&](std::size_t slot, const SpectralField& u) { table[path][slot] = observables(u); });
  });
  return table;
}

std::vector<double> column(const ObservableTable& table, std::size_t t, std::size_t o) {
  std::vector<double> out(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) out[i] = table[i][t][o];
  return out;
}

std::vector<double> column(const ObservableTable& table, std::size_t t, std::size_t o,
                           const std::vector<std::size_t>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = table[idx[i]][t][o];
  return out;
}

struct Curves {
  std::vector<double> d;
  std::vector<double> floor;
  std::vector<std::vector<stats::Bins>> bins;  // [time][observable]
};

Curves curve_from(const ObservableTable& a, const ObservableTable& b, std::size_t n_t) {
  Curves c;
  c.d.assign(n_t, 0.0);
  c.floor.assign(n_t, 0.0);
  c.bins.assign(n_t, std::vector<stats::Bins>(kObservables));
  for (std::size_t t = 0; t < n_t; ++t) {
    for (std::size_t o = 0; o < kObservables; ++o) {
      const std::vector<double> xa = column(a, t, o);
      const std::vector<double> xb = column(b, t, o);
      std::vector<double> all = xa;
      all.insert(all.end(), xb.begin(), xb.end());
      c.bins[t][o] = stats::fd_bins(all);
      c.d[t] = std::max(c.d[t], stats::tv_on_bins(xa, xb, c.bins[t][o]));
      c.floor[t] = std::max(c.floor[t], stats::tv_noise_floor(xa, xb));
    }
  }
  return c;
}

void check_means(const SpectralField& zeta1, const SpectralField& zeta2) {
  if (std::abs(zeta1.mean() - zeta2.mean()) > 1e-12 * (1.0 + std::abs(zeta1.mean()))) {
    throw std::invalid_argument("initial conditions have different means; their invariant measures differ");
  }
}

}  // namespace

std::vector<double> tv_curve(const SimConfig& cfg, const SpectralField& zeta1, const SpectralField& zeta2,
                             const TvOptions& opt) {
  check_means(zeta1, zeta2);
  cfg.validate();
  const RecordPlan plan = plan_records(cfg, opt.times);
  const std::size_t n_t = opt.times.size();
  const ObservableTable a = simulate_observables(cfg, zeta1, opt.seed1, opt.n_paths, plan, n_t);
  const ObservableTable b = simulate_observables(cfg, zeta2, opt.seed2, opt.n_paths, plan, n_t);
  return curve_from(a, b, n_t).d;
}

TvResult tv_mixing(const SimConfig& cfg, const SpectralField& zeta1, const SpectralField& zeta2,
                   const TvOptions& opt) {
  check_means(zeta1, zeta2);
  if (opt.n_paths < 2) throw std::invalid_argument("tv_mixing: need at least two paths");
  cfg.validate();
  const RecordPlan plan = plan_records(cfg, opt.times);
  const std::size_t n_t = opt.times.size();
  const ObservableTable a = simulate_observables(cfg, zeta1, opt.seed1, opt.n_paths, plan, n_t);
  const ObservableTable b = simulate_observables(cfg, zeta2, opt.seed2, opt.n_paths, plan, n_t);
  const Curves base = curve_from(a, b, n_t);

  TvResult res;
  res.times = opt.times;
  res.d = base.d;
  res.floor = base.floor;

  // Decaying segment: below saturation, above the floor, contiguous.
  std::size_t begin = n_t;
  for (std::size_t t = 0; t < n_t; ++t) {
    if (res.d[t] < opt.saturation && res.d[t] > opt.floor_factor * res.floor[t]) {
      begin = t;
      break;
    }
  }
  std::size_t end = begin;
  while (end < n_t && res.d[end] < opt.saturation && res.d[end] > opt.floor_factor * res.floor[end]) ++end;
  res.fit_begin = begin;
  res.fit_end = end;

  const auto fit_rate = [&](const std::vector<double>& d) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t t = begin; t < end; ++t) {
      if (d[t] <= 0.0) continue;
      x.push_back(opt.times[t]);
      y.push_back(std::log(d[t]));
    }
    return -stats::ols(x, y).slope;
  };

  // Bootstrap over paths with bins frozen from the full sample.
  const std::uint64_t boot_seed = rng::child_seed(opt.seed1 ^ rng::splitmix64(opt.seed2), 0xB007);
  std::vector<std::vector<double>> reps;
  for (int r = 0; r < opt.bootstrap; ++r) {
    const auto ia = stats::bootstrap_indices(opt.n_paths, boot_seed, static_cast<std::uint32_t>(2 * r));
    const auto ib = stats::bootstrap_indices(opt.n_paths, boot_seed, static_cast<std::uint32_t>(2 * r + 1));
    std::vector<double> d(n_t, 0.0);
    for (std::size_t t = 0; t < n_t; ++t) {
      for (std::size_t o = 0; o < kObservables; ++o) {
        d[t] = std::max(d[t], stats::tv_on_bins(column(a, t, o, ia), column(b, t, o, ib), base.bins[t][o]));
      }
    }
    reps.push_back(std::move(d));
  }
  res.se.assign(n_t, 0.0);
  std::vector<double> vals(reps.size());
  for (std::size_t t = 0; t < n_t; ++t) {
    for (std::size_t r = 0; r < reps.size(); ++r) vals[r] = reps[r][t];
    res.se[t] = reps.size() >= 2 ? std::sqrt(stats::variance(vals)) : 0.0;
  }

  if (end - begin < 3) throw std::runtime_error("tv_mixing: fewer than three points on the decaying segment");
  res.c_hat = fit_rate(res.d);
  res.amplitude = 0.0;
  for (std::size_t t = begin; t < end; ++t) {
    res.amplitude = std::max(res.amplitude, res.d[t] * std::exp(res.c_hat * opt.times[t]));
  }
  std::vector<double> rates;
  for (const auto& d : reps) {
    try {
      rates.push_back(fit_rate(d));
    } catch (const std::invalid_argument&) {
      // too few positive points in this replicate
    }
  }
  if (rates.size() >= 2) {
    res.c_lo = stats::quantile(rates, 0.025);
    res.c_hi = stats::quantile(rates, 0.975);
  } else {
    res.c_lo = res.c_hi = res.c_hat;
  }
  return res;
}

}  // namespace chemo
