#include "chemo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chemo/rng.hpp"

namespace chemo::stats {
namespace {

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  return all;
}

std::vector<double> histogram(std::span<const double> x, const Bins& bins) {
  std::vector<double> h(bins.count, 0.0);
  for (double v : x) {
    const double pos = std::max(0.0, (v - bins.lo) / bins.width);
    const auto i = static_cast<std::size_t>(std::min(pos, static_cast<double>(bins.count - 1)));
    h[i] += 1.0;
  }
  for (double& c : h) c /= static_cast<double>(x.size());
  return h;
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  return pairwise_sum(x) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  // Shifted by x[0] so that a constant sample has exactly zero variance.
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - x[0];
  const double m = mean(d);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (d[i] - m) * (d[i] - m);
  return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double batch_means_se(std::span<const double> x, int batches) {
  if (batches < 2) throw std::invalid_argument("batch_means_se: need at least two batches");
  const std::size_t len = x.size() / static_cast<std::size_t>(batches);
  if (len == 0) throw std::invalid_argument("batch_means_se: fewer samples than batches");
  std::vector<double> means(static_cast<std::size_t>(batches));
  for (std::size_t b = 0; b < means.size(); ++b) means[b] = mean(x.subspan(b * len, len));
  return standard_error(means);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(sa.size());
    const double fb = static_cast<double>(j) / static_cast<double>(sb.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double ks_critical(double level, std::size_t n, std::size_t m) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ks_critical: level must be in (0,1)");
  const double c = std::sqrt(-0.5 * std::log(0.5 * level));
  const auto dn = static_cast<double>(n);
  const auto dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

double quantile(std::span<const double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols: need two or more paired points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols: x has zero spread");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

double fd_bin_width(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("fd_bin_width: need two or more samples");
  const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
  const auto n = static_cast<double>(x.size());
  if (iqr > 0.0) return 2.0 * iqr * std::cbrt(1.0 / n);
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  return (*mx - *mn) / std::sqrt(n);
}

Bins fd_bins(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("fd_bins: empty sample");
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  Bins bins;
  bins.lo = *mn;
  const double range = *mx - *mn;
  if (range <= 0.0) return bins;
  const double w = fd_bin_width(x);
  bins.count = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(range / w)), 1, 100000);
  bins.width = range / static_cast<double>(bins.count);
  return bins;
}

double tv_on_bins(std::span<const double> a, std::span<const double> b, const Bins& bins) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tv_on_bins: empty sample");
  if (bins.count == 0) return 0.0;
  const std::vector<double> ha = histogram(a, bins);
  const std::vector<double> hb = histogram(b, bins);
  std::vector<double> diff(bins.count);
  for (std::size_t i = 0; i < bins.count; ++i) diff[i] = std::abs(ha[i] - hb[i]);
  return std::min(1.0, 0.5 * pairwise_sum(diff));
}

double tv_histogram(std::span<const double> a, std::span<const double> b) {
  return tv_on_bins(a, b, fd_bins(pooled(a, b)));
}

double tv_noise_floor(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tv_noise_floor: empty sample");
  const std::vector<double> all = pooled(a, b);
  const Bins bins = fd_bins(all);
  if (bins.count == 0) return 0.0;
  const std::vector<double> p = histogram(all, bins);
  const double inv = 1.0 / static_cast<double>(a.size()) + 1.0 / static_cast<double>(b.size());
  // E|X| = sqrt(2/pi) sd for a centered normal X.
  const double k = std::sqrt(2.0 / std::numbers::pi);
  std::vector<double> terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) terms[i] = k * std::sqrt(p[i] * (1.0 - p[i]) * inv);
  return 0.5 * pairwise_sum(terms);
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed, std::uint32_t replicate) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const auto [u1, u2] = rng::uniform_pair(seed, rng::Stream::kBootstrap, replicate, i);
    idx[i] = std::min(n - 1, static_cast<std::size_t>(u1 * static_cast<double>(n)));
    if (i + 1 < n) idx[i + 1] = std::min(n - 1, static_cast<std::size_t>(u2 * static_cast<double>(n)));
  }
  return idx;
}

}  // namespace chemo::stats
