#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace chemo::stats {

/// Pairwise (cascade) summation; result independent of thread scheduling.
double pairwise_sum(std::span<const double> x);
double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two samples.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);
/// Standard error of the mean of a correlated series from `batches` batch means.
double batch_means_se(std::span<const double> x, int batches = 20);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);
/// Asymptotic critical value c(level) sqrt((n+m)/(n m)), c(level) = sqrt(-ln(level/2)/2).
double ks_critical(double level, std::size_t n, std::size_t m);

/// Linear interpolation quantile of unsorted data, q in [0,1].
double quantile(std::span<const double> x, double q);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LinearFit ols(std::span<const double> x, std::span<const double> y);

/// Freedman-Diaconis width 2 IQR n^{-1/3}; falls back to range / sqrt(n) when IQR is 0.
double fd_bin_width(std::span<const double> x);

/// Common histogram bins: `count` cells of `width` starting at `lo`; count 0 for a degenerate sample.
struct Bins {
  double lo = 0.0;
  double width = 0.0;
  std::size_t count = 0;
};
/// Freedman-Diaconis bins covering the sample.
Bins fd_bins(std::span<const double> x);
/// Half the L1 distance between the histograms of a and b on the given bins.
double tv_on_bins(std::span<const double> a, std::span<const double> b, const Bins& bins);

/// Half the L1 distance between histograms of a and b on common
/// Freedman-Diaconis bins of the pooled sample. In [0,1], symmetric, and 0 for
/// identical samples.
double tv_histogram(std::span<const double> a, std::span<const double> b);

/// Expected tv_histogram for two samples of these sizes drawn from one law,
/// estimated from the pooled bin frequencies.
double tv_noise_floor(std::span<const double> a, std::span<const double> b);

/// Resampling indices in [0, n) for bootstrap replicate `replicate`.
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed, std::uint32_t replicate);

}  // namespace chemo::stats
