#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "chemo/manifest.hpp"
#include "chemo/picard.hpp"
#include "chemo/sim_config.hpp"

namespace chemo {

/// Fixed configuration of the local-existence gate: N = 16, dt = 1e-3, T = 1,
/// alpha0 = -0.1, alpha = 0.05, eta = 0.19 (theta = 0.115).
SimConfig picard_gate_config();
/// Fixed configuration of the a priori gate: N = 64, dt = 1e-3, T = 2, chi = 4,
/// alpha0 = -0.1, alpha = 0.25, eta = 0.2.
SimConfig apriori_gate_config();

/// Step-end times at every cfg.record_stride steps of the schedule on
/// [0, cfg.t_end], plus t_end; t = 0 excluded.
std::vector<double> record_times(const SimConfig& cfg);

/// Mild-map solve for one case of the battery: zeta = mean + amplitude cos(2 pi x)
/// and Z the stochastic heat equation with that seed.
PicardResult picard_case(const SimConfig& cfg, std::uint64_t seed, const PicardOptions& opt, double amplitude = 1.0);

/// Initial-data amplitudes of the calibration battery. Data up to ~16 contracts
/// on the whole unit horizon; the larger cases are the ones that pin C.
inline constexpr double kPicardAmplitudes[] = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};

/// Smallest power of two C in [2^-20, 2^20] such that for C and every larger
/// power each seed and amplitude contracts with max ratio <= target on
/// [0, T*(C)]. Throws std::runtime_error if even 2^20 fails.
double calibrate_picard(const SimConfig& cfg, std::span<const std::uint64_t> seeds, double target);

/// ||w_t||_{L^p} after one step of a run, with the running sup of ||Z||_{C^alpha}.
struct AprioriSample {
  std::uint64_t seed = 0;
  double mean = 0.0;
  int p = 2;
  std::size_t step = 0;
  double t = 0.0;
  double value = 0.0;
  double z_norm = 0.0;
};

/// Runs zeta = mean + 2 cos(2 pi (x + phase)), phase drawn from the seed, for
/// every seed and mean and records every step and every p.
std::vector<AprioriSample> apriori_samples(const SimConfig& cfg, std::span<const std::uint64_t> seeds,
                                           std::span<const double> means, std::span<const int> p_values);

double apriori_envelope(const AprioriSample& s, const SimConfig& cfg, double c_cal);

struct EnvelopeCheck {
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max value / bound
  AprioriSample worst;
};
EnvelopeCheck check_envelope(std::span<const AprioriSample> samples, const SimConfig& cfg, double c_cal);

/// Smallest power of two C in [2^-20, 2^20] with no envelope violation.
double calibrate_apriori(std::span<const AprioriSample> samples, const SimConfig& cfg);

/// Runs the experiment named by the manifest. Writes manifest.txt, report.csv
/// and the experiment outputs under m.out, and returns the exit status:
/// 0 pass, 1 gate failure, 2 configuration error, 3 numerical blow-up.
int orchestrate(const RunManifest& m, std::ostream& log);

/// Writes plot_envelope.csv, plot_tail.csv and plot_tv.csv for whichever
/// inputs exist in dir and returns the files written. Throws
/// std::runtime_error listing the expected inputs when none exist.
std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& dir);

}  // namespace chemo
