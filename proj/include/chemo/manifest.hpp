#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chemo/sim_config.hpp"
#include "chemo/spectral_field.hpp"

namespace chemo {

inline constexpr const char* kToolVersion = "chemosim 1.0.0";

enum class Experiment { kSimulate, kPicard, kSteer, kApriori, kEnsemble, kTail, kTv, kCalibrate, kPlotdata };

const char* experiment_name(Experiment e);
/// Throws ConfigError for an unknown name.
Experiment parse_experiment(const std::string& name);

/// Initial datum mean + amplitude cos(2 pi mode x + phase) for kind "cosine";
/// kind "random" draws band-limited gaussian coefficients with decay 1/m,
/// normalized to L2 size `amplitude` around the mean; kind "constant" is the mean.
struct InitialSpec {
  std::string kind = "constant";
  double amplitude = 0.0;
  int mode = 1;
  double phase = 0.0;
  double target_amplitude = 0.5;  // steering target mean + a cos(2 pi target_mode x)
  int target_mode = 2;
  std::vector<double> battery = {0.0, 100.0};  // L2 sizes of ensemble initial data
};

/// Everything that determines the outputs of one run.
struct RunManifest {
  Experiment kind = Experiment::kSimulate;
  SimConfig cfg;
  InitialSpec initial;
  std::filesystem::path out = "out";
  std::size_t paths = 100;
  std::size_t samples = 160000;  // the proxy needs ~1e5 samples to settle
  std::size_t stride = 100;
  double burn_in = 5.0;
  std::string calibration;
  std::string version = kToolVersion;

  /// Sorted "section.key = value" lines; doubles printed with 17 significant digits.
  std::string echo() const;
};

/// Parses flat "key = value" text with [model], [discretization], [initial]
/// and [run] sections and '#' comments, then validates. Throws ConfigError
/// carrying the offending field and line.
RunManifest parse_config(const std::string& text);
RunManifest load_config(const std::filesystem::path& file);

/// Builds the initial datum described by the manifest (random kinds use cfg.seed).
SpectralField initial_field(const InitialSpec& spec, const SimConfig& cfg);

/// Frozen constants shared by the local-existence horizon and the a priori gate.
struct Calibration {
  double picard_c = 1.0;
  double apriori_c = 1.0;
  double contraction_target = 0.5;
  std::vector<std::uint64_t> seeds;
  std::string version = kToolVersion;
};

Calibration read_calibration(const std::filesystem::path& file);
void write_calibration(const std::filesystem::path& file, const Calibration& cal, const std::string& header);

}  // namespace chemo
