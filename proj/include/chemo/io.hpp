#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "chemo/noise.hpp"
#include "chemo/solver.hpp"
#include "chemo/spectral_field.hpp"

namespace chemo::io {

/// Shortest round-trip decimal form of x (%.17g).
std::string fmt(double x);

/// Coefficients as little-endian f64 pairs (re, im) in the order
/// m = 0, 1, ..., N, -N, ..., -1.
void write_field_bytes(std::ostream& out, const SpectralField& f);
SpectralField read_field_bytes(std::istream& in, int n_modes);

/// <stem>.bin with the coefficients and <stem>.meta with n_modes and grid_size.
void write_field(const std::filesystem::path& stem, const SpectralField& f);
SpectralField read_field(const std::filesystem::path& stem);

/// trajectory.bin (per record: t, then w, z, u), trajectory.meta,
/// diagnostics.csv and, for stochastic runs, driver_state.txt. `header` lines
/// are echoed as comments into every text file.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const std::string& header);
/// Times and fields of a trajectory written by write_trajectory.
Trajectory read_trajectory(const std::filesystem::path& dir);

/// Exact text checkpoint of a noise driver (hex floats).
void write_driver_state(const std::filesystem::path& file, const NoiseDriver& d);
NoiseDriver read_driver_state(const std::filesystem::path& file);

/// Long-format CSV: '#' comment lines, a column header, then rows.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::string& comments, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
};

/// Column names and rows of a file written by CsvWriter; '#' lines are skipped.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  /// Index of a column, or throws std::runtime_error naming it.
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& file);

/// Prefixes every line of text with "# ".
std::string comment_block(const std::string& text);

}  // namespace chemo::io
