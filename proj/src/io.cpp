#include "chemo/io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chemo::io {
namespace {

void put_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), 8);
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  if (!in) throw std::runtime_error("unexpected end of binary field data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(i)]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

std::string hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& file, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(file, mode | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& file, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(file, mode);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return in;
}

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_pairs(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("missing key '" + key + "'");
  return it->second;
}

}  // namespace

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string comment_block(const std::string& text) {
  std::ostringstream out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out << "# " << line << '\n';
  return out.str();
}

void write_field_bytes(std::ostream& out, const SpectralField& f) {
  const int n = f.n_modes();
  for (int m = 0; m <= n; ++m) {
    put_f64(out, f.coeff(m).real());
    put_f64(out, f.coeff(m).imag());
  }
  for (int m = -n; m <= -1; ++m) {
    put_f64(out, f.coeff(m).real());
    put_f64(out, f.coeff(m).imag());
  }
}

SpectralField read_field_bytes(std::istream& in, int n_modes) {
  SpectralField f(n_modes);
  auto c = f.half();
  for (int m = 0; m <= n_modes; ++m) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    c[static_cast<std::size_t>(m)] = cplx(re, im);
  }
  // Negative modes are conjugates of stored ones; read and discard.
  for (int m = 0; m < 2 * n_modes; ++m) get_f64(in);
  return f;
}

void write_field(const std::filesystem::path& stem, const SpectralField& f) {
  auto bin = open_out(stem.string() + ".bin", std::ios::binary);
  write_field_bytes(bin, f);
  auto meta = open_out(stem.string() + ".meta");
  meta << "n_modes = " << f.n_modes() << "\n"
       << "grid_size = " << f.grid_size() << "\n"
       << "layout = f64le re,im for m = 0..N, -N..-1\n";
}

SpectralField read_field(const std::filesystem::path& stem) {
  auto meta = open_in(stem.string() + ".meta");
  const int n = std::stoi(need(read_pairs(meta), "n_modes"));
  auto bin = open_in(stem.string() + ".bin", std::ios::binary);
  return read_field_bytes(bin, n);
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const std::string& header) {
  std::filesystem::create_directories(dir);
  if (traj.size() == 0) throw std::invalid_argument("empty trajectory");
  const int n = traj.u.front().n_modes();
  {
    auto bin = open_out(dir / "trajectory.bin", std::ios::binary);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      put_f64(bin, traj.times[i]);
      write_field_bytes(bin, traj.w[i]);
      write_field_bytes(bin, traj.z[i]);
      write_field_bytes(bin, traj.u[i]);
    }
  }
  {
    auto meta = open_out(dir / "trajectory.meta");
    meta << comment_block(header) << "n_modes = " << n << "\n"
         << "grid_size = " << traj.u.front().grid_size() << "\n"
         << "records = " << traj.size() << "\n"
         << "record = t f64le, then w, z, u as f64le re,im for m = 0..N, -N..-1\n";
  }
  {
    CsvWriter csv(dir / "diagnostics.csv", header, {"t", "mean", "l2", "l4", "lp", "holder"});
    for (const Diagnostics& d : traj.diagnostics) {
      csv.row({fmt(d.t), fmt(d.mean), fmt(d.l2), fmt(d.l4), fmt(d.lp), fmt(d.holder)});
    }
  }
  if (traj.final_driver) write_driver_state(dir / "driver_state.txt", *traj.final_driver);
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
  auto meta = open_in(dir / "trajectory.meta");
  const auto kv = read_pairs(meta);
  const int n = std::stoi(need(kv, "n_modes"));
  const auto records = static_cast<std::size_t>(std::stoull(need(kv, "records")));
  auto bin = open_in(dir / "trajectory.bin", std::ios::binary);
  Trajectory traj;
  for (std::size_t i = 0; i < records; ++i) {
    traj.times.push_back(get_f64(bin));
    traj.w.push_back(read_field_bytes(bin, n));
    traj.z.push_back(read_field_bytes(bin, n));
    traj.u.push_back(read_field_bytes(bin, n));
  }
  return traj;
}

void write_driver_state(const std::filesystem::path& file, const NoiseDriver& d) {
  auto out = open_out(file);
  out << "seed = " << d.seed() << "\n"
      << "eps = " << hex(d.eps()) << "\n"
      << "n_modes = " << d.n_modes() << "\n"
      << "substeps = " << d.substeps() << "\n"
      << "fine_step = " << d.fine_step() << "\n"
      << "clock = " << hex(d.clock()) << "\n";
  const auto states = d.states();
  for (std::size_t i = 0; i < states.size(); ++i) {
    out << "mode_" << (i + 1) << " = " << hex(states[i].real()) << " " << hex(states[i].imag()) << "\n";
  }
}

NoiseDriver read_driver_state(const std::filesystem::path& file) {
  auto in = open_in(file);
  const auto kv = read_pairs(in);
  const int n = std::stoi(need(kv, "n_modes"));
  SpectralField state(n);
  for (int m = 1; m <= n; ++m) {
    auto it = kv.find("mode_" + std::to_string(m));
    if (it == kv.end()) continue;
    std::istringstream parts(it->second);
    std::string re;
    std::string im;
    parts >> re >> im;
    state.set_coeff(m, cplx(std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr)));
  }
  return NoiseDriver::resume(std::stoull(need(kv, "seed")), std::strtod(need(kv, "eps").c_str(), nullptr), n,
                             std::stoi(need(kv, "substeps")), std::stoull(need(kv, "fine_step")),
                             std::strtod(need(kv, "clock").c_str(), nullptr), state);
}

CsvWriter::CsvWriter(const std::filesystem::path& file, const std::string& comments,
                     const std::vector<std::string>& columns)
    : out_(open_out(file)), width_(columns.size()) {
  out_ << comment_block(comments);
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::invalid_argument("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::runtime_error("missing csv column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  CsvTable table;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header) {
      table.columns = std::move(cells);
      header = false;
    } else {
      if (cells.size() != table.columns.size()) throw std::runtime_error("ragged row in " + file.string());
      table.rows.push_back(std::move(cells));
    }
  }
  if (header) throw std::runtime_error("no csv header in " + file.string());
  return table;
}

}  // namespace chemo::io
