#include "chemo/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "chemo/errors.hpp"
#include "chemo/io.hpp"
#include "chemo/rng.hpp"

namespace chemo {
namespace {

constexpr std::pair<Experiment, const char*> kNames[] = {
    {Experiment::kSimulate, "simulate"}, {Experiment::kPicard, "picard"},   {Experiment::kSteer, "steer"},
    {Experiment::kApriori, "apriori"},   {Experiment::kEnsemble, "ensemble"}, {Experiment::kTail, "tail"},
    {Experiment::kTv, "tv"},             {Experiment::kCalibrate, "calibrate"}, {Experiment::kPlotdata, "plotdata"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& field, int line) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x)) {
    throw ConfigError(field, line, "line " + std::to_string(line) + ": " + field + ": expected a number, got '" + v + "'");
  }
  return x;
}

long long to_int(const std::string& v, const std::string& field, int line) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(field, line, "line " + std::to_string(line) + ": " + field + ": expected an integer, got '" + v + "'");
  }
  return x;
}

std::uint64_t to_u64(const std::string& v, const std::string& field, int line) {
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(field, line, "line " + std::to_string(line) + ": " + field + ": expected an unsigned integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& v, const std::string& field, int line) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(field, line, "line " + std::to_string(line) + ": " + field + ": expected a boolean, got '" + v + "'");
}

template <class T, class Parse>
std::vector<T> to_list(const std::string& v, const std::string& field, int line, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(trim(item), field, line));
  if (out.empty()) throw ConfigError(field, line, "line " + std::to_string(line) + ": " + field + ": empty list");
  return out;
}

std::vector<double> to_list(const std::string& v, const std::string& field, int line) {
  return to_list<double>(v, field, line, to_double);
}

// SimConfig field name -> config key, for attaching line numbers to validation errors.
const std::map<std::string, std::string>& field_keys() {
  static const std::map<std::string, std::string> m = {
      {"alpha0", "model.alpha0"},   {"alpha", "model.alpha"},     {"eta", "model.eta"},
      {"delta", "model.delta"},     {"chi", "model.chi"},         {"mean", "model.mean"},
      {"modes", "discretization.modes"}, {"eps", "discretization.eps"}, {"dt", "discretization.dt"},
      {"t_end", "discretization.t_end"}, {"record_stride", "discretization.record_stride"},
      {"noise_substeps", "discretization.noise_substeps"}, {"ramp_dt0", "discretization.ramp_dt0"},
      {"ramp_factor", "discretization.ramp_factor"}, {"diag_p", "discretization.diag_p"},
  };
  return m;
}

}  // namespace

const char* experiment_name(Experiment e) {
  for (const auto& [k, name] : kNames) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [k, n] : kNames) {
    if (name == n) return k;
  }
  throw ConfigError("run.experiment", 0, "unknown experiment '" + name + "'");
}

std::string RunManifest::echo() const {
  std::map<std::string, std::string> kv;
  const auto d = [](double x) { return io::fmt(x); };
  kv["model.alpha0"] = d(cfg.alpha0);
  kv["model.alpha"] = d(cfg.alpha);
  kv["model.eta"] = d(cfg.eta);
  kv["model.delta"] = d(cfg.delta);
  kv["model.strict"] = cfg.strict ? "true" : "false";
  kv["model.chi"] = d(cfg.chi);
  kv["model.mean"] = d(cfg.mean);
  kv["discretization.modes"] = std::to_string(cfg.n_modes);
  kv["discretization.eps"] = d(cfg.cutoff_eps());
  kv["discretization.dt"] = d(cfg.dt);
  kv["discretization.t_end"] = d(cfg.t_end);
  kv["discretization.record_stride"] = std::to_string(cfg.record_stride);
  kv["discretization.noise"] = cfg.noise ? "true" : "false";
  kv["discretization.noise_substeps"] = std::to_string(cfg.noise_substeps);
  kv["discretization.ramp_dt0"] = d(cfg.ramp_dt0);
  kv["discretization.ramp_factor"] = d(cfg.ramp_factor);
  kv["discretization.diag_p"] = std::to_string(cfg.diag_p);
  kv["initial.kind"] = initial.kind;
  kv["initial.amplitude"] = d(initial.amplitude);
  kv["initial.mode"] = std::to_string(initial.mode);
  kv["initial.phase"] = d(initial.phase);
  kv["initial.target_amplitude"] = d(initial.target_amplitude);
  kv["initial.target_mode"] = std::to_string(initial.target_mode);
  std::string battery;
  for (std::size_t i = 0; i < initial.battery.size(); ++i) battery += (i ? "," : "") + d(initial.battery[i]);
  kv["initial.battery"] = battery;
  kv["run.experiment"] = experiment_name(kind);
  kv["run.seed"] = std::to_string(cfg.seed);
  kv["run.paths"] = std::to_string(paths);
  kv["run.samples"] = std::to_string(samples);
  kv["run.stride"] = std::to_string(stride);
  kv["run.burn_in"] = d(burn_in);
  kv["run.calibration"] = calibration;
  kv["run.version"] = version;
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  return out.str();
}

RunManifest parse_config(const std::string& text) {
  RunManifest m;
  std::map<std::string, int> seen;  // key -> line
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;

  using Setter = std::function<void(const std::string&, const std::string&, int)>;
  const std::map<std::string, Setter> setters = {
      {"model.alpha0", [&](auto& v, auto& f, int l) { m.cfg.alpha0 = to_double(v, f, l); }},
      {"model.alpha", [&](auto& v, auto& f, int l) { m.cfg.alpha = to_double(v, f, l); }},
      {"model.eta", [&](auto& v, auto& f, int l) { m.cfg.eta = to_double(v, f, l); }},
      {"model.delta", [&](auto& v, auto& f, int l) { m.cfg.delta = to_double(v, f, l); }},
      {"model.strict", [&](auto& v, auto& f, int l) { m.cfg.strict = to_bool(v, f, l); }},
      {"model.chi", [&](auto& v, auto& f, int l) { m.cfg.chi = to_double(v, f, l); }},
      {"model.mean", [&](auto& v, auto& f, int l) { m.cfg.mean = to_double(v, f, l); }},
      {"discretization.modes", [&](auto& v, auto& f, int l) { m.cfg.n_modes = static_cast<int>(to_int(v, f, l)); }},
      {"discretization.eps", [&](auto& v, auto& f, int l) { m.cfg.eps = to_double(v, f, l); }},
      {"discretization.dt", [&](auto& v, auto& f, int l) { m.cfg.dt = to_double(v, f, l); }},
      {"discretization.t_end", [&](auto& v, auto& f, int l) { m.cfg.t_end = to_double(v, f, l); }},
      {"discretization.record_stride",
       [&](auto& v, auto& f, int l) { m.cfg.record_stride = static_cast<int>(to_int(v, f, l)); }},
      {"discretization.noise", [&](auto& v, auto& f, int l) { m.cfg.noise = to_bool(v, f, l); }},
      {"discretization.noise_substeps",
       [&](auto& v, auto& f, int l) { m.cfg.noise_substeps = static_cast<int>(to_int(v, f, l)); }},
      {"discretization.ramp_dt0", [&](auto& v, auto& f, int l) { m.cfg.ramp_dt0 = to_double(v, f, l); }},
      {"discretization.ramp_factor", [&](auto& v, auto& f, int l) { m.cfg.ramp_factor = to_double(v, f, l); }},
      {"discretization.diag_p", [&](auto& v, auto& f, int l) { m.cfg.diag_p = static_cast<int>(to_int(v, f, l)); }},
      {"initial.kind", [&](auto& v, auto& f, int l) {
         if (v != "constant" && v != "cosine" && v != "random") {
           throw ConfigError(f, l, "line " + std::to_string(l) + ": " + f + ": expected constant, cosine or random");
         }
         m.initial.kind = v;
       }},
      {"initial.amplitude", [&](auto& v, auto& f, int l) { m.initial.amplitude = to_double(v, f, l); }},
      {"initial.mode", [&](auto& v, auto& f, int l) { m.initial.mode = static_cast<int>(to_int(v, f, l)); }},
      {"initial.phase", [&](auto& v, auto& f, int l) { m.initial.phase = to_double(v, f, l); }},
      {"initial.target_amplitude", [&](auto& v, auto& f, int l) { m.initial.target_amplitude = to_double(v, f, l); }},
      {"initial.target_mode",
       [&](auto& v, auto& f, int l) { m.initial.target_mode = static_cast<int>(to_int(v, f, l)); }},
      {"initial.battery", [&](auto& v, auto& f, int l) { m.initial.battery = to_list(v, f, l); }},
      {"run.experiment", [&](auto& v, auto&, int) { m.kind = parse_experiment(v); }},
      {"run.seed", [&](auto& v, auto& f, int l) { m.cfg.seed = to_u64(v, f, l); }},
      {"run.paths", [&](auto& v, auto& f, int l) { m.paths = to_u64(v, f, l); }},
      {"run.samples", [&](auto& v, auto& f, int l) { m.samples = to_u64(v, f, l); }},
      {"run.stride", [&](auto& v, auto& f, int l) { m.stride = to_u64(v, f, l); }},
      {"run.burn_in", [&](auto& v, auto& f, int l) { m.burn_in = to_double(v, f, l); }},
      {"run.out", [&](auto& v, auto&, int) { m.out = v; }},
      {"run.calibration", [&](auto& v, auto&, int) { m.calibration = v; }},
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("", line, "line " + std::to_string(line) + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "model" && section != "discretization" && section != "initial" && section != "run") {
        throw ConfigError(section, line, "line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", line, "line " + std::to_string(line) + ": expected 'key = value'");
    }
    if (section.empty()) throw ConfigError("", line, "line " + std::to_string(line) + ": key outside any section");
    const std::string key = section + "." + trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, line, "line " + std::to_string(line) + ": unknown key " + key);
    if (seen.count(key)) throw ConfigError(key, line, "line " + std::to_string(line) + ": duplicate key " + key);
    seen[key] = line;
    it->second(value, key, line);
  }

  try {
    m.cfg.validate();
  } catch (const ConfigError& e) {
    auto k = field_keys().find(e.field());
    const std::string key = k != field_keys().end() ? k->second : e.field();
    const int at = seen.count(key) ? seen[key] : 0;
    const std::string where = at > 0 ? "line " + std::to_string(at) + ": " : "";
    throw ConfigError(key, at, where + key + ": " + e.what());
  }
  if (m.paths < 2 && (m.kind == Experiment::kEnsemble || m.kind == Experiment::kTv)) {
    throw ConfigError("run.paths", seen.count("run.paths") ? seen["run.paths"] : 0, "run.paths: paths >= 2 violated");
  }
  return m;
}

RunManifest load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", 0, "cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

SpectralField initial_field(const InitialSpec& spec, const SimConfig& cfg) {
  const int n = cfg.n_modes;
  if (spec.kind == "constant") return SpectralField::constant(n, cfg.mean);
  if (spec.kind == "cosine") {
    if (spec.mode < 1 || spec.mode > n) throw ConfigError("initial.mode", 0, "initial.mode: 1 <= mode <= modes violated");
    return SpectralField::constant(n, cfg.mean) + SpectralField::cosine(n, spec.mode, spec.amplitude, spec.phase);
  }
  SpectralField f(n);
  for (int m = 1; m <= n; ++m) {
    const auto [g1, g2] = rng::gaussian_pair(cfg.seed, rng::Stream::kInitialData, static_cast<std::uint32_t>(m), 0);
    f.set_coeff(m, cplx(g1, g2) / static_cast<double>(m));
  }
  const double size = f.l2_norm();
  if (size > 0.0) f *= spec.amplitude / size;
  f.set_coeff(0, cfg.mean);
  return f;
}

Calibration read_calibration(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("run.calibration", 0, "cannot read calibration file " + file.string());
  Calibration cal;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("", line, "calibration line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key == "picard_C") {
      cal.picard_c = to_double(value, key, line);
    } else if (key == "apriori_C") {
      cal.apriori_c = to_double(value, key, line);
    } else if (key == "contraction_target") {
      cal.contraction_target = to_double(value, key, line);
    } else if (key == "seeds") {
      cal.seeds = to_list<std::uint64_t>(value, key, line, to_u64);
    } else if (key == "version") {
      cal.version = value;
    } else {
      throw ConfigError(key, line, "calibration line " + std::to_string(line) + ": unknown key " + key);
    }
  }
  return cal;
}

void write_calibration(const std::filesystem::path& file, const Calibration& cal, const std::string& header) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << io::comment_block(header);
  out << "version = " << cal.version << '\n'
      << "picard_C = " << io::fmt(cal.picard_c) << '\n'
      << "apriori_C = " << io::fmt(cal.apriori_c) << '\n'
      << "contraction_target = " << io::fmt(cal.contraction_target) << '\n'
      << "seeds = ";
  for (std::size_t i = 0; i < cal.seeds.size(); ++i) out << (i ? "," : "") << cal.seeds[i];
  out << '\n';
}

}  // namespace chemo
