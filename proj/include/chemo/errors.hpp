#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chemo {

/// Non-finite field values during integration. Reported, never clipped.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, const std::string& what) : std::runtime_error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

/// Picard iteration failed to contract on the requested horizon.
class HorizonTooLong : public std::runtime_error {
 public:
  HorizonTooLong(double horizon, double ratio, const std::string& what)
      : std::runtime_error(what), horizon_(horizon), ratio_(ratio) {}
  double horizon() const { return horizon_; }
  double ratio() const { return ratio_; }

 private:
  double horizon_;
  double ratio_;
};

/// Too few or degenerate samples in the upper tail.
class TailUnderresolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. `line` is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace chemo
