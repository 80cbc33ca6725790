#pragma once

#include <stdexcept>
#include <string>

namespace cq {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a square root (or other restricted function) meets a
// forbidden eigenvalue. `level` is the number-basis index.
struct SpectralDomainError : std::domain_error {
  int level;
  double value;
  SpectralDomainError(int lvl, double v)
      : std::domain_error("spectral function domain violated at level n=" +
                          std::to_string(lvl) + " (argument " + std::to_string(v) + ")"),
        level(lvl), value(v) {}
};

struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RepMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OutsideDomain : std::domain_error {
  using std::domain_error::domain_error;
};

struct DegenerateContactForm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotInDistribution : std::domain_error {
  using std::domain_error::domain_error;
};

struct InconsistentFrame : std::runtime_error {
  double residual;
  InconsistentFrame(const std::string& what, double r) : std::runtime_error(what), residual(r) {}
};

struct NotSymplectic : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace cq
