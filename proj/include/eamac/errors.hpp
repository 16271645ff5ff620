#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace eamac {

// Short scientific rendering for error messages.
inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// A numeric argument outside the domain of the operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Covariance matrix violating the uncertainty relation (some nu < 1 - 1e-9).
struct PhysicalityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (X, Y) pair that is not a completely positive Gaussian channel.
struct ChannelValidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fock cutoff too small for the requested tail budget.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int required_cutoff)
      : std::runtime_error(what), required_cutoff_(required_cutoff) {}
  int required_cutoff() const noexcept { return required_cutoff_; }

 private:
  int required_cutoff_;
};

// Relative entropy with supp(rho) not contained in supp(sigma).
struct SupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::string constraint)
      : std::runtime_error(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eamac
