#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cbfed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid is too coarse for the requested transform or product.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration. Carries every violation found,
/// not just the first one.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  explicit ConfigError(const std::string& issue) : ConfigError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Non-finite state encountered during time integration.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, double norm_h);

  double time() const noexcept { return time_; }
  double norm_h() const noexcept { return norm_h_; }

 private:
  double time_;
  double norm_h_;
};

/// Parameter regime outside the hypotheses of the uniqueness estimates.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Quadrature failed to stabilise under node doubling.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A nonsmooth law violates its declared hypotheses.
class LawError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbfed
