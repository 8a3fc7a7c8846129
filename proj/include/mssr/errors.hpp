#pragma once

#include <stdexcept>
#include <string>

namespace mssr {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the domain of the operation (nonpositive shape,
// probability outside (0,1), empty input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The scale parameter violates theta <= min(r_1, s_1), or a record sits
// below the declared support.
class SupportError : public Error {
 public:
  using Error::Error;
};

// k exceeds the supported number of components.
class CapacityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Fewer than two upper records could be extracted from a raw sequence.
class InsufficientRecords : public DomainError {
 public:
  using DomainError::DomainError;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double achieved = 0.0)
      : Error(what), achieved_tolerance_(achieved) {}

  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

// A Lindley expansion left the range where its back-transform is defined.
class ApproximationBreakdown : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mssr
