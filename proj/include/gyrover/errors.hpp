#pragma once

#include <stdexcept>
#include <string>

namespace gyrover {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lean angle at (or numerically indistinguishable from) 0 or pi, where the
/// inertia sub-matrix coupling steering and rolling becomes singular.
class DegenerateLeanError : public Error {
 public:
  using Error::Error;
};

/// |alpha_dot| below the balance controller's floor: h3 -> 0 and u6 would be
/// unbounded.
class SingularSteeringError : public Error {
 public:
  using Error::Error;
};

/// Line-tracking target coincides with the line origin.
class DegenerateLineError : public Error {
 public:
  using Error::Error;
};

/// Initial state violates the controller's admissibility predicate.
class InadmissibleStateError : public Error {
 public:
  explicit InadmissibleStateError(std::string predicate)
      : Error("inadmissible initial state: " + predicate),
        predicate_(std::move(predicate)) {}

  const std::string& predicate() const noexcept { return predicate_; }

 private:
  std::string predicate_;
};

class NonFiniteStateError : public Error {
 public:
  using Error::Error;
};

class EmptyTrajectoryError : public Error {
 public:
  using Error::Error;
};

class UnknownChannelError : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario file (syntax).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed scenario file whose contents violate the schema or a gain
/// constraint. The message names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& why)
      : Error(field + ": " + why), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace gyrover
