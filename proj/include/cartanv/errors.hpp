#pragma once

#include <stdexcept>
#include <string>

namespace cartanv {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scalar field was evaluated outside its domain (sqrt of a non-positive
/// base, stencil leaving the validity region, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class HomogeneityViolation : public Error {
 public:
  using Error::Error;
};

/// |p_n| is too small relative to |p| for the reduced vertical basis.
class AdaptedBasisDegenerate : public Error {
 public:
  using Error::Error;
};

class HBlockSingular : public Error {
 public:
  using Error::Error;
};

class UnknownMetric : public Error {
 public:
  using Error::Error;
};

class SamplingExhausted : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A jet was asked for a coefficient beyond the order it carries.
class OrderError : public Error {
 public:
  using Error::Error;
};

}  // namespace cartanv
