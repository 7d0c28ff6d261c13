#pragma once

#include <stdexcept>
#include <string>

namespace qfrac {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation received a parameter outside its valid range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside its domain (e.g. t < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

/// q-Gamma evaluated at a nonpositive integer.
class PoleError : public Error {
 public:
  using Error::Error;
};

class NotLipschitz : public Error {
 public:
  using Error::Error;
};

class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

/// Malformed function s-expression or configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfrac
