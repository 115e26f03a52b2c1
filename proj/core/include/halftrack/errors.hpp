#pragma once

#include <stdexcept>
#include <string>

namespace halftrack {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- dataio ---
class TokenCountMismatch : public Error {
 public:
  using Error::Error;
};
class NonPositivePrice : public Error {
 public:
  using Error::Error;
};
class MalformedNumber : public Error {
 public:
  using Error::Error;
};
class BadSplit : public Error {
 public:
  using Error::Error;
};

// --- core / linear algebra ---
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class ZeroMatrix : public Error {
 public:
  using Error::Error;
};

// --- half thresholding ---
class NegativeParameter : public Error {
 public:
  using Error::Error;
};
class KOutOfRange : public Error {
 public:
  using Error::Error;
};
class InfeasibleConfig : public Error {
 public:
  using Error::Error;
};

// --- qp ---
class InfeasibleBounds : public Error {
 public:
  using Error::Error;
};

// --- pipeline ---
class TooLarge : public Error {
 public:
  using Error::Error;
};

// --- bench/cli ---
class ZeroBaseline : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class IoFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace halftrack
