#pragma once

#include <stdexcept>
#include <string>

namespace cofkit {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Image file could not be read or decoded.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& path, const std::string& reason)
      : Error("cannot decode '" + path + "': " + reason) {}
};

/// Image file could not be encoded or written.
class EncodeError : public Error {
 public:
  EncodeError(const std::string& path, const std::string& reason)
      : Error("cannot encode '" + path + "': " + reason) {}
};

/// Decoded image exceeds the caller's pixel budget.
class ImageTooLarge : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must agree in shape do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace cofkit
