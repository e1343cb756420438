#pragma once

#include <stdexcept>
#include <string>

namespace wrinkle {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent file content (FGRID, PGM, SVMW, reports).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, scene description or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage could not produce a result (e.g. diverged training).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace wrinkle
