#pragma once

#include <stdexcept>
#include <string>

namespace nsdarcy {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class ScheduleOverflow : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class Singular : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class PicardDiverged : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class MeshMismatch : public Error {
 public:
  using Error::Error;
};

class KeyMismatch : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error("invalid value for '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Failure inside a multilevel run, tagged with the level and step that failed.
class StepFailure : public Error {
 public:
  StepFailure(int level, std::string step, const std::string& cause)
      : Error("level " + std::to_string(level) + ", step " + step + ": " + cause),
        level_(level),
        step_(std::move(step)) {}
  int level() const noexcept { return level_; }
  const std::string& step() const noexcept { return step_; }

 private:
  int level_;
  std::string step_;
};

}  // namespace nsdarcy
