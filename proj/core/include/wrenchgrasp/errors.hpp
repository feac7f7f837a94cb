#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wrenchgrasp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class InvalidTransform : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NoCandidate : public Error {
 public:
  using Error::Error;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

class SimulationDiverged : public Error {
 public:
  using Error::Error;
};

/// Schema or value error while reading a scenario or model document.
/// `field_path()` names the offending field, e.g. "contact.normal".
class ParseError : public Error {
 public:
  ParseError(std::string field_path, const std::string& message)
      : Error(field_path + ": " + message), field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

/// Loss became non-finite during training. Carries the per-epoch loss
/// history recorded up to the failure.
class TrainingFailed : public Error {
 public:
  TrainingFailed(const std::string& message, std::vector<double> history)
      : Error(message), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace wrenchgrasp
