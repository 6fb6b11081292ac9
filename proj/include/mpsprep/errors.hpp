#pragma once

#include <stdexcept>
#include <string>

namespace mpsprep {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad sizes, out-of-range index,
// invalid option values).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An iterative kernel failed to converge or produced a degenerate result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input document does not follow the expected schema. `path` is a JSON
// pointer-style location of the offending field.
class SchemaError : public IoError {
 public:
  SchemaError(std::string path, const std::string& what)
      : IoError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Raised by a pipeline stage; `stage` names the step that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, bool numerical)
      : Error(stage + ": " + what), stage_(std::move(stage)), numerical_(numerical) {}
  const std::string& stage() const noexcept { return stage_; }
  bool numerical() const noexcept { return numerical_; }

 private:
  std::string stage_;
  bool numerical_;
};

}  // namespace mpsprep
