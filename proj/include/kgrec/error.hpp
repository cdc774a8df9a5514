#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kgrec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem / stream failures. The CLI maps these to exit code 3.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. Carries the 1-based line (or row) number when known.
class ParseError : public Error {
 public:
  ParseError(std::string msg, std::size_t line = 0)
      : Error(std::move(msg)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Bad configuration or bad caller input. Collects every problem found so the
// user sees the full list at once. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  explicit ValidationError(std::string problem)
      : ValidationError(std::vector<std::string>{std::move(problem)}) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems);
  std::vector<std::string> problems_;
};

// Lookup of an id or key that does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Violated numeric or structural precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Wraps whatever aborted a pipeline stage. The CLI maps these to exit code 2,
// or 3 when the underlying cause was an IoError.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string kg, const std::string& cause,
             bool io_cause);
  const std::string& stage() const { return stage_; }
  const std::string& kg() const { return kg_; }
  bool io_cause() const { return io_cause_; }

 private:
  std::string stage_;
  std::string kg_;
  bool io_cause_;
};

}  // namespace kgrec
