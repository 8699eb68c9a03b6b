#pragma once

#include <stdexcept>
#include <string>

namespace helson {

/// Error categories map onto CLI exit codes (2 usage, 3 resource/precision).
enum class ErrorKind { argument, resource, precision, pole, construction, inconclusive, format };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorKind::resource, what) {}
};

class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what) : Error(ErrorKind::precision, what) {}
};

class PoleError : public Error {
 public:
  PoleError(const std::string& what, double beta, double gamma)
      : Error(ErrorKind::pole, what), beta_(beta), gamma_(gamma) {}
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }

 private:
  double beta_;
  double gamma_;
};

class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& what, long block) : Error(ErrorKind::construction, what), block_(block) {}
  long block() const noexcept { return block_; }

 private:
  long block_;
};

class InconclusiveError : public Error {
 public:
  explicit InconclusiveError(const std::string& what) : Error(ErrorKind::inconclusive, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorKind::format, what) {}
};

}  // namespace helson
