#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dialstruct {

// Base of every error thrown by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

class ZeroNormVector : public Error {
 public:
  explicit ZeroNormVector(std::size_t row)
      : Error("zero-norm embedding row " + std::to_string(row)), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class DialogueTooLong : public Error {
 public:
  DialogueTooLong(std::size_t n, std::size_t n_max)
      : Error("dialogue has " + std::to_string(n) + " utterances, model supports at most " +
              std::to_string(n_max)) {}
};

class DegenerateMean : public Error {
 public:
  explicit DegenerateMean(double mean)
      : Error("fused matrix mean " + std::to_string(mean) + " is at or below epsilon") {}
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus contains no usable dialogues") {}
};

class WindowTooLarge : public Error {
 public:
  WindowTooLarge(std::size_t k, std::size_t n)
      : Error("segmentation window k=" + std::to_string(k) + " must be smaller than n=" +
              std::to_string(n)) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IndexOutOfRange : public Error {
 public:
  IndexOutOfRange(std::size_t index, std::size_t n)
      : Error("index " + std::to_string(index) + " outside [1, " + std::to_string(n) + "]") {}
};

class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace dialstruct
