#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pm {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. `location()` is the zero-based row (delimited input)
/// or the one-based line number (JSON-lines input) the problem was found at.
class ParseError : public Error {
 public:
  ParseError(std::size_t location, const std::string& what)
      : Error(what), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A pair pool cannot satisfy a split plan.
class InsufficientPoolError : public Error {
 public:
  InsufficientPoolError(std::string pair_class, std::size_t required, std::size_t available)
      : Error("insufficient " + pair_class + " pairs: need " + std::to_string(required) +
              ", have " + std::to_string(available)),
        pair_class_(std::move(pair_class)),
        required_(required),
        available_(available) {}

  const std::string& pair_class() const noexcept { return pair_class_; }
  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::string pair_class_;
  std::size_t required_;
  std::size_t available_;
};

}  // namespace pm
