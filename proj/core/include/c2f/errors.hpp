#pragma once

#include <stdexcept>
#include <string>

namespace c2f {

// Base for everything the library throws on purpose. The CLI maps the
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor extents that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Misuse of an API: non-scalar loss, double backward, empty top-k input.
class ContractError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf showed up where the math must stay finite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class AnnotationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that refers to things that do not exist
// (unknown video ids, out-of-range classes).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Exit-code scheme shared by every command: 0 ok, 2 config, 3 I/O.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace c2f
