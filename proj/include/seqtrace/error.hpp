#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqtrace {

enum class ErrorKind {
  invalid_argument,
  ray_misses_surface,
  vignetted,
  total_internal_reflection,
  model_evaluation_failure,
  undefined_abbe,
  parse_error,
  duplicate_glass,
  unknown_dispersion_model,
  unknown_material,
  no_stop_surface,
  multiple_stops,
  afocal_system,
  aiming_failure,
  no_unvignetted_rays,
  grid_too_coarse,
  unreadable_image,
  empty_merit_function,
  no_variables,
  io_failure,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace seqtrace
