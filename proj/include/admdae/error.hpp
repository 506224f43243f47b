#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace admdae {

/// Failure categories raised by the library. Callers (CLI, bindings) switch on
/// these to pick exit codes and messages.
enum class Errc {
  syntax,
  unknown_identifier,
  unknown_function,
  non_integer_exponent,
  invalid_symbol_table,
  domain,
  division_by_zero,
  cap_overflow,
  non_constant_head,
  zero_head,
  non_positive_head,
  dimension_mismatch,
  singular_matrix,
  rank_deficient,
  singular_mass_matrix,
  indefinite_on_kernel,
  singular_schur,
  inconsistent_initial_data,
  projection_failed,
  invalid_argument,
  config,
  io,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failures carry the 0-based character offset into the source text.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t position, const std::string& what)
      : Error(code, what + " at position " + std::to_string(position)), position_(position), detail_(what) {}
  std::size_t position() const noexcept { return position_; }
  /// Message without the position suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t position_;
  std::string detail_;
};

}  // namespace admdae
