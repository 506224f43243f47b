#include "admdae/error.hpp"

namespace admdae {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::syntax: return "syntax";
    case Errc::unknown_identifier: return "unknown_identifier";
    case Errc::unknown_function: return "unknown_function";
    case Errc::non_integer_exponent: return "non_integer_exponent";
    case Errc::invalid_symbol_table: return "invalid_symbol_table";
    case Errc::domain: return "domain";
    case Errc::division_by_zero: return "division_by_zero";
    case Errc::cap_overflow: return "cap_overflow";
    case Errc::non_constant_head: return "non_constant_head";
    case Errc::zero_head: return "zero_head";
    case Errc::non_positive_head: return "non_positive_head";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::singular_matrix: return "singular_matrix";
    case Errc::rank_deficient: return "rank_deficient";
    case Errc::singular_mass_matrix: return "singular_mass_matrix";
    case Errc::indefinite_on_kernel: return "indefinite_on_kernel";
    case Errc::singular_schur: return "singular_schur";
    case Errc::inconsistent_initial_data: return "inconsistent_initial_data";
    case Errc::projection_failed: return "projection_failed";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::config: return "config";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace admdae
