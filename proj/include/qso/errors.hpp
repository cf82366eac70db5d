#pragma once

#include <stdexcept>
#include <string>

namespace qso {

enum class errc {
  dimension_mismatch,
  invalid_dimension,
  invalid_simplex_point,
  negative_coefficient,
  row_sum_violation,
  asymmetry,
  unknown_name,
  param_out_of_range,
  not_a_partition,
  trajectory_too_short,
  not_a_fixed_point,
  no_convergence,
  io_error,
  bad_operator_file,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::dimension_mismatch: return "DIMENSION_MISMATCH";
    case errc::invalid_dimension: return "INVALID_DIMENSION";
    case errc::invalid_simplex_point: return "INVALID_SIMPLEX_POINT";
    case errc::negative_coefficient: return "NEGATIVE_COEFFICIENT";
    case errc::row_sum_violation: return "ROW_SUM_VIOLATION";
    case errc::asymmetry: return "ASYMMETRY";
    case errc::unknown_name: return "UNKNOWN_NAME";
    case errc::param_out_of_range: return "PARAM_OUT_OF_RANGE";
    case errc::not_a_partition: return "NOT_A_PARTITION";
    case errc::trajectory_too_short: return "TRAJECTORY_TOO_SHORT";
    case errc::not_a_fixed_point: return "NOT_A_FIXED_POINT";
    case errc::no_convergence: return "NO_CONVERGENCE";
    case errc::io_error: return "IO_ERROR";
    case errc::bad_operator_file: return "BAD_OPERATOR_FILE";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace qso
