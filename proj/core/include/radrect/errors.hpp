#pragma once

#include <stdexcept>
#include <string>

namespace radrect {

enum class ErrorCode {
  collinear_frame,
  degenerate_alpha,
  no_real_root,
  all_zero_coordinates,
  wrong_sample_size,
  infeasible_basis,
  rank_deficient_template,
  degenerate_sample,
  insufficient_data,
  no_valid_model,
  retry_exhausted,
  io_error,
  bad_arguments,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::collinear_frame: return "collinear_frame";
    case ErrorCode::degenerate_alpha: return "degenerate_alpha";
    case ErrorCode::no_real_root: return "no_real_root";
    case ErrorCode::all_zero_coordinates: return "all_zero_coordinates";
    case ErrorCode::wrong_sample_size: return "wrong_sample_size";
    case ErrorCode::infeasible_basis: return "infeasible_basis";
    case ErrorCode::rank_deficient_template: return "rank_deficient_template";
    case ErrorCode::degenerate_sample: return "degenerate_sample";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::no_valid_model: return "no_valid_model";
    case ErrorCode::retry_exhausted: return "retry_exhausted";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::bad_arguments: return "bad_arguments";
  }
  return "unknown";
}

}  // namespace radrect
