#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rv {

/// Domain error taxonomy shared by every module. The CLI maps any Error to exit code 1.
enum class ErrorKind {
  repo_not_found,
  auth_failure,
  rate_limit_exceeded,
  transport_failure,
  io_failure,
  parse_error,
  invariant_violation,
  label_conflict,
  invalid_scenario,
  unknown_feature,
  no_commits,
  too_few_rows,
  empty_input,
  single_class_input,
  invalid_params,
  missing_feature,
  no_oob,
  class_too_small,
  inconsistent_inputs,
  out_of_range,
  missing_prediction,
  undefined_result,
  length_mismatch,
  degenerate_input,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rv
