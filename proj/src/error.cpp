#include "repo_vitality/error.hpp"

namespace rv {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::repo_not_found: return "repo-not-found";
    case ErrorKind::auth_failure: return "auth-failure";
    case ErrorKind::rate_limit_exceeded: return "rate-limit-exceeded";
    case ErrorKind::transport_failure: return "transport-failure";
    case ErrorKind::io_failure: return "io-failure";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::invariant_violation: return "invariant-violation";
    case ErrorKind::label_conflict: return "conflict-error";
    case ErrorKind::invalid_scenario: return "invalid-scenario";
    case ErrorKind::unknown_feature: return "unknown-feature";
    case ErrorKind::no_commits: return "no-commits";
    case ErrorKind::too_few_rows: return "too-few-rows";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::single_class_input: return "single-class-input";
    case ErrorKind::invalid_params: return "invalid-params";
    case ErrorKind::missing_feature: return "missing-feature";
    case ErrorKind::no_oob: return "no-oob";
    case ErrorKind::class_too_small: return "class-too-small";
    case ErrorKind::inconsistent_inputs: return "inconsistent-inputs";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::missing_prediction: return "missing-prediction";
    case ErrorKind::undefined_result: return "undefined-error";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::degenerate_input: return "degenerate-input";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace rv
