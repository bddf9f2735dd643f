#pragma once

#include <stdexcept>
#include <string>

namespace fairmsm {

// Error categories surfaced through the library API. The CLI maps these
// onto exit codes (config/validation -> 2, I/O -> 3, numerical -> 4).
enum class errc {
  duplicate_transition,
  self_loop,
  unknown_state,
  illegal_transition,
  invalid_trajectory,
  missing_individual,
  collinear,
  diverged,
  unknown_level,
  unknown_covariate,
  empty_sample,
  level_mismatch,
  non_continuous,
  insufficient_groups,
  mode_model_mismatch,
  numerical_overflow,
  non_finite,
  invalid_argument,
  config_error,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace fairmsm
