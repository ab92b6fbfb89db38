#pragma once

#include <stdexcept>
#include <string>

namespace threeway {

// Failure categories shared across the library. The CLI maps these onto
// process exit codes: budget_exceeded -> 2, internal -> 3, everything else
// (bad input of one kind or another) -> 1.
enum class Errc {
  not_prime,
  order_too_large,
  no_irreducible_polynomial,
  division_by_zero,
  invalid_pmf,
  axis_overlap,
  zero_gain,
  alphabet_mismatch,
  length_mismatch,
  empty_input,
  unbounded_region,
  not_sender_symmetrical,
  not_reciprocal,
  alpha_out_of_range,
  out_of_range,
  budget_exceeded,
  incompatible_scheme,
  config_error,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace threeway
