#pragma once

#include <stdexcept>
#include <string>

namespace saa {

// Distinguished error conditions surfaced by library operations.
enum class Errc {
  invalid_argument,
  index_out_of_range,
  outside_hard_set,
  infeasible_relaxation,          // X_gamma empty
  interior_relaxation_infeasible, // X_{-gamma} empty
  no_constraints,                 // m = 0 where a constraint is required
  missing_ingredient,             // oracle lacks a required field (mr constant, gap, ...)
  empty_set,
  unknown_kind,
  budget_exhausted,
  solver_failure,
  config_error,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace saa
