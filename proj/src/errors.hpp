#pragma once

#include <stdexcept>
#include <string>

namespace musiclab {

enum class errc {
  invalid_argument,
  dimension_mismatch,
  degenerate_market,
  unsupported_transform,
  state_corruption,
  size_guard,
  no_convergence,
  data_missing,
};

// All library failures are reported through this exception; the C API maps
// errc values onto ml_status codes.
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

}  // namespace musiclab
