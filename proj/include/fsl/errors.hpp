#pragma once

#include <stdexcept>
#include <string>

namespace fsl {

// Bad user-supplied data: config keys, malformed models, out-of-domain
// parameters.  Maps to process exit code 2.
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation that cannot be completed reliably: non-SPD Gramian,
// quadrature that will not converge, overflow.  Maps to exit code 3.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_input(bool ok, const std::string& msg) {
  if (!ok) throw input_error(msg);
}

inline void require_numeric(bool ok, const std::string& msg) {
  if (!ok) throw numerical_error(msg);
}

}  // namespace fsl
