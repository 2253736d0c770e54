#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace fqms {

// Thrown when a requested operating point admits no feasible configuration.
struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on malformed inputs (protograph text, config files, bad flags).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One-line diagnostics on stderr; kept free-form to stay out of result streams.
inline void warn(const std::string& msg) {
  std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

}  // namespace fqms
