#pragma once

#include <cmath>

namespace fqms {

// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

// Inverse of the standard normal CDF on (0,1).  Rational initial guess
// refined by two Halley steps against erfc, accurate to ~1e-15 over the
// full range including deep tails.
double probit(double p);

// Inverse error function, erf_inv(erf(x)) = x, defined on (-1,1).
inline double erf_inv(double y) { return -probit(0.5 * (1.0 - y)) * 0.70710678118654752440; }

}  // namespace fqms
