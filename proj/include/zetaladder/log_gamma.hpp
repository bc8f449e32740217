#pragma once

#include <complex>

namespace zl {

// Continuous branch of ln Gamma(z) for Re z > 0 (the branch that is real
// on the positive axis), plus the first two derivatives of that branch.
std::complex<double> log_gamma(std::complex<double> z);
std::complex<double> digamma(std::complex<double> z);
std::complex<double> trigamma(std::complex<double> z);

}  // namespace zl
