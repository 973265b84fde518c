#pragma once

#include <complex>

namespace alpharen {

/// log Gamma on the principal branch of the continuous argument; throws
/// std::domain_error at the poles.
std::complex<double> lgamma_c(std::complex<double> s);
std::complex<double> gamma_c(std::complex<double> s);

} // namespace alpharen
