#include "alpharen/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <stdexcept>

namespace alpharen {

std::complex<double> lgamma_c(std::complex<double> s) {
    static const gsl_error_handler_t* previous = gsl_set_error_handler_off();
    (void)previous;
    if (s.imag() == 0 && s.real() <= 0 && s.real() == std::floor(s.real()))
        throw std::domain_error("Gamma function evaluated at a pole");
    gsl_sf_result lnr, arg;
    int status = gsl_sf_lngamma_complex_e(s.real(), s.imag(), &lnr, &arg);
    if (status != GSL_SUCCESS) throw std::domain_error("Gamma function evaluated at a pole");
    return {lnr.val, arg.val};
}

std::complex<double> gamma_c(std::complex<double> s) { return std::exp(lgamma_c(s)); }

} // namespace alpharen
