#pragma once
// Internal helpers shared by the special-function translation units.

#include "abscat/specfun.hpp"

#include <complex>
#include <optional>

namespace abscat::specfun::detail {

using real_ld = long double;
using cplx_ld = std::complex<long double>;

//! sin(pi z) and exp(i pi z) with the real part of z reduced by its nearest
//! integer first, so both keep full relative accuracy next to integers.
cplx_ld sin_pi(cplx_ld z);
cplx_ld exp_i_pi(cplx_ld z);

//! Gamma(z) in extended precision (shifted Stirling series plus reflection).
cplx_ld gamma_ld(cplx_ld z);

struct PairLd {
    cplx_ld value;
    cplx_ld derivative;
};

//! Ascending series for J_nu(x) with complex nu; empty when the cancellation
//! estimate says fewer than ~14 digits survive.
std::optional<PairLd> j_series(cplx_ld nu, real_ld x);

//! Ascending series for Y_n(x), integer n >= 0.
std::optional<PairLd> y_integer_series(int n, real_ld x);

//! Hankel asymptotic expansion; empty when it does not converge to full
//! precision at this x.
std::optional<PairLd> hankel_asymptotic(HankelKind kind, cplx_ld nu, real_ld x);

} // namespace abscat::specfun::detail
