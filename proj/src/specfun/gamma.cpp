#include "detail.hpp"

#include "abscat/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace abscat::specfun {

namespace detail {

namespace {

// B_{2k} / (2k (2k-1)), k = 1..8
constexpr std::array<real_ld, 8> kStirling = {
    1.0L / 12.0L,       -1.0L / 360.0L,  1.0L / 1260.0L,
    -1.0L / 1680.0L,    1.0L / 1188.0L,  -691.0L / 360360.0L,
    1.0L / 156.0L,      -3617.0L / 122400.0L};

cplx_ld log_gamma_stirling(cplx_ld w)
{
    const real_ld half_log_2pi = 0.91893853320467274178032973640561764L;
    cplx_ld w_inv = 1.0L / w;
    cplx_ld w_inv2 = w_inv * w_inv;
    cplx_ld series = 0.0L;
    cplx_ld power = w_inv;
    for (real_ld c : kStirling) {
        series += c * power;
        power *= w_inv2;
    }
    return (w - 0.5L) * std::log(w) - w + half_log_2pi + series;
}

} // namespace

cplx_ld sin_pi(cplx_ld z)
{
    const real_ld n = std::round(z.real());
    const cplx_ld reduced(z.real() - n, z.imag());
    const real_ld sign = std::fmod(std::abs(n), 2.0L) == 0.0L ? 1.0L : -1.0L;
    return sign * std::sin(std::numbers::pi_v<real_ld> * reduced);
}

cplx_ld exp_i_pi(cplx_ld z)
{
    const real_ld n = std::round(z.real());
    const cplx_ld reduced(z.real() - n, z.imag());
    const real_ld sign = std::fmod(std::abs(n), 2.0L) == 0.0L ? 1.0L : -1.0L;
    return sign * std::exp(cplx_ld(0.0L, std::numbers::pi_v<real_ld>) * reduced);
}

cplx_ld gamma_ld(cplx_ld z)
{
    const real_ld pi = std::numbers::pi_v<real_ld>;
    if (z.real() < 0.5L) {
        if (std::abs(z.imag()) < 1e-14L) {
            real_ld nearest = std::round(z.real());
            if (std::abs(z.real() - nearest) < 1e-14L) {
                throw PoleError("complex_gamma: pole at z = "
                                + std::to_string(static_cast<double>(nearest)));
            }
        }
        return pi / (sin_pi(z) * gamma_ld(1.0L - z));
    }

    // Shift into the region where the Stirling series reaches ~1e-20.
    cplx_ld w = z;
    cplx_ld product = 1.0L;
    while (std::abs(w) < 20.0L) {
        product *= w;
        w += 1.0L;
    }
    return std::exp(log_gamma_stirling(w)) / product;
}

} // namespace detail

cplx complex_gamma(cplx z)
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw RangeError("complex_gamma: non-finite argument");
    }
    auto g = detail::gamma_ld(detail::cplx_ld(z.real(), z.imag()));
    cplx result(static_cast<double>(g.real()), static_cast<double>(g.imag()));
    if (!std::isfinite(result.real()) || !std::isfinite(result.imag())) {
        throw RangeError("complex_gamma: result overflows double");
    }
    return result;
}

} // namespace abscat::specfun
