#pragma once

#include <complex>
#include <cmath>
#include <random>

namespace abscat::test {

inline double rel_err(std::complex<double> got, std::complex<double> want)
{
    const double scale = std::abs(want);
    return scale > 0.0 ? std::abs(got - want) / scale : std::abs(got);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

} // namespace abscat::test
