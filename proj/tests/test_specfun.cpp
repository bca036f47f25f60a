#include "abscat/errors.hpp"
#include "abscat/oracle.hpp"
#include "abscat/specfun.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

namespace {

using namespace abscat;
using specfun::HankelKind;
using specfun::Order;
using test::rel_err;

#include "data/reference_values.inc"

constexpr double kPi = std::numbers::pi;

Order order_of(const BesselReference& r)
{
    return r.imaginary ? Order::imaginary(r.mu) : Order::real(r.mu);
}

} // namespace

TEST_CASE("gamma matches the high-precision table")
{
    for (const auto& r : kGammaReference) {
        CAPTURE(r.re);
        CAPTURE(r.im);
        CHECK(rel_err(specfun::complex_gamma({r.re, r.im}), r.value) < 1e-12);
    }
}

TEST_CASE("gamma closed forms")
{
    CHECK(std::abs(specfun::complex_gamma(1.0) - 1.0) < 1e-15);
    CHECK(std::abs(specfun::complex_gamma(0.5) - std::sqrt(kPi)) < 1e-14);
    // Gamma(1 + i) frozen from a 30-digit evaluation
    CHECK(rel_err(specfun::complex_gamma({1.0, 1.0}),
                  {0.49801566811835604271, -0.15494982830181068512}) < 1e-13);
    CHECK_THROWS_AS(specfun::complex_gamma(0.0), PoleError);
    CHECK_THROWS_AS(specfun::complex_gamma(-3.0), PoleError);
    CHECK_THROWS_AS(specfun::complex_gamma(std::nan("")), RangeError);
}

TEST_CASE("Bessel and Hankel values match the high-precision table")
{
    for (const auto& r : kBesselReference) {
        const Order o = order_of(r);
        CAPTURE(r.imaginary);
        CAPTURE(r.mu);
        CAPTURE(r.x);
        CHECK(rel_err(specfun::bessel_j(o, r.x), r.j) < 1e-10);
        CHECK(rel_err(specfun::bessel_j_reflected(o, r.x), r.j_neg) < 1e-10);
        CHECK(rel_err(specfun::hankel(HankelKind::First, o, r.x), r.h1) < 1e-10);
        CHECK(rel_err(specfun::hankel(HankelKind::Second, o, r.x), r.h2) < 1e-10);
    }
}

TEST_CASE("closed-form orders")
{
    CHECK(std::abs(specfun::bessel_j(Order::real(0.0), 1e-12) - 1.0) < 1e-15);
    const double x = 1.0;
    const double amp = std::sqrt(2.0 / (kPi * x));
    CHECK(rel_err(specfun::bessel_j(Order::real(0.5), x), amp * std::sin(x)) < 1e-13);
    CHECK(rel_err(specfun::hankel(HankelKind::First, Order::real(0.5), x),
                  cplx(0.0, -amp) * std::exp(cplx(0.0, x)))
          < 1e-13);
    // J_{0.4}(2) from a 30-digit power series
    CHECK(rel_err(specfun::bessel_j(Order::real(0.4), 2.0), 0.47419228133429320962) < 1e-13);
    const auto sum = specfun::hankel(HankelKind::First, Order::real(0.4), 2.0)
                     + specfun::hankel(HankelKind::Second, Order::real(0.4), 2.0);
    CHECK(std::abs(sum - 2.0 * specfun::bessel_j(Order::real(0.4), 2.0)) < 1e-9);
}

TEST_CASE("imaginary-order H1 agrees with an integrated outgoing wave")
{
    // start from H1_{0.4i}(2) and integrate outwards: the far field must be
    // the outgoing wave e^{-i pi nu / 2} sqrt(2/(pi x)) e^{i(x - pi/4)} alone
    const ScatteringConfig cfg{0.0, 0.0, 1.0, 0.5};
    const PartialMode mode{0, -0.16, 0.4, Regime::Supercritical};
    const auto start = oracle::hankel_data(cfg, mode, 1.0, 0.0, 2.0);
    oracle::OracleOptions options;
    const auto profile = oracle::integrate_radial(cfg, mode, start, options.large_hi, options);
    const auto large = oracle::match_large_rho(profile, cfg, mode, options);
    CHECK(std::abs(large.outgoing - std::exp(kPi * 0.4 / 2.0)) < 1e-9);
    CHECK(std::abs(large.ingoing) < 1e-9);
}

TEST_CASE("wronskian_check examples")
{
    CHECK(specfun::wronskian_check(Order::real(0.3), 5.0) <= 1e-8);
    CHECK(specfun::wronskian_check(Order::imaginary(0.7), 1.0) <= 1e-8);
    CHECK(specfun::wronskian_check(Order::real(2.0), 10.0) <= 1e-8);
}

TEST_CASE("conjugation relations")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mu(0.05, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double x = test::log_uniform(rng, 0.01, 1e3);
        const Order re = Order::real(mu(rng));
        CHECK(rel_err(specfun::hankel(HankelKind::Second, re, x),
                      std::conj(specfun::hankel(HankelKind::First, re, x)))
              < 1e-10);
        const Order im = Order::imaginary(mu(rng));
        CHECK(rel_err(specfun::bessel_j_reflected(im, x), std::conj(specfun::bessel_j(im, x))) < 1e-10);
    }
}

TEST_CASE("Wronskian over the supported box")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> mu(0.0, specfun::kMaxOrder);
    int evaluated = 0;
    for (int i = 0; i < 100; ++i) {
        const bool imaginary = i % 2 == 1;
        const Order o = imaginary ? Order::imaginary(std::max(0.01, mu(rng))) : Order::real(mu(rng));
        const double x = test::log_uniform(rng, 1e-2, specfun::kMaxArgument);
        CAPTURE(o.mu());
        CAPTURE(x);
        try {
            CHECK(specfun::wronskian_check(o, x) <= 1e-8);
            ++evaluated;
        }
        catch (const RangeError&) {
            // H overflowing double for mu much larger than x is a loud failure
            CHECK(o.mu() > x);
        }
    }
    CHECK(evaluated >= 80);
}

TEST_CASE("Bessel ODE residual with five-point differences")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> mu(0.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const Order o = i % 2 ? Order::imaginary(std::max(0.01, mu(rng))) : Order::real(mu(rng));
        const double x = test::log_uniform(rng, 0.05, 100.0);
        const double h = 1e-4 * x;
        for (HankelKind kind : {HankelKind::First, HankelKind::Second}) {
            auto d = [&](double at) { return specfun::hankel_with_derivative(kind, o, at).derivative; };
            const cplx y2 = (-d(x + 2 * h) + 8.0 * d(x + h) - 8.0 * d(x - h) + d(x - 2 * h)) / (12.0 * h);
            const auto y = specfun::hankel_with_derivative(kind, o, x);
            const cplx r = y2 + y.derivative / x + (1.0 - o.nu_squared() / (x * x)) * y.value;
            CAPTURE(o.mu());
            CAPTURE(x);
            CHECK(std::abs(r) <= 1e-6 * std::max(std::abs(y.value), 1.0));
        }
    }
}

TEST_CASE("argument and order outside the supported box fail loudly")
{
    CHECK_THROWS_AS(specfun::bessel_j(Order::real(0.4), 2e4), RangeError);
    CHECK_THROWS_AS(specfun::bessel_j(Order::real(60.0), 1.0), RangeError);
    CHECK_THROWS_AS(specfun::hankel(HankelKind::First, Order::real(0.4), 0.0), RangeError);
    CHECK_THROWS_AS(Order::real(-1.0), RangeError);
    CHECK_THROWS_AS(Order::imaginary(0.0), RangeError);
}
