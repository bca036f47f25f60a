#include "detail.hpp"

#include "abscat/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace abscat::specfun {

namespace detail {

namespace {

constexpr real_ld kPi = std::numbers::pi_v<real_ld>;
constexpr real_ld kEulerGamma = 0.57721566490153286060651209008240243L;
constexpr real_ld kEps = std::numeric_limits<real_ld>::epsilon();

// Accepted cancellation loss for the ascending series, relative to the
// larger of |value| and |derivative|.
constexpr real_ld kSeriesTolerance = 1e-13L;


} // namespace

std::optional<PairLd> j_series(cplx_ld nu, real_ld x)
{
    const cplx_ld prefactor = std::exp(nu * std::log(x / 2.0L)) / gamma_ld(nu + 1.0L);
    const real_ld q = -x * x / 4.0L;

    cplx_ld term = 1.0L;
    cplx_ld sum = 1.0L;
    cplx_ld dsum = nu / x;
    real_ld abs_sum = 1.0L;
    real_ld abs_dsum = std::abs(nu) / x;

    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<real_ld>(k) * (static_cast<real_ld>(k) + nu));
        const cplx_ld dterm = term * (2.0L * k + nu) / x;
        sum += term;
        dsum += dterm;
        // recursion error grows linearly with k
        abs_sum += (k + 1) * std::abs(term);
        abs_dsum += (k + 1) * std::abs(dterm);
        if (k > x && std::abs(term) < 1e-22L * std::abs(sum)
            && std::abs(dterm) < 1e-22L * std::max(std::abs(dsum), std::abs(sum))) {
            const real_ld scale = std::max(std::abs(sum), std::abs(dsum));
            if (kEps * std::max(abs_sum, abs_dsum) > kSeriesTolerance * scale) {
                return std::nullopt;
            }
            return PairLd{prefactor * sum, prefactor * dsum};
        }
    }
    return std::nullopt;
}

std::optional<PairLd> y_integer_series(int n, real_ld x)
{
    auto j = j_series(cplx_ld(n, 0.0L), x);
    if (!j) {
        return std::nullopt;
    }
    const real_ld half = x / 2.0L;
    const real_ld log_half = std::log(half);

    // finite sum: sum_{k<n} (n-k-1)!/k! (x/2)^{2k-n}
    real_ld finite = 0.0L;
    real_ld dfinite = 0.0L;
    real_ld abs_total = 0.0L;
    for (int k = 0; k < n; ++k) {
        real_ld coeff = std::tgamma(static_cast<real_ld>(n - k)) / std::tgamma(static_cast<real_ld>(k + 1));
        real_ld t = coeff * std::pow(half, 2 * k - n);
        finite += t;
        dfinite += t * (2 * k - n) / x;
        abs_total += std::abs(t);
    }

    // psi sums
    real_ld harmonic_k = 0.0L; // H_k
    real_ld harmonic_nk = 0.0L; // H_{n+k}
    for (int i = 1; i <= n; ++i) {
        harmonic_nk += 1.0L / i;
    }
    real_ld c = std::pow(half, n) / std::tgamma(static_cast<real_ld>(n + 1));
    const real_ld q = -x * x / 4.0L;
    real_ld series = 0.0L;
    real_ld dseries = 0.0L;
    real_ld abs_series = 0.0L;
    for (int k = 0; k < 1000; ++k) {
        if (k > 0) {
            c *= q / (static_cast<real_ld>(k) * (n + k));
            harmonic_k += 1.0L / k;
            harmonic_nk += 1.0L / (n + k);
        }
        const real_ld psi_sum = -2.0L * kEulerGamma + harmonic_k + harmonic_nk;
        const real_ld t = psi_sum * c;
        series += t;
        dseries += t * (2 * k + n) / x;
        abs_series += (k + 1) * std::abs(t) * std::max<real_ld>(1.0L, (2 * k + n) / x);
        if (k > x && std::abs(t) < 1e-22L * std::max<real_ld>(std::abs(series), 1e-300L)) {
            break;
        }
    }

    const real_ld jr = j->value.real();
    const real_ld djr = j->derivative.real();
    const real_ld y = (2.0L / kPi) * jr * log_half - (finite + series) / kPi;
    const real_ld dy = (2.0L / kPi) * (djr * log_half + jr / x) - (dfinite + dseries) / kPi;

    const real_ld scale = std::max(std::abs(y), std::abs(dy));
    const real_ld abs_all = abs_total + abs_series + std::abs(2.0L * jr * log_half);
    if (kEps * abs_all / kPi > kSeriesTolerance * scale) {
        return std::nullopt;
    }
    return PairLd{cplx_ld(y, 0.0L), cplx_ld(dy, 0.0L)};
}

std::optional<PairLd> hankel_asymptotic(HankelKind kind, cplx_ld nu, real_ld x)
{
    const real_ld sign = kind == HankelKind::First ? 1.0L : -1.0L;
    const cplx_ld four_nu2 = 4.0L * nu * nu;
    const cplx_ld step_phase = cplx_ld(0.0L, sign) / x; // (+-i)/x

    cplx_ld term = 1.0L;
    cplx_ld sum = 1.0L;
    cplx_ld dsum = 0.0L;
    real_ld previous = 1.0L;
    bool converged = false;
    for (int k = 1; k < 200; ++k) {
        const real_ld odd = 2.0L * k - 1.0L;
        term *= (four_nu2 - odd * odd) / (8.0L * k) * step_phase;
        const real_ld size = std::abs(term);
        if (size == 0.0L) {
            converged = true; // half-integer order: the series terminates
            break;
        }
        if (size > previous && k > 1) {
            return std::nullopt;
        }
        sum += term;
        dsum += -static_cast<real_ld>(k) * term / x;
        previous = size;
        if (size < 1e-18L * std::abs(sum)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        return std::nullopt;
    }

    // exp(+-i (x - nu pi / 2 - pi / 4))
    const cplx_ld carrier = std::exp(cplx_ld(0.0L, sign) * (x - kPi / 4.0L))
                            * std::exp(cplx_ld(0.0L, -sign) * nu * (kPi / 2.0L));
    const real_ld amplitude = std::sqrt(2.0L / (kPi * x));
    const cplx_ld base = amplitude * carrier;
    return PairLd{base * sum, base * ((cplx_ld(0.0L, sign) - 0.5L / x) * sum + dsum)};
}

} // namespace detail

namespace {

using detail::cplx_ld;
using detail::PairLd;
using detail::real_ld;

constexpr real_ld kPi = std::numbers::pi_v<real_ld>;
constexpr double kIntegerOrderWindow = 1e-9;
constexpr double kInternalWronskianGuard = 1e-9;

cplx to_double(cplx_ld z)
{
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

ValueAndDerivative to_double(const PairLd& p)
{
    return {to_double(p.value), to_double(p.derivative)};
}

void check_box(Order order, double x)
{
    if (!(x > 0.0) || !(x <= kMaxArgument)) {
        throw RangeError("Bessel argument x = " + std::to_string(x)
                         + " outside (0, " + std::to_string(kMaxArgument) + "]");
    }
    if (!(order.mu() <= kMaxOrder)) {
        throw RangeError("Bessel order |nu| = " + std::to_string(order.mu())
                         + " exceeds " + std::to_string(kMaxOrder));
    }
}

// Integrates Bessel's equation y'' + y'/x + (1 - nu^2/x^2) y = 0 for N complex
// solutions at once, from x0 to x1.
template <std::size_t N>
std::array<PairLd, N> propagate(const std::array<PairLd, N>& init, real_ld nu2,
                                real_ld x0, real_ld x1)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::array<real_ld, 4 * N>;

    State state{};
    real_ld scale = 0.0L;
    for (std::size_t i = 0; i < N; ++i) {
        state[4 * i + 0] = init[i].value.real();
        state[4 * i + 1] = init[i].value.imag();
        state[4 * i + 2] = init[i].derivative.real();
        state[4 * i + 3] = init[i].derivative.imag();
        scale = std::max({scale, std::abs(init[i].value), std::abs(init[i].derivative)});
    }

    auto rhs = [nu2](const State& y, State& dydx, real_ld x) {
        const real_ld k = 1.0L - nu2 / (x * x);
        for (std::size_t i = 0; i < N; ++i) {
            dydx[4 * i + 0] = y[4 * i + 2];
            dydx[4 * i + 1] = y[4 * i + 3];
            dydx[4 * i + 2] = -y[4 * i + 2] / x - k * y[4 * i + 0];
            dydx[4 * i + 3] = -y[4 * i + 3] / x - k * y[4 * i + 1];
        }
    };

    auto stepper = odeint::make_controlled(1e-22L * scale, 1e-17L,
                                           odeint::runge_kutta_fehlberg78<State, real_ld>());
    try {
        odeint::integrate_adaptive(stepper, rhs, state, x0, x1, (x1 - x0) / 64.0L);
    }
    catch (const std::exception& e) {
        throw RangeError(std::string("Bessel ODE propagation failed: ") + e.what());
    }

    std::array<PairLd, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i].value = {state[4 * i + 0], state[4 * i + 1]};
        out[i].derivative = {state[4 * i + 2], state[4 * i + 3]};
    }
    return out;
}

// Largest x0 <= x at which `series_ok(x0)` holds.
template <class F>
real_ld series_start(real_ld x, F&& series_ok)
{
    real_ld x0 = std::min<real_ld>(x, 14.0L);
    while (x0 > 0.05L) {
        if (series_ok(x0)) {
            return x0;
        }
        x0 *= 0.85L;
    }
    throw RangeError("no accurate series starting point below x = "
                     + std::to_string(static_cast<double>(x)));
}

bool near_integer(cplx_ld nu, int& n)
{
    if (nu.imag() != 0.0L) {
        return false;
    }
    real_ld r = std::round(nu.real());
    if (std::abs(nu.real() - r) < kIntegerOrderWindow) {
        n = static_cast<int>(r);
        return true;
    }
    return false;
}

PairLd j_pair(cplx_ld nu, real_ld x)
{
    int n = 0;
    if (near_integer(nu, n) && n < 0) {
        // J_{-n} = (-1)^n J_n
        PairLd p = j_pair(cplx_ld(-n, 0.0L), x);
        if (n % 2 != 0) {
            p.value = -p.value;
            p.derivative = -p.derivative;
        }
        return p;
    }
    if (auto s = detail::j_series(nu, x)) {
        return *s;
    }
    auto h1 = detail::hankel_asymptotic(HankelKind::First, nu, x);
    auto h2 = detail::hankel_asymptotic(HankelKind::Second, nu, x);
    if (h1 && h2) {
        return {(h1->value + h2->value) / 2.0L, (h1->derivative + h2->derivative) / 2.0L};
    }
    // Forward propagation: J is never the recessive solution going outward.
    real_ld x0 = series_start(x, [&](real_ld t) { return detail::j_series(nu, t).has_value(); });
    auto start = *detail::j_series(nu, x0);
    real_ld nu2 = (nu * nu).real();
    return propagate<1>({start}, nu2, x0, x)[0];
}

// Both Hankel functions from the series representation at x, if available.
std::optional<std::array<PairLd, 2>> hankel_from_series(cplx_ld nu, real_ld x)
{
    int n = 0;
    if (near_integer(nu, n)) {
        auto j = detail::j_series(cplx_ld(n, 0.0L), x);
        auto y = detail::y_integer_series(n, x);
        if (!j || !y) {
            return std::nullopt;
        }
        return std::array<PairLd, 2>{
            PairLd{j->value + cplx_ld(0.0L, 1.0L) * y->value, j->derivative + cplx_ld(0.0L, 1.0L) * y->derivative},
            PairLd{j->value - cplx_ld(0.0L, 1.0L) * y->value, j->derivative - cplx_ld(0.0L, 1.0L) * y->derivative}};
    }
    auto jp = detail::j_series(nu, x);
    auto jm = detail::j_series(-nu, x);
    if (!jp || !jm) {
        return std::nullopt;
    }
    const cplx_ld i(0.0L, 1.0L);
    const cplx_ld e_minus = detail::exp_i_pi(-nu);
    const cplx_ld e_plus = detail::exp_i_pi(nu);
    const cplx_ld denom = i * detail::sin_pi(nu);
    return std::array<PairLd, 2>{
        PairLd{(jm->value - e_minus * jp->value) / denom,
               (jm->derivative - e_minus * jp->derivative) / denom},
        PairLd{(jm->value - e_plus * jp->value) / (-denom),
               (jm->derivative - e_plus * jp->derivative) / (-denom)}};
}

std::array<PairLd, 2> hankel_pair_both(cplx_ld nu, real_ld x)
{
    int n = 0;
    const cplx_ld nu_eff = near_integer(nu, n) ? cplx_ld(n, 0.0L) : nu;
    auto a1 = detail::hankel_asymptotic(HankelKind::First, nu_eff, x);
    auto a2 = detail::hankel_asymptotic(HankelKind::Second, nu_eff, x);
    if (a1 && a2) {
        return {*a1, *a2};
    }
    if (auto s = hankel_from_series(nu, x)) {
        return *s;
    }
    const real_ld nu2 = (nu_eff * nu_eff).real();
    real_ld x0 = series_start(x, [&](real_ld t) { return hankel_from_series(nu, t).has_value(); });
    std::array<PairLd, 2> out;
    if (nu2 <= x0 * x0) {
        out = propagate<2>(*hankel_from_series(nu, x0), nu2, x0, x);
    }
    else {
        // Y_nu is recessive going outward below the turning point x = nu, so
        // come in from the asymptotic region instead.
        real_ld xa = std::max<real_ld>(x, 30.0L);
        auto b1 = detail::hankel_asymptotic(HankelKind::First, nu_eff, xa);
        auto b2 = detail::hankel_asymptotic(HankelKind::Second, nu_eff, xa);
        while (!(b1 && b2)) {
            xa *= 1.25L;
            if (xa > 1e7L) {
                throw RangeError("Hankel asymptotic region not reached");
            }
            b1 = detail::hankel_asymptotic(HankelKind::First, nu_eff, xa);
            b2 = detail::hankel_asymptotic(HankelKind::Second, nu_eff, xa);
        }
        out = propagate<2>({*b1, *b2}, nu2, xa, x);
    }

    const cplx_ld w = out[0].value * out[1].derivative - out[0].derivative * out[1].value;
    const real_ld deviation = std::abs(w * cplx_ld(0.0L, kPi * x / 4.0L) - 1.0L);
    if (deviation > kInternalWronskianGuard) {
        throw DegenerateOrderError("Hankel pair lost accuracy (Wronskian deviation "
                                   + std::to_string(static_cast<double>(deviation)) + ")");
    }
    return out;
}

cplx_ld to_ld(cplx z) { return {z.real(), z.imag()}; }

} // namespace

Order Order::real(double mu)
{
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw RangeError("real Bessel order must be finite and >= 0");
    }
    return Order(false, mu);
}

Order Order::imaginary(double mu)
{
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw RangeError("imaginary Bessel order requires mu > 0");
    }
    return Order(true, mu);
}

ValueAndDerivative bessel_j_with_derivative(Order order, double x, bool reflected)
{
    check_box(order, x);
    cplx_ld nu = to_ld(order.nu());
    if (reflected) {
        nu = -nu;
    }
    auto result = to_double(j_pair(nu, x));
    if (!order.is_imaginary()) {
        result.value.imag(0.0);
        result.derivative.imag(0.0);
    }
    return result;
}

cplx bessel_j(Order order, double x)
{
    return bessel_j_with_derivative(order, x, false).value;
}

cplx bessel_j_reflected(Order order, double x)
{
    return bessel_j_with_derivative(order, x, true).value;
}

ValueAndDerivative hankel_with_derivative(HankelKind kind, Order order, double x)
{
    check_box(order, x);
    if (order.is_imaginary() && order.mu() < kIntegerOrderWindow) {
        throw DegenerateOrderError("imaginary order too close to zero");
    }
    auto both = hankel_pair_both(to_ld(order.nu()), x);
    auto result = to_double(both[kind == HankelKind::First ? 0 : 1]);
    if (!std::isfinite(result.value.real()) || !std::isfinite(result.value.imag())) {
        throw RangeError("Hankel function overflows double");
    }
    return result;
}

cplx hankel(HankelKind kind, Order order, double x)
{
    return hankel_with_derivative(kind, order, x).value;
}

double wronskian_check(Order order, double x)
{
    auto h1 = hankel_with_derivative(HankelKind::First, order, x);
    auto h2 = hankel_with_derivative(HankelKind::Second, order, x);
    // Real orders go through W{H1, H2} = -2i W{J, Y}, which keeps the tiny J
    // of large orders that H1 H2' - H1' H2 would cancel away. Imaginary
    // orders have H1 >> H2 instead and use the direct form.
    double dev = 0.0;
    if (order.is_imaginary()) {
        const cplx w = h1.value * h2.derivative - h1.derivative * h2.value;
        dev = std::abs(w * cplx(0.0, std::numbers::pi * x / 4.0) - 1.0);
    }
    else {
        const cplx j = 0.5 * (h1.value + h2.value);
        const cplx dj = 0.5 * (h1.derivative + h2.derivative);
        const cplx y = (h1.value - h2.value) / cplx(0.0, 2.0);
        const cplx dy = (h1.derivative - h2.derivative) / cplx(0.0, 2.0);
        dev = std::abs((j * dy - dj * y) * (std::numbers::pi * x / 2.0) - 1.0);
    }
    if (!std::isfinite(dev)) {
        throw RangeError("Wronskian not representable at x = " + std::to_string(x));
    }
    return dev;
}

} // namespace abscat::specfun
