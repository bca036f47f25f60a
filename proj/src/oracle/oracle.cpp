#include "abscat/oracle.hpp"

#include "abscat/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace abscat::oracle {

namespace {

using real_ld = long double;
using cplx_ld = std::complex<real_ld>;
using State = std::array<real_ld, 4>; // Re R, Im R, Re R_t, Im R_t

constexpr double kPi = std::numbers::pi;
constexpr real_ld kMinStep = 1e-14L;

cplx_ld to_ld(cplx z) { return {z.real(), z.imag()}; }
cplx to_d(cplx_ld z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

real_ld norm_of(const State& s)
{
    return std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]);
}

// Frobenius solution rho^{s nu} sum_k (-p^2 rho^2/4)^k / (k! (1 + s nu)_k)
// and its rho-derivative.
std::pair<cplx_ld, cplx_ld> frobenius(cplx_ld nu, real_ld p, real_ld rho, int sign)
{
    const cplx_ld order = static_cast<real_ld>(sign) * nu;
    const real_ld q = -p * p * rho * rho / 4.0L;
    cplx_ld term = 1.0L;
    cplx_ld sum = 1.0L;
    cplx_ld dsum = order; // rho d/drho of the bracket times rho^order, divided by rho^order
    for (int k = 1; k < 200; ++k) {
        const cplx_ld pole = static_cast<real_ld>(k) + order;
        if (std::abs(pole) < 1e-9L) {
            throw FitDegenerateError("Frobenius series of rho^-nu breaks down at integer order");
        }
        term *= q / (static_cast<real_ld>(k) * pole);
        sum += term;
        dsum += term * (2.0L * k + order);
        if (std::abs(term) < 1e-21L * std::abs(sum)) {
            break;
        }
    }
    const cplx_ld power = std::exp(order * std::log(rho));
    return {power * sum, power * dsum / rho};
}

// Hankel asymptotic series P(x) = sum_k a_k (s i / x)^k.
cplx_ld hankel_tail(real_ld nu2, real_ld x, int sign)
{
    const cplx_ld step(0.0L, sign / x);
    cplx_ld term = 1.0L;
    cplx_ld sum = 1.0L;
    real_ld previous = 1.0L;
    for (int k = 1; k < 300; ++k) {
        const real_ld odd = 2.0L * k - 1.0L;
        term *= (4.0L * nu2 - odd * odd) / (8.0L * k) * step;
        const real_ld size = std::abs(term);
        if (k > 1 && size > previous) {
            throw FitDegenerateError("Hankel asymptotic series diverges in the large-rho window");
        }
        sum += term;
        if (size < 1e-19L * std::abs(sum)) {
            return sum;
        }
        previous = size;
    }
    throw FitDegenerateError("Hankel asymptotic series does not converge in the large-rho window");
}

// sqrt(2/(pi x)) e^{s i (x - pi/4)} P_s(x), x = p rho
cplx_ld wave(real_ld nu2, real_ld p, real_ld rho, int sign)
{
    const real_ld x = p * rho;
    const auto tail = hankel_tail(nu2, x, sign);
    return std::sqrt(2.0L / (std::numbers::pi_v<real_ld> * x))
           * std::exp(cplx_ld(0.0L, sign * (x - std::numbers::pi_v<real_ld> / 4.0L))) * tail;
}

// Complex two-parameter least squares y ~ c1 f1 + c2 f2 with column
// scaling; returns the coefficients and the relative RMS residual.
struct Fit2 {
    cplx_ld c1, c2;
    double residual;
};

Fit2 least_squares(const std::vector<cplx_ld>& f1, const std::vector<cplx_ld>& f2,
                   const std::vector<cplx_ld>& y)
{
    real_ld n1 = 0.0L, n2 = 0.0L;
    for (std::size_t i = 0; i < y.size(); ++i) {
        n1 += std::norm(f1[i]);
        n2 += std::norm(f2[i]);
    }
    n1 = std::sqrt(n1);
    n2 = std::sqrt(n2);
    if (!(n1 > 0.0L) || !(n2 > 0.0L)) {
        throw FitDegenerateError("vanishing basis function in fit window");
    }
    cplx_ld g11 = 0.0L, g12 = 0.0L, g22 = 0.0L, r1 = 0.0L, r2 = 0.0L;
    real_ld ny = 0.0L;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const cplx_ld u = f1[i] / n1;
        const cplx_ld v = f2[i] / n2;
        g11 += std::conj(u) * u;
        g12 += std::conj(u) * v;
        g22 += std::conj(v) * v;
        r1 += std::conj(u) * y[i];
        r2 += std::conj(v) * y[i];
        ny += std::norm(y[i]);
    }
    const cplx_ld det = g11 * g22 - g12 * std::conj(g12);
    if (std::abs(det) < 1e-24L) {
        throw FitDegenerateError("fit basis functions are nearly collinear");
    }
    const cplx_ld x1 = (g22 * r1 - g12 * r2) / det;
    const cplx_ld x2 = (g11 * r2 - std::conj(g12) * r1) / det;
    real_ld rr = 0.0L;
    for (std::size_t i = 0; i < y.size(); ++i) {
        rr += std::norm(y[i] - x1 * f1[i] / n1 - x2 * f2[i] / n2);
    }
    const double residual = ny > 0.0L ? static_cast<double>(std::sqrt(rr / ny)) : 0.0;
    return {x1 / n1, x2 / n2, residual};
}

} // namespace

double RadialProfile::scaled_current(std::size_t i, double mass) const
{
    return 2.0 * kPi * rho.at(i) * std::imag(std::conj(values.at(i)) * derivatives.at(i)) / mass;
}

std::size_t RadialProfile::index_of(double r) const
{
    auto it = std::lower_bound(rho.begin(), rho.end(), r * (1.0 - 1e-12));
    if (it == rho.end() || std::abs(*it - r) > 1e-12 * r) {
        throw RangeError("rho = " + std::to_string(r) + " is not a grid point");
    }
    return static_cast<std::size_t>(it - rho.begin());
}

double inner_radius(const ScatteringConfig& cfg, const OracleOptions& options)
{
    return options.rho_in_factor * std::min(1.0 / cfg.p, 1.0);
}

std::vector<double> output_grid(const ScatteringConfig& cfg, double rho_in, double rho_out,
                                const OracleOptions& options)
{
    std::vector<double> grid;
    const double small_hi = std::min(rho_in * options.small_window, rho_out);
    for (int i = 0; i < options.small_points; ++i) {
        grid.push_back(rho_in * std::pow(small_hi / rho_in, static_cast<double>(i) / (options.small_points - 1)));
    }
    for (double r : options.extra_rho) {
        if (r > rho_in && r < rho_out) {
            grid.push_back(r);
        }
    }
    const double lo = options.large_lo / cfg.p;
    const double hi = std::min(options.large_hi / cfg.p, rho_out);
    if (lo < hi && lo > rho_in) {
        const double wavelength = 2.0 * kPi / cfg.p;
        const int n = static_cast<int>(std::ceil((hi - lo) / wavelength * options.points_per_wavelength));
        for (int i = 0; i <= n; ++i) {
            grid.push_back(lo + (hi - lo) * i / n);
        }
    }
    grid.push_back(rho_out);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-14 * y; }),
               grid.end());
    return grid;
}

RadialProfile integrate_log_radial(const std::function<long double(long double)>& q,
                                   const InitialData& init, const std::vector<double>& grid,
                                   double tau, double max_step)
{
    if (grid.empty() || std::abs(grid.front() - init.rho) > 1e-14 * init.rho) {
        throw RangeError("output grid must start at the initial radius");
    }
    if (!(tau > 0.0)) {
        throw ConfigError("integration tolerance must be positive");
    }
    auto rhs = [&q](const State& y, State& dydt, real_ld t) {
        const real_ld k = q(t);
        dydt[0] = y[2];
        dydt[1] = y[3];
        dydt[2] = k * y[0];
        dydt[3] = k * y[1];
    };

    State y{init.value.real(), init.value.imag(), init.rho * init.derivative.real(),
            init.rho * init.derivative.imag()};
    real_ld t = std::log(static_cast<real_ld>(init.rho));

    RadialProfile profile;
    profile.rho.reserve(grid.size());
    auto record = [&](double r) {
        profile.rho.push_back(r);
        profile.values.push_back(to_d({y[0], y[1]}));
        profile.derivatives.push_back(to_d(cplx_ld(y[2], y[3]) / static_cast<real_ld>(r)));
    };
    record(grid.front());

    boost::numeric::odeint::runge_kutta_fehlberg78<State, real_ld> stepper;
    // initial step from the local wavenumber in t
    real_ld dt = 0.05L / (1.0L + std::sqrt(std::abs(q(t))));
    const real_ld cap = max_step > 0.0 ? max_step : 1.0L;
    const real_ld rtol = tau;
    State trial{};
    State err{};

    for (std::size_t g = 1; g < grid.size(); ++g) {
        const real_ld target = std::log(static_cast<real_ld>(grid[g]));
        const real_ld dir = target >= t ? 1.0L : -1.0L;
        while (dir * (target - t) > 0.0L) {
            const real_ld remaining = dir * (target - t);
            const real_ld h = std::min({dt, remaining, cap});
            trial = y;
            stepper.do_step(rhs, trial, t, dir * h, err);
            const real_ld scale = std::max(norm_of(y), norm_of(trial));
            const real_ld ratio = norm_of(err) / (rtol * scale);
            if (!std::isfinite(static_cast<double>(ratio))) {
                throw StiffnessError("non-finite state in radial integration",
                                     static_cast<double>(std::exp(t)));
            }
            if (ratio <= 1.0L) {
                y = trial;
                t = h >= remaining ? target : t + dir * h;
                ++profile.steps;
                // steps cut short to land on a grid point keep the old size
                if (h == dt) {
                    const real_ld grow = ratio > 0.0L ? 0.9L * std::pow(ratio, -1.0L / 8.0L) : 5.0L;
                    dt = h * std::clamp(grow, 0.2L, 5.0L);
                }
            }
            else {
                dt = h * std::clamp(0.9L * std::pow(ratio, -1.0L / 8.0L), 0.1L, 0.9L);
                if (dt < kMinStep) {
                    throw StiffnessError("step size collapsed in radial integration",
                                         static_cast<double>(std::exp(t)));
                }
            }
        }
        record(grid[g]);
    }
    return profile;
}

RadialProfile integrate_radial(const ScatteringConfig& cfg, const PartialMode& mode,
                               const InitialData& init, double rho_out,
                               const OracleOptions& options)
{
    cfg.validate();
    if (!(init.rho > 0.0) || !(rho_out > init.rho)) {
        throw RangeError("integration needs 0 < rho_in < rho_out");
    }
    const real_ld nu2 = mode.nu_squared;
    const real_ld p2 = static_cast<real_ld>(cfg.p) * cfg.p;
    return integrate_log_radial([nu2, p2](real_ld t) { return nu2 - p2 * std::exp(2.0L * t); },
                                init, output_grid(cfg, init.rho, rho_out, options), options.tau,
                                options.max_step);
}

InitialData frobenius_data(const ScatteringConfig& cfg, const PartialMode& mode, cplx A, cplx B,
                           double rho)
{
    const cplx_ld nu = to_ld(mode.order().nu());
    cplx_ld value = 0.0L;
    cplx_ld deriv = 0.0L;
    if (A != 0.0) {
        auto [f, df] = frobenius(nu, cfg.p, rho, -1);
        value += to_ld(A) * f;
        deriv += to_ld(A) * df;
    }
    if (B != 0.0) {
        auto [f, df] = frobenius(nu, cfg.p, rho, 1);
        value += to_ld(B) * f;
        deriv += to_ld(B) * df;
    }
    return {rho, to_d(value), to_d(deriv)};
}

InitialData hankel_data(const ScatteringConfig& cfg, const PartialMode& mode, cplx a, cplx b,
                        double rho)
{
    const auto order = mode.order();
    const double x = cfg.p * rho;
    const auto h1 = specfun::hankel_with_derivative(specfun::HankelKind::First, order, x);
    const auto h2 = specfun::hankel_with_derivative(specfun::HankelKind::Second, order, x);
    return {rho, a * h1.value + b * h2.value, cfg.p * (a * h1.derivative + b * h2.derivative)};
}

InitialData boundary_data(const ScatteringConfig& cfg, const PartialMode& mode,
                          const BoundaryModel& model, double rho)
{
    if (mode.regime == Regime::Regular) {
        return frobenius_data(cfg, mode, 0.0, 1.0, rho);
    }
    struct Visitor {
        const ScatteringConfig& cfg;
        const PartialMode& mode;
        double rho;
        InitialData operator()(const model::ElasticSubcritical& v) const
        {
            if (mode.regime != Regime::Subcritical) {
                throw ModelRegimeMismatch("ElasticSubcritical needs a Subcritical mode");
            }
            return frobenius_data(cfg, mode, v.l, 1.0, rho);
        }
        InitialData operator()(const model::ElasticSupercritical& v) const
        {
            if (mode.regime != Regime::Supercritical) {
                throw ModelRegimeMismatch("ElasticSupercritical needs a Supercritical mode");
            }
            return frobenius_data(cfg, mode, std::polar(1.0, v.theta), 1.0, rho);
        }
        InitialData operator()(const model::Sink&) const
        {
            if (mode.regime != Regime::Supercritical) {
                throw ModelRegimeMismatch("Sink needs a Supercritical mode");
            }
            return frobenius_data(cfg, mode, 1.0, 0.0, rho);
        }
        InitialData operator()(const model::TotalAbsorption&) const
        {
            return hankel_data(cfg, mode, 0.0, 1.0, rho);
        }
        InitialData operator()(const model::Custom& v) const
        {
            return hankel_data(cfg, mode, v.ratio, 1.0, rho);
        }
    };
    return std::visit(Visitor{cfg, mode, rho}, model);
}

SmallRhoCoefficients match_small_rho(const RadialProfile& profile, const ScatteringConfig& cfg,
                                     const PartialMode& mode, const OracleOptions& options)
{
    if (mode.mu < 1e-3) {
        throw FitDegenerateError("small-rho basis rho^{+-nu} is degenerate for mu < 1e-3");
    }
    if (profile.rho.empty()) {
        throw FitDegenerateError("empty profile");
    }
    const double lo = profile.rho.front();
    const double hi = lo * options.small_window * (1.0 + 1e-12);
    const cplx_ld nu = to_ld(mode.order().nu());
    std::vector<cplx_ld> fm, fp, y;
    for (std::size_t i = 0; i < profile.rho.size() && profile.rho[i] <= hi; ++i) {
        fm.push_back(frobenius(nu, cfg.p, profile.rho[i], -1).first);
        fp.push_back(frobenius(nu, cfg.p, profile.rho[i], 1).first);
        y.push_back(to_ld(profile.values[i]));
    }
    if (y.size() < 4) {
        throw FitDegenerateError("too few points in the small-rho window");
    }
    const auto fit = least_squares(fm, fp, y);
    return {to_d(fit.c1), to_d(fit.c2), fit.residual};
}

LargeRhoCoefficients match_large_rho(const RadialProfile& profile, const ScatteringConfig& cfg,
                                     const PartialMode& mode, const OracleOptions& options)
{
    const double lo = options.large_lo / cfg.p * (1.0 - 1e-12);
    const double hi = options.large_hi / cfg.p * (1.0 + 1e-12);
    std::vector<cplx_ld> win, wout, y;
    std::vector<double> r;
    for (std::size_t i = 0; i < profile.rho.size(); ++i) {
        if (profile.rho[i] >= lo && profile.rho[i] <= hi) {
            r.push_back(profile.rho[i]);
            y.push_back(to_ld(profile.values[i]));
        }
    }
    if (r.size() < 2 || !(r.back() > r.front())) {
        throw FitDegenerateError("profile does not cover the large-rho window");
    }
    const double wavelength = 2.0 * kPi / cfg.p;
    const double density = (r.size() - 1) / ((r.back() - r.front()) / wavelength);
    double widest = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        widest = std::max(widest, r[i] - r[i - 1]);
    }
    if (density < 20.0 || widest > wavelength / 20.0 * (1.0 + 1e-9)) {
        throw FitDegenerateError("large-rho window under-resolved (fewer than 20 points per wavelength)");
    }
    for (double rho : r) {
        win.push_back(wave(mode.nu_squared, cfg.p, rho, -1));
        wout.push_back(wave(mode.nu_squared, cfg.p, rho, 1));
    }
    const auto fit = least_squares(win, wout, y);
    return {to_d(fit.c1), to_d(fit.c2), fit.residual};
}

TwoTermFit fit_two(const std::vector<cplx>& f1, const std::vector<cplx>& f2,
                   const std::vector<cplx>& y)
{
    if (f1.size() != y.size() || f2.size() != y.size() || y.size() < 2) {
        throw FitDegenerateError("fit needs matching samples, at least two");
    }
    std::vector<cplx_ld> a(f1.size()), b(f2.size()), c(y.size());
    std::transform(f1.begin(), f1.end(), a.begin(), to_ld);
    std::transform(f2.begin(), f2.end(), b.begin(), to_ld);
    std::transform(y.begin(), y.end(), c.begin(), to_ld);
    const auto fit = least_squares(a, b, c);
    return {to_d(fit.c1), to_d(fit.c2), fit.residual};
}

cplx extract_smatrix(const LargeRhoCoefficients& large, int m)
{
    if (large.ingoing == 0.0) {
        throw FitDegenerateError("no ingoing wave in the large-rho fit");
    }
    return (m % 2 == 0 ? 1.0 : -1.0) * large.outgoing / large.ingoing;
}

OracleChannel solve_channel_numerically(const ScatteringConfig& cfg, const PartialMode& mode,
                                        const BoundaryModel& model, const OracleOptions& options)
{
    const double rho_in = inner_radius(cfg, options);
    const auto init = boundary_data(cfg, mode, model, rho_in);
    OracleChannel out;
    out.profile = integrate_radial(cfg, mode, init, options.large_hi / cfg.p, options);
    out.coefficients.large_rho = match_large_rho(out.profile, cfg, mode, options);
    if (mode.mu >= 1e-3 && !(mode.regime == Regime::Regular && std::abs(mode.mu - std::round(mode.mu)) < 1e-9)) {
        out.coefficients.small_rho = match_small_rho(out.profile, cfg, mode, options);
    }
    out.s_matrix = extract_smatrix(out.coefficients.large_rho, mode.m);
    return out;
}

} // namespace abscat::oracle
