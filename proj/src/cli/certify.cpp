#include "abscat/cli.hpp"
#include "abscat/errors.hpp"
#include "abscat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace abscat::cli {

namespace {

constexpr double kPi = std::numbers::pi;

using specfun::Order;

Order random_order(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> mu(0.0, 5.0);
    if (std::bernoulli_distribution(0.5)(rng)) {
        return Order::real(mu(rng));
    }
    return Order::imaginary(std::max(0.01, mu(rng)));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

// |y'' + y'/x + (1 - nu^2/x^2) y| / max(|y|, 1) for y = H1, with y'' from a
// five-point difference of the provided derivative at step 1e-4 x.
double ode_residual(const HankelProvider& hankel, Order order, double x)
{
    const double h = 1e-4 * x;
    auto d = [&](double at) { return hankel(order, at).first.derivative; };
    const cplx y2 = (-d(x + 2 * h) + 8.0 * d(x + h) - 8.0 * d(x - h) + d(x - 2 * h)) / (12.0 * h);
    const auto [h1, h2] = hankel(order, x);
    (void)h2;
    const double k = 1.0 - order.nu_squared() / (x * x);
    const cplx r = y2 + h1.derivative / x + k * h1.value;
    return std::abs(r) / std::max(std::abs(h1.value), 1.0);
}

CertifyCheck check(std::string name, double worst, double threshold)
{
    return {std::move(name), worst, threshold, worst <= threshold};
}

} // namespace

ChannelDraw draw_channel(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        ScatteringConfig cfg{0.9 * unit(rng), 3.0 * (1.0 - unit(rng)), log_uniform(rng, 0.3, 3.0), 0.5};
        const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
        const Regime want = kind == 0 ? Regime::Regular
                            : kind == 1 ? Regime::Subcritical
                                        : Regime::Supercritical;
        const auto span = non_regular_range(cfg).value_or(std::pair{0, 0});
        std::vector<PartialMode> candidates;
        for (int m = span.first - 3; m <= span.second + 3; ++m) {
            try {
                const auto mode = classify_mode(cfg, m);
                if (mode.regime == want) {
                    candidates.push_back(mode);
                }
            }
            catch (const DegenerateModeError&) {
            }
        }
        if (candidates.empty()) {
            continue;
        }
        const PartialMode mode =
            candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
        const double phase = 2.0 * kPi * unit(rng);
        const double radius = 0.9 * std::sqrt(unit(rng));
        BoundaryModel model = model::Sink{};
        switch (mode.regime) {
        case Regime::Regular: break;
        case Regime::Subcritical:
            if (unit(rng) < 0.75) {
                model = model::ElasticSubcritical{std::tan(kPi * (unit(rng) - 0.5))};
            }
            else {
                model = model::Custom{std::polar(radius, phase)};
            }
            break;
        default: {
            const double u = unit(rng);
            if (u < 0.4) {
                model = model::Sink{};
            }
            else if (u < 0.8) {
                model = model::ElasticSupercritical{phase};
            }
            else {
                model = model::Custom{std::polar(radius * std::exp(-kPi * mode.mu), phase)};
            }
        }
        }
        return {cfg, mode, model};
    }
}

HankelProvider default_hankel_provider()
{
    return [](Order order, double x) {
        return std::pair{specfun::hankel_with_derivative(specfun::HankelKind::First, order, x),
                         specfun::hankel_with_derivative(specfun::HankelKind::Second, order, x)};
    };
}

CertifyProfile CertifyProfile::standard() { return {}; }

CertifyProfile CertifyProfile::strict()
{
    CertifyProfile p;
    p.tau /= 100.0;
    return p;
}

bool CertifyReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

CertifyReport certify(const CertifyProfile& profile, const HankelProvider& hankel)
{
    CertifyReport report;
    std::mt19937_64 rng(profile.seed);

    double wronskian = 0.0;
    double residual = 0.0;
    for (int i = 0; i < profile.wronskian_samples; ++i) {
        const Order order = random_order(rng);
        const double x = log_uniform(rng, 0.1, 100.0);
        const auto [h1, h2] = hankel(order, x);
        double dev = 0.0;
        if (order.is_imaginary()) {
            const cplx w = h1.value * h2.derivative - h1.derivative * h2.value;
            dev = std::abs(w * cplx(0.0, kPi * x / 4.0) - 1.0);
        }
        else {
            // via J and Y, see specfun::wronskian_check
            const cplx j = 0.5 * (h1.value + h2.value);
            const cplx dj = 0.5 * (h1.derivative + h2.derivative);
            const cplx y = (h1.value - h2.value) / cplx(0.0, 2.0);
            const cplx dy = (h1.derivative - h2.derivative) / cplx(0.0, 2.0);
            dev = std::abs((j * dy - dj * y) * (kPi * x / 2.0) - 1.0);
        }
        wronskian = std::max(wronskian, std::isfinite(dev) ? dev : HUGE_VAL);
        const double res = ode_residual(hankel, order, x);
        residual = std::max(residual, std::isfinite(res) ? res : HUGE_VAL);
    }
    report.checks.push_back(check("specfun.wronskian", wronskian, 1e-8));
    report.checks.push_back(check("specfun.ode_residual", residual, 1e-6));

    oracle::OracleOptions options;
    options.tau = profile.tau;
    double agreement = 0.0;
    double current = 0.0;
    for (int i = 0; i < profile.channel_samples; ++i) {
        const auto draw = draw_channel(rng);
        const cplx closed = solve_channel(draw.cfg, draw.mode, draw.model).s_matrix;
        const auto numeric = oracle::solve_channel_numerically(draw.cfg, draw.mode, draw.model, options);
        agreement = std::max(agreement, std::abs(closed - numeric.s_matrix));

        const auto& large = numeric.coefficients.large_rho;
        const double gross = 4.0 / draw.cfg.mass * (std::norm(large.ingoing) + std::norm(large.outgoing));
        double lo = HUGE_VAL;
        double hi = -HUGE_VAL;
        for (std::size_t k = 0; k < numeric.profile.rho.size(); ++k) {
            const double j = numeric.profile.scaled_current(k, draw.cfg.mass);
            lo = std::min(lo, j);
            hi = std::max(hi, j);
        }
        current = std::max(current, (hi - lo) / gross);
    }
    report.checks.push_back(check("oracle.smatrix_agreement", agreement, 1e-5));
    report.checks.push_back(check("oracle.current_spread", current, 1e-7));

    double flux = 0.0;
    double unitarity = 0.0;
    for (double beta : {0.0, 0.35}) {
        const quartic::QuarticConfig qcfg{beta, 1.0, 1.0, 0.5};
        for (int m = -1; m <= 2; ++m) {
            const auto t = quartic::connection_matrix(qcfg, m, profile.quartic_tol);
            flux = std::max(flux, t.flux_form_defect());
            const auto sol = quartic::quartic_smatrix(qcfg, m, quartic::Elastic{0.4}, t);
            unitarity = std::max(unitarity, std::abs(std::abs(sol.s_matrix) - 1.0));
        }
    }
    report.checks.push_back(check("quartic.flux_form", flux, 1e-6));
    report.checks.push_back(check("quartic.elastic_unitarity", unitarity, 1e-6));
    return report;
}

void print_certify(std::ostream& os, const CertifyReport& report)
{
    char line[160];
    for (const auto& c : report.checks) {
        std::snprintf(line, sizeof line, "%-4s %-28s worst %.3e  threshold %.1e\n",
                      c.passed ? "PASS" : "FAIL", c.name.c_str(), c.worst, c.threshold);
        os << line;
    }
    os << (report.passed() ? "certification passed\n" : "certification FAILED\n");
}

} // namespace abscat::cli
