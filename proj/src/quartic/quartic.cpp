#include "abscat/quartic.hpp"

#include "abscat/errors.hpp"
#include "abscat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace abscat::quartic {

namespace {

constexpr double kPi = std::numbers::pi;

using specfun::HankelKind;

struct Sample {
    cplx value;
    cplx derivative; // d/drho
};

// H_nu^{(1,2)}(s) exp(-+ i q^2 / (6 s^3)) (1 - q^2 / (4 s^4)), s = arg(rho),
// with ds/drho = dsdrho.
Sample corrected_hankel(HankelKind kind, double nu, double q, double s, double dsdrho)
{
    const double sign = kind == HankelKind::First ? 1.0 : -1.0;
    const auto h = specfun::hankel_with_derivative(kind, specfun::Order::real(nu), s);
    const double q2 = q * q;
    const double s3 = s * s * s;
    const double s4 = s3 * s;
    const cplx phase = std::polar(1.0, -sign * q2 / (6.0 * s3));
    const double amp = 1.0 - q2 / (4.0 * s4);
    const cplx g = phase * amp;
    const cplx dg = phase * (cplx(0.0, sign * q2 / (2.0 * s4)) * amp + q2 / (s4 * s));
    return {h.value * g, (h.derivative * g + h.value * dg) * dsdrho};
}

// R3 (kind First) / R4 (Second) near the line
Sample small_basis(HankelKind kind, const QuarticConfig& cfg, double nu, double rho)
{
    const double s = cfg.lambda / rho;
    return corrected_hankel(kind, nu, cfg.q(), s, -s / rho);
}

// R1 (First) / R2 (Second) far out
Sample large_basis(HankelKind kind, const QuarticConfig& cfg, double nu, double rho)
{
    return corrected_hankel(kind, nu, cfg.q(), cfg.p * rho, cfg.p);
}

double order_of(const QuarticConfig& cfg, int m) { return std::abs(m - cfg.beta); }

std::function<long double(long double)> quartic_q(const QuarticConfig& cfg, double nu)
{
    const long double a = static_cast<long double>(nu) * nu;
    const long double l2 = static_cast<long double>(cfg.lambda) * cfg.lambda;
    const long double p2 = static_cast<long double>(cfg.p) * cfg.p;
    return [a, l2, p2](long double t) {
        return a - l2 * std::exp(-2.0L * t) - p2 * std::exp(2.0L * t);
    };
}

std::vector<double> window(const QuarticConfig& cfg, const ConnectionOptions& options)
{
    const double lo = options.fit_lo / cfg.p;
    const double hi = options.fit_hi / cfg.p;
    const double wavelength = 2.0 * kPi / cfg.p;
    const int n = static_cast<int>(std::ceil((hi - lo) / wavelength * options.points_per_wavelength));
    std::vector<double> w;
    for (int i = 0; i <= n; ++i) {
        w.push_back(lo + (hi - lo) * i / n);
    }
    return w;
}

void check_tolerance(double tol)
{
    if (!(tol >= 1e-10 * (1.0 - 1e-12)) || !(tol < 1.0)) {
        throw RangeError("connection tolerance must lie in [1e-10, 1)");
    }
}

double max_abs(const ConnectionMatrix& c)
{
    double m = 0.0;
    for (const auto& row : c.t) {
        for (const auto& v : row) {
            m = std::max(m, std::abs(v));
        }
    }
    return m;
}

} // namespace

void QuarticConfig::validate() const
{
    ScatteringConfig{beta, 0.0, p, mass}.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("lambda must be finite and > 0");
    }
}

double QuarticConfig::rho0() const { return std::sqrt(lambda / p); }

double ConnectionMatrix::flux_form_defect() const
{
    // T^+ eta T with eta = diag(1, -1) must equal -eta
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const cplx g = std::conj(t[0][i]) * t[0][j] - std::conj(t[1][i]) * t[1][j];
            const cplx target = i != j ? 0.0 : (i == 0 ? -1.0 : 1.0);
            worst = std::max(worst, std::abs(g - target));
        }
    }
    const double scale = max_abs(*this);
    return worst / std::max(1.0, scale * scale);
}

double ConnectionMatrix::conjugation_defect() const
{
    const double d = std::max(std::abs(t[0][1] - std::conj(t[1][0])),
                              std::abs(t[1][1] - std::conj(t[0][0])));
    return d / max_abs(*this);
}

double start_argument(const QuarticConfig& cfg, double tol)
{
    const double q = cfg.q();
    return std::min(1e4, std::max(50.0, 2.0 * std::pow(q * q / tol, 0.25)));
}

ConnectionMatrix connection_matrix(const QuarticConfig& cfg, int m, double tol,
                                   const ConnectionOptions& options)
{
    cfg.validate();
    check_tolerance(tol);
    const double nu = order_of(cfg, m);
    const double rho_start = cfg.lambda / start_argument(cfg, tol);
    const auto fit_rho = window(cfg, options);
    if (!(rho_start < fit_rho.front())) {
        throw RangeError("q = " + std::to_string(cfg.q())
                         + " too large: small-rho start lies beyond the fit window");
    }

    std::vector<double> grid{rho_start};
    grid.insert(grid.end(), fit_rho.begin(), fit_rho.end());

    std::vector<cplx> r1, r2;
    for (double rho : fit_rho) {
        r1.push_back(large_basis(HankelKind::First, cfg, nu, rho).value);
        r2.push_back(large_basis(HankelKind::Second, cfg, nu, rho).value);
    }

    const auto q = quartic_q(cfg, nu);
    ConnectionMatrix out;
    out.rho_start = rho_start;
    int column = 0;
    for (HankelKind kind : {HankelKind::First, HankelKind::Second}) {
        const Sample s = small_basis(kind, cfg, nu, rho_start);
        const auto profile = oracle::integrate_log_radial(q, {rho_start, s.value, s.derivative},
                                                          grid, tol, options.max_step);
        const std::vector<cplx> y(profile.values.begin() + 1, profile.values.end());
        const auto fit = oracle::fit_two(r1, r2, y);
        out.t[0][column] = fit.c1;
        out.t[1][column] = fit.c2;
        out.fit_residual = std::max(out.fit_residual, fit.residual);
        ++column;
    }
    return out;
}

std::array<std::array<cplx, 2>, 2> inverse_connection(const QuarticConfig& cfg, int m, double tol,
                                                       const ConnectionMatrix& forward,
                                                       const ConnectionOptions& options)
{
    cfg.validate();
    check_tolerance(tol);
    const double nu = order_of(cfg, m);
    const double rho_end = options.fit_hi / cfg.p;
    const double rho_start = forward.rho_start;

    const Sample s3 = small_basis(HankelKind::First, cfg, nu, rho_start);
    const Sample s4 = small_basis(HankelKind::Second, cfg, nu, rho_start);
    const cplx det = s3.value * s4.derivative - s3.derivative * s4.value;

    const auto q = quartic_q(cfg, nu);
    std::array<std::array<cplx, 2>, 2> u{};
    int column = 0;
    for (HankelKind kind : {HankelKind::First, HankelKind::Second}) {
        const Sample s = large_basis(kind, cfg, nu, rho_end);
        const auto profile = oracle::integrate_log_radial(
            q, {rho_end, s.value, s.derivative}, {rho_end, rho_start}, tol, options.max_step);
        const cplx v = profile.values.back();
        const cplx dv = profile.derivatives.back();
        u[0][column] = (v * s4.derivative - dv * s4.value) / det;
        u[1][column] = (s3.value * dv - s3.derivative * v) / det;
        ++column;
    }
    return u;
}

std::string describe(const QuarticModel& model)
{
    struct Visitor {
        std::string operator()(const Elastic& e) const
        {
            std::ostringstream os;
            os.precision(17);
            os << "elastic(theta=" << e.theta << ")";
            return os.str();
        }
        std::string operator()(const Sink&) const { return "sink"; }
        std::string operator()(const TotalAbsorption&) const { return "total_absorption"; }
    };
    return std::visit(Visitor{}, model);
}

PartialMode quartic_mode(const QuarticConfig& cfg, int m)
{
    cfg.validate();
    PartialMode mode;
    mode.m = m;
    mode.mu = order_of(cfg, m);
    mode.nu_squared = mode.mu * mode.mu;
    mode.regime = Regime::InverseQuartic;
    return mode;
}

ChannelSolution quartic_smatrix(const QuarticConfig& cfg, int m, const QuarticModel& model,
                                const ConnectionMatrix& connection)
{
    const PartialMode mode = quartic_mode(cfg, m);
    const auto& t = connection.t;
    cplx c1 = 0.0;
    cplx c2 = 1.0;
    if (const auto* e = std::get_if<Elastic>(&model)) {
        const cplx w = std::polar(1.0, -e->theta);
        c1 = w * t[0][0] + std::conj(w) * t[0][1];
        c2 = w * t[1][0] + std::conj(w) * t[1][1];
    }
    else if (std::holds_alternative<Sink>(model)) {
        c1 = t[0][0];
        c2 = t[1][0];
    }
    if (c2 == 0.0) {
        throw FitDegenerateError("no ingoing wave at large rho for mode m = " + std::to_string(m));
    }

    ChannelSolution sol;
    sol.mode = mode;
    sol.a = c1 / c2;
    sol.b = 1.0;
    const cplx phase = (m % 2 == 0 ? 1.0 : -1.0) * std::polar(1.0, -kPi * mode.mu);
    sol.s_matrix = phase * sol.a;
    // elastic cores absorb nothing by construction; |S| - 1 stays visible in s_matrix
    sol.sigma_abs = std::holds_alternative<Elastic>(model) ? 0.0 : (1.0 - std::norm(sol.s_matrix)) / cfg.p;
    if (sol.s_matrix != 0.0) {
        sol.delta = std::log(sol.s_matrix) / cplx(0.0, 2.0);
    }
    sol.f_coeff = std::polar(1.0, -kPi / 4.0) * (sol.s_matrix - std::cos(kPi * cfg.beta))
                  / std::sqrt(cfg.p);
    return sol;
}

ChannelSolution quartic_smatrix(const QuarticConfig& cfg, int m, const QuarticModel& model,
                                double tol)
{
    if (std::holds_alternative<TotalAbsorption>(model)) {
        return quartic_smatrix(cfg, m, model, ConnectionMatrix{});
    }
    return quartic_smatrix(cfg, m, model, connection_matrix(cfg, m, tol));
}

double capture_probability(const ConnectionMatrix& connection)
{
    return 1.0 / std::norm(connection.t[1][0]);
}

const QuarticModel& QuarticSchedule::operator()(int m) const
{
    return std::abs(m) <= m_abs ? inner : outer;
}

QuarticSchedule model_schedule(const QuarticConfig& cfg, int m_abs, QuarticModel model_inner,
                               QuarticModel model_outer)
{
    cfg.validate();
    if (m_abs < 0) {
        throw ConfigError("m_abs must be >= 0");
    }
    return {m_abs, std::move(model_inner), std::move(model_outer)};
}

CrossSectionReport quartic_cross_sections(const QuarticConfig& cfg, const QuarticSchedule& schedule,
                                          std::pair<int, int> m_range,
                                          const std::vector<double>& phi_samples, double tol)
{
    cfg.validate();
    if (m_range.first > m_range.second) {
        throw IncompleteRangeError("empty mode range");
    }
    std::vector<ChannelSolution> channels;
    for (int m = m_range.first; m <= m_range.second; ++m) {
        channels.push_back(quartic_smatrix(cfg, m, schedule(m), tol));
    }
    // outside m_range the quartic core is negligible: pure AB tail
    return assemble_report({cfg.beta, 0.0, cfg.p, cfg.mass}, std::move(channels), m_range,
                           phi_samples);
}

double regular_core_phase(const QuarticConfig& cfg, int m)
{
    const double nu = std::abs(m - cfg.beta);
    const double n = std::round(nu);
    if (std::abs(nu - n) < 1e-12) {
        return n == 0.0 ? 0.0 : kPi / 2.0;
    }
    return -kPi * nu;
}

} // namespace abscat::quartic
