#include "abscat/errors.hpp"
#include "abscat/scatter.hpp"

#include <cmath>
#include <numbers>

namespace abscat {

namespace {

constexpr double kPi = std::numbers::pi;

double parity(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// exp(i pi (m - mu))
cplx regular_phase(int m, double mu)
{
    return parity(m) * std::polar(1.0, -kPi * mu);
}

void require_regime(const PartialMode& mode, Regime regime, const char* model)
{
    if (mode.regime != regime) {
        throw ModelRegimeMismatch(std::string(model) + " model does not apply to "
                                  + to_string(mode.regime) + " mode m = "
                                  + std::to_string(mode.m));
    }
}

void require_singular(const PartialMode& mode, const char* model)
{
    if (mode.regime != Regime::Subcritical && mode.regime != Regime::Supercritical) {
        throw ModelRegimeMismatch(std::string(model) + " model does not apply to "
                                  + to_string(mode.regime) + " mode m = "
                                  + std::to_string(mode.m));
    }
}

// (p/2)^{nu} / Gamma(1 + nu) for nu = s * order
cplx leading_coefficient(const PartialMode& mode, double p, double s)
{
    const cplx nu = s * mode.order().nu();
    return std::exp(nu * std::log(p / 2.0)) / specfun::complex_gamma(1.0 + nu);
}

} // namespace

cplx smatrix_from_ratio(const PartialMode& mode, cplx ratio)
{
    switch (mode.regime) {
    case Regime::Subcritical: return regular_phase(mode.m, mode.mu) * ratio;
    case Regime::Supercritical: return parity(mode.m) * std::exp(kPi * mode.mu) * ratio;
    case Regime::Regular: return regular_phase(mode.m, mode.mu);
    default: break;
    }
    throw ModelRegimeMismatch("no S-matrix rule for " + to_string(mode.regime) + " modes");
}

ChannelSolution make_channel(const ScatteringConfig& cfg, const PartialMode& mode, cplx a,
                             cplx b)
{
    ChannelSolution sol;
    sol.mode = mode;
    if (mode.regime == Regime::Regular) {
        sol.a = 0.5;
        sol.b = 0.5;
        sol.s_matrix = regular_phase(mode.m, mode.mu);
        sol.sigma_abs = 0.0;
    }
    else {
        if (b == 0.0) {
            throw UnitarityViolation("mode m = " + std::to_string(mode.m)
                                     + " has no ingoing wave (b = 0)");
        }
        sol.a = a;
        sol.b = b;
        const cplx ratio = a / b;
        sol.s_matrix = smatrix_from_ratio(mode, ratio);
        const double w = std::norm(ratio);
        const double gain = mode.regime == Regime::Supercritical ? std::exp(2.0 * kPi * mode.mu) : 1.0;
        sol.sigma_abs = (1.0 - gain * w) / cfg.p;
    }
    if (sol.s_matrix != 0.0) {
        sol.delta = std::log(sol.s_matrix) / cplx(0.0, 2.0);
    }
    sol.f_coeff = std::polar(1.0, -kPi / 4.0) * (sol.s_matrix - std::cos(kPi * cfg.beta))
                  / std::sqrt(cfg.p);
    return sol;
}

cplx elastic_subcritical_ratio(const ScatteringConfig& cfg, const PartialMode& mode, double l)
{
    require_regime(mode, Regime::Subcritical, "ElasticSubcritical");
    if (!std::isfinite(l)) {
        throw ConfigError("elastic parameter l must be finite");
    }
    // a H1 + b H2 ~ (a - b) J_-mu - (a e^{-i mu pi} - b e^{i mu pi}) J_mu
    const cplx g = leading_coefficient(mode, cfg.p, -1.0);
    const cplx h = leading_coefficient(mode, cfg.p, 1.0);
    const cplx lh = l * h;
    const cplx ratio = (g + lh * std::polar(1.0, kPi * mode.mu))
                       / (g + lh * std::polar(1.0, -kPi * mode.mu));
    // |ratio| = 1 analytically; drop the rounding excess
    return ratio / std::abs(ratio);
}

cplx elastic_supercritical_ratio(const ScatteringConfig& cfg, const PartialMode& mode,
                                 double theta)
{
    require_regime(mode, Regime::Supercritical, "ElasticSupercritical");
    if (!std::isfinite(theta)) {
        throw ConfigError("elastic phase theta must be finite");
    }
    const cplx g = leading_coefficient(mode, cfg.p, -1.0);
    const cplx h = leading_coefficient(mode, cfg.p, 1.0);
    const cplx eh = std::polar(1.0, theta) * h;
    const double e = std::exp(-kPi * mode.mu);
    const cplx ratio = (g + eh * e) / (g + eh / e);
    // |ratio| = exp(-pi mu) analytically
    return ratio * (e / std::abs(ratio));
}

cplx elastic_supercritical_smatrix(const ScatteringConfig& cfg, const PartialMode& mode,
                                   double theta)
{
    return smatrix_from_ratio(mode, elastic_supercritical_ratio(cfg, mode, theta));
}

ChannelSolution solve_channel(const ScatteringConfig& cfg, const PartialMode& mode,
                              const BoundaryModel& model)
{
    cfg.validate();
    if (mode.regime == Regime::Regular) {
        return make_channel(cfg, mode, 0.5, 0.5);
    }

    struct Visitor {
        const ScatteringConfig& cfg;
        const PartialMode& mode;

        ChannelSolution operator()(const model::ElasticSubcritical& v) const
        {
            auto sol = make_channel(cfg, mode, elastic_subcritical_ratio(cfg, mode, v.l));
            sol.sigma_abs = 0.0;
            return sol;
        }
        ChannelSolution operator()(const model::ElasticSupercritical& v) const
        {
            auto sol = make_channel(cfg, mode, elastic_supercritical_ratio(cfg, mode, v.theta));
            sol.sigma_abs = 0.0;
            return sol;
        }
        ChannelSolution operator()(const model::Sink&) const
        {
            require_regime(mode, Regime::Supercritical, "Sink");
            // J_{-i mu}: a e^{pi mu} = b e^{-pi mu}
            auto sol = make_channel(cfg, mode, std::exp(-2.0 * kPi * mode.mu));
            sol.sigma_abs = -std::expm1(-2.0 * kPi * mode.mu) / cfg.p;
            return sol;
        }
        ChannelSolution operator()(const model::TotalAbsorption& v) const
        {
            require_singular(mode, "TotalAbsorption");
            if (!v.contains(mode.m)) {
                throw ModelRegimeMismatch("mode m = " + std::to_string(mode.m)
                                          + " lies outside the absorption window");
            }
            auto sol = make_channel(cfg, mode, 0.0);
            sol.sigma_abs = 1.0 / cfg.p;
            return sol;
        }
        ChannelSolution operator()(const model::Custom& v) const
        {
            require_singular(mode, "Custom");
            auto sol = make_channel(cfg, mode, v.ratio);
            if (!std::isfinite(std::abs(sol.s_matrix)) || std::abs(sol.s_matrix) > 1.0) {
                throw UnitarityViolation("custom ratio gives |S_m| = "
                                         + std::to_string(std::abs(sol.s_matrix))
                                         + " > 1 for mode m = " + std::to_string(mode.m));
            }
            return sol;
        }
    };
    return std::visit(Visitor{cfg, mode}, model);
}

double partial_current(const ScatteringConfig& cfg, const PartialMode& mode, cplx a, cplx b,
                       double rho)
{
    cfg.validate();
    if (!(rho > 0.0)) {
        throw RangeError("current requires rho > 0");
    }
    const double scale = 2.0 / (kPi * cfg.mass * rho);
    switch (mode.regime) {
    case Regime::Regular: return 0.0;
    case Regime::Subcritical: return scale * (std::norm(a) - std::norm(b));
    case Regime::Supercritical: {
        const double e = std::exp(kPi * mode.mu);
        return scale * (std::norm(a) * e - std::norm(b) / e);
    }
    default: break;
    }
    throw ModelRegimeMismatch("no closed-form current for " + to_string(mode.regime) + " modes");
}

double flux_normalization(const PartialMode& mode, cplx b)
{
    const double base = 1.0 / (4.0 * std::norm(b));
    switch (mode.regime) {
    case Regime::Subcritical: return base;
    case Regime::Supercritical: return base * std::exp(kPi * mode.mu);
    default: break;
    }
    throw ModelRegimeMismatch("no flux normalization for " + to_string(mode.regime) + " modes");
}

} // namespace abscat
