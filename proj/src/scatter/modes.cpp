#include "abscat/errors.hpp"
#include "abscat/scatter.hpp"

#include <cmath>
#include <sstream>

namespace abscat {

namespace {

constexpr double kCriticalWindow = 1e-9;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void ScatteringConfig::validate() const
{
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw ConfigError("beta must lie in [0, 1), got " + fmt(beta));
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("gamma must be finite and >= 0, got " + fmt(gamma));
    }
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw ConfigError("p must be finite and > 0, got " + fmt(p));
    }
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw ConfigError("mass must be finite and > 0, got " + fmt(mass));
    }
}

std::string to_string(Regime regime)
{
    switch (regime) {
    case Regime::Regular: return "Regular";
    case Regime::Subcritical: return "Subcritical";
    case Regime::Supercritical: return "Supercritical";
    case Regime::InverseQuartic: return "InverseQuartic";
    }
    return "?";
}

specfun::Order PartialMode::order() const
{
    return regime == Regime::Supercritical ? specfun::Order::imaginary(mu)
                                           : specfun::Order::real(mu);
}

PartialMode classify_mode(const ScatteringConfig& cfg, int m)
{
    cfg.validate();
    const double d = std::abs(m - cfg.beta);
    const double s = std::sqrt(1.0 + cfg.gamma * cfg.gamma);

    PartialMode mode;
    mode.m = m;
    mode.nu_squared = (d - cfg.gamma) * (d + cfg.gamma);
    mode.mu = std::sqrt(std::abs(mode.nu_squared));

    // free s-wave: J_0 with no singular core to select anything else
    if (cfg.gamma == 0.0 && d == 0.0) {
        mode.regime = Regime::Regular;
        return mode;
    }
    if (cfg.gamma > 0.0 && std::abs(d - cfg.gamma) < kCriticalWindow) {
        throw DegenerateModeError("mode m = " + std::to_string(m)
                                  + " is critical: |m - beta| = gamma (mu = 0)");
    }
    if (d == s) {
        // mu = 1: rho^-1 is not square integrable, the solution is unique
        mode.regime = Regime::Regular;
        return mode;
    }
    if (std::abs(d - s) < kCriticalWindow) {
        throw DegenerateModeError("mode m = " + std::to_string(m)
                                  + " is critical: |m - beta| = sqrt(1 + gamma^2)");
    }
    if (d > s) {
        mode.regime = Regime::Regular;
    }
    else if (d > cfg.gamma) {
        mode.regime = Regime::Subcritical;
    }
    else {
        mode.regime = Regime::Supercritical;
    }
    return mode;
}

std::optional<std::pair<int, int>> non_regular_range(const ScatteringConfig& cfg)
{
    cfg.validate();
    const double s = std::sqrt(1.0 + cfg.gamma * cfg.gamma);
    int lo = static_cast<int>(std::floor(cfg.beta - s)) + 1;
    int hi = static_cast<int>(std::ceil(cfg.beta + s)) - 1;
    auto regular = [&](int m) {
        const double d = std::abs(m - cfg.beta);
        return (cfg.gamma == 0.0 && d == 0.0) || d >= s;
    };
    while (lo <= hi && regular(lo)) {
        ++lo;
    }
    while (hi >= lo && regular(hi)) {
        --hi;
    }
    if (lo > hi) {
        return std::nullopt;
    }
    return std::pair{lo, hi};
}

std::string describe(const BoundaryModel& model)
{
    struct Visitor {
        std::string operator()(const model::ElasticSubcritical& v) const
        {
            return "elastic_subcritical(l=" + fmt(v.l) + ")";
        }
        std::string operator()(const model::ElasticSupercritical& v) const
        {
            return "elastic_supercritical(theta=" + fmt(v.theta) + ")";
        }
        std::string operator()(const model::Sink&) const { return "sink"; }
        std::string operator()(const model::TotalAbsorption& v) const
        {
            return "total_absorption[" + std::to_string(v.lo) + "," + std::to_string(v.hi) + "]";
        }
        std::string operator()(const model::Custom& v) const
        {
            return "custom(ratio=" + fmt(v.ratio.real()) + (v.ratio.imag() < 0 ? "" : "+")
                   + fmt(v.ratio.imag()) + "i)";
        }
    };
    return std::visit(Visitor{}, model);
}

ModelSchedule::ModelSchedule(BoundaryModel all) : subcritical_(all), supercritical_(all) {}

ModelSchedule& ModelSchedule::set_default(Regime regime, BoundaryModel model)
{
    switch (regime) {
    case Regime::Subcritical: subcritical_ = std::move(model); break;
    case Regime::Supercritical: supercritical_ = std::move(model); break;
    default:
        throw ModelRegimeMismatch("defaults exist only for Subcritical and Supercritical modes");
    }
    return *this;
}

ModelSchedule& ModelSchedule::set_mode(int m, BoundaryModel model)
{
    per_mode_.insert_or_assign(m, std::move(model));
    return *this;
}

const BoundaryModel* ModelSchedule::lookup(const PartialMode& mode) const
{
    if (auto it = per_mode_.find(mode.m); it != per_mode_.end()) {
        return &it->second;
    }
    if (mode.regime == Regime::Subcritical && subcritical_) {
        return &*subcritical_;
    }
    if (mode.regime == Regime::Supercritical && supercritical_) {
        return &*supercritical_;
    }
    return nullptr;
}

} // namespace abscat
