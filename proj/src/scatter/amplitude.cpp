#include "abscat/errors.hpp"
#include "abscat/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace abscat {

namespace {

constexpr double kPi = std::numbers::pi;

// into [-pi, pi]
double wrap_angle(double phi) { return std::remainder(phi, 2.0 * kPi); }

// S_m without the singular core
cplx aharonov_bohm_smatrix(double beta, int m)
{
    return m >= 1 ? std::polar(1.0, kPi * beta) : std::polar(1.0, -kPi * beta);
}

int default_tail_cutoff(double gamma)
{
    return std::max(20, static_cast<int>(std::ceil(10.0 * std::sqrt(1.0 + gamma * gamma))));
}

} // namespace

cplx aharonov_bohm_amplitude(double beta, double p, double phi)
{
    const double w = wrap_angle(phi);
    return std::polar(1.0 / std::sqrt(2.0 * kPi * p), -kPi / 4.0)
           * (-std::sin(kPi * beta) * std::polar(1.0, w / 2.0) / std::sin(w / 2.0));
}

cplx amplitude(const ScatteringConfig& cfg, const std::vector<ChannelSolution>& solutions,
               double phi, const AmplitudeOptions& options)
{
    cfg.validate();
    const double w = wrap_angle(phi);
    if (!std::isfinite(phi) || std::abs(w) < options.phi_min) {
        throw ForwardDirectionError("amplitude requested at phi = " + std::to_string(phi)
                                    + ", inside the forward exclusion cone");
    }

    std::map<int, const ChannelSolution*> by_mode;
    for (const auto& s : solutions) {
        by_mode[s.mode.m] = &s;
    }
    if (auto range = non_regular_range(cfg)) {
        for (int m = range->first; m <= range->second; ++m) {
            if (!by_mode.contains(m)) {
                throw IncompleteRangeError("no channel solution for non-Regular mode m = "
                                           + std::to_string(m));
            }
        }
    }

    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    if (!options.resum_tail) {
        cplx sum = 0.0;
        for (const auto& [m, s] : by_mode) {
            sum += s->f_coeff * std::polar(1.0, m * w);
        }
        return norm * sum;
    }

    // explicit modes out to |m - beta| <= cutoff; deviations from the pure-AB
    // partial amplitudes only
    const int cutoff = options.tail_cutoff > 0 ? options.tail_cutoff : default_tail_cutoff(cfg.gamma);
    int lo = static_cast<int>(std::ceil(cfg.beta - cutoff));
    int hi = static_cast<int>(std::floor(cfg.beta + cutoff));
    if (!by_mode.empty()) {
        lo = std::min(lo, by_mode.begin()->first);
        hi = std::max(hi, by_mode.rbegin()->first);
    }

    const cplx prefactor = std::polar(1.0 / std::sqrt(cfg.p), -kPi / 4.0);
    cplx sum = 0.0;
    for (int m = lo; m <= hi; ++m) {
        cplx s;
        if (auto it = by_mode.find(m); it != by_mode.end()) {
            s = it->second->s_matrix;
        }
        else {
            const PartialMode mode = classify_mode(cfg, m);
            if (mode.regime != Regime::Regular) {
                throw IncompleteRangeError("no channel solution for non-Regular mode m = "
                                           + std::to_string(m));
            }
            s = smatrix_from_ratio(mode, 1.0);
        }
        const cplx delta = s - aharonov_bohm_smatrix(cfg.beta, m);
        if (delta != 0.0) {
            sum += delta * std::polar(1.0, m * w);
        }
    }
    return aharonov_bohm_amplitude(cfg.beta, cfg.p, w) + norm * prefactor * sum;
}

CrossSectionReport cross_sections(const ScatteringConfig& cfg, const ModelSchedule& schedule,
                                  std::pair<int, int> m_range,
                                  const std::vector<double>& phi_samples,
                                  const AmplitudeOptions& options)
{
    cfg.validate();
    if (m_range.first > m_range.second) {
        throw IncompleteRangeError("empty mode range");
    }
    if (auto needed = non_regular_range(cfg)) {
        if (needed->first < m_range.first || needed->second > m_range.second) {
            throw IncompleteRangeError("mode range [" + std::to_string(m_range.first) + ", "
                                       + std::to_string(m_range.second)
                                       + "] misses non-Regular modes in ["
                                       + std::to_string(needed->first) + ", "
                                       + std::to_string(needed->second) + "]");
        }
    }

    std::vector<ChannelSolution> channels;
    for (int m = m_range.first; m <= m_range.second; ++m) {
        const PartialMode mode = classify_mode(cfg, m);
        if (mode.regime == Regime::Regular) {
            channels.push_back(make_channel(cfg, mode, 0.5, 0.5));
            continue;
        }
        const BoundaryModel* model = schedule.lookup(mode);
        if (model == nullptr) {
            throw ModelRegimeMismatch("no boundary model assigned to " + to_string(mode.regime)
                                      + " mode m = " + std::to_string(m));
        }
        channels.push_back(solve_channel(cfg, mode, *model));
    }
    return assemble_report(cfg, std::move(channels), m_range, phi_samples, options);
}

CrossSectionReport assemble_report(const ScatteringConfig& cfg,
                                   std::vector<ChannelSolution> channels,
                                   std::pair<int, int> m_range,
                                   const std::vector<double>& phi_samples,
                                   const AmplitudeOptions& options)
{
    CrossSectionReport report;
    report.mode_range = m_range;
    std::sort(channels.begin(), channels.end(),
              [](const ChannelSolution& x, const ChannelSolution& y) { return x.mode.m < y.mode.m; });
    report.channels = std::move(channels);
    for (const auto& sol : report.channels) {
        report.partial_abs[sol.mode.m] = sol.sigma_abs;
    }
    // ascending m: fixed summation order
    for (const auto& [m, sigma] : report.partial_abs) {
        report.total_abs += sigma;
    }
    for (double phi : phi_samples) {
        const cplx f = amplitude(cfg, report.channels, phi, options);
        report.differential_elastic.emplace_back(phi, std::norm(f));
    }
    return report;
}

CrossSectionReport cross_sections(const ScatteringConfig& cfg, const BoundaryModel& model,
                                  std::pair<int, int> m_range,
                                  const std::vector<double>& phi_samples,
                                  const AmplitudeOptions& options)
{
    return cross_sections(cfg, ModelSchedule(model), m_range, phi_samples, options);
}

} // namespace abscat
