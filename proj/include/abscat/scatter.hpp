#pragma once
//! \file scatter.hpp
//! Partial-wave channels of the Aharonov-Bohm flux line with an attractive
//! inverse-square core, U = -kappa^2 / rho^2.
//!
//! Conventions used throughout the library:
//!   - time dependence exp(-iEt): H1 ~ exp(+i p rho) is outgoing;
//!   - radial solutions are a H1_nu(p rho) + b H2_nu(p rho) with b = 1
//!     (Regular modes store a = b = 1/2, i.e. c = 1 in c J_mu);
//!   - S_m multiplies exp(i(p rho - pi/4)) against the incoming
//!     exp(i pi m) exp(-i(p rho - pi/4)), so the free plane wave has S_m = 1;
//!   - the AB-modified incident wave subtracts cos(pi beta), giving
//!     f_m = exp(-i pi/4) (S_m - cos(pi beta)) / sqrt(p) and
//!     f(phi) = (2 pi)^{-1/2} sum_m f_m exp(i m phi).
//!   - hbar = 1; the mass only enters the radial current j = Im(R* R') / M.

#include "abscat/specfun.hpp"

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace abscat {

using cplx = std::complex<double>;

struct ScatteringConfig {
    double beta = 0.0;  //!< flux in flux quanta, 0 <= beta < 1
    double gamma = 0.0; //!< coupling, gamma^2 = 2 M kappa^2
    double p = 1.0;     //!< wavenumber
    double mass = 0.5;  //!< hbar^2 / 2M = 1 by default

    //! Throws ConfigError on out-of-range values.
    void validate() const;
    bool operator==(const ScatteringConfig&) const = default;
};

enum class Regime {
    Regular,       //!< |m - beta| > sqrt(1 + gamma^2): unique solution
    Subcritical,   //!< gamma < |m - beta| < sqrt(1 + gamma^2)
    Supercritical, //!< |m - beta| < gamma: imaginary order, fall to center
    InverseQuartic //!< any mode of the rho^-4 core (see quartic.hpp)
};

std::string to_string(Regime regime);

struct PartialMode {
    int m = 0;
    double nu_squared = 0.0;
    double mu = 0.0; //!< sqrt(|nu^2|)
    Regime regime = Regime::Regular;

    //! Bessel order of the radial solutions (mu or i mu).
    specfun::Order order() const;
};

//! Classifies mode m. Throws DegenerateModeError for critical modes:
//! |m - beta| within 1e-9 of gamma (> 0), or within 1e-9 of sqrt(1+gamma^2)
//! without being equal to it. Exact equality with sqrt(1+gamma^2) (mu = 1)
//! and the free mode m = beta with gamma = 0 (mu = 0) are Regular.
PartialMode classify_mode(const ScatteringConfig& cfg, int m);

//! Smallest and largest m of the non-Regular modes; empty when all are
//! Regular.
std::optional<std::pair<int, int>> non_regular_range(const ScatteringConfig& cfg);

namespace model {

//! R -> rho^mu + l rho^-mu near the line (self-adjoint extension).
struct ElasticSubcritical {
    double l = 0.0;
    bool operator==(const ElasticSubcritical&) const = default;
};
//! R -> rho^{i mu} + exp(i theta) rho^{-i mu} near the line.
struct ElasticSupercritical {
    double theta = 0.0;
    bool operator==(const ElasticSupercritical&) const = default;
};
//! Only the ingoing wave rho^{-i mu} survives: R = c J_{-i mu}(p rho).
struct Sink {
    bool operator==(const Sink&) const = default;
};
//! S_m = 0 for lo <= m <= hi.
struct TotalAbsorption {
    int lo = 0;
    int hi = 0;
    bool contains(int m) const { return lo <= m && m <= hi; }
    bool operator==(const TotalAbsorption&) const = default;
};
//! Arbitrary a_m / b_m; must keep |S_m| <= 1.
struct Custom {
    cplx ratio;
    bool operator==(const Custom&) const = default;
};

} // namespace model

using BoundaryModel = std::variant<model::ElasticSubcritical, model::ElasticSupercritical,
                                   model::Sink, model::TotalAbsorption, model::Custom>;

std::string describe(const BoundaryModel& model);

//! Assignment of boundary models to modes: explicit per-mode entries first,
//! then a default per regime. Regular modes never consult the schedule.
class ModelSchedule {
  public:
    ModelSchedule() = default;
    //! The same model for every non-Regular mode.
    explicit ModelSchedule(BoundaryModel all);

    ModelSchedule& set_default(Regime regime, BoundaryModel model);
    ModelSchedule& set_mode(int m, BoundaryModel model);

    //! Model for this mode, or nullptr when none applies.
    const BoundaryModel* lookup(const PartialMode& mode) const;

    const std::optional<BoundaryModel>& subcritical_default() const { return subcritical_; }
    const std::optional<BoundaryModel>& supercritical_default() const { return supercritical_; }
    const std::map<int, BoundaryModel>& per_mode() const { return per_mode_; }

    bool operator==(const ModelSchedule&) const = default;

  private:
    std::optional<BoundaryModel> subcritical_;
    std::optional<BoundaryModel> supercritical_;
    std::map<int, BoundaryModel> per_mode_;
};

struct ChannelSolution {
    PartialMode mode;
    cplx a;           //!< coefficient of H1 (outgoing)
    cplx b{1.0, 0.0}; //!< coefficient of H2 (ingoing)
    cplx s_matrix;
    //! Complex phase shift, S = exp(2 i delta); empty when S = 0.
    std::optional<cplx> delta;
    double sigma_abs = 0.0;
    cplx f_coeff; //!< exp(-i pi/4) (S - cos pi beta) / sqrt(p)
};

//! Channel from arbitrary coefficients; only a/b enters S, sigma_abs and f.
//! Regular modes ignore a and b.
ChannelSolution make_channel(const ScatteringConfig& cfg, const PartialMode& mode, cplx a,
                             cplx b = 1.0);

//! Applies `model` to `mode`. Regular modes ignore the model.
//! Throws ModelRegimeMismatch when the model does not apply to the regime
//! (or TotalAbsorption is asked for a mode outside its window) and
//! UnitarityViolation for a Custom ratio with |S_m| > 1.
ChannelSolution solve_channel(const ScatteringConfig& cfg, const PartialMode& mode,
                              const BoundaryModel& model);

//! S_m of the self-adjoint extension with phase theta (Supercritical only).
cplx elastic_supercritical_smatrix(const ScatteringConfig& cfg, const PartialMode& mode,
                                   double theta);

//! Ratio a/b realising the elastic small-rho conditions. Exposed for the
//! oracle tests.
cplx elastic_subcritical_ratio(const ScatteringConfig& cfg, const PartialMode& mode, double l);
cplx elastic_supercritical_ratio(const ScatteringConfig& cfg, const PartialMode& mode,
                                 double theta);

//! S_m for a given a/b in the mode's regime.
cplx smatrix_from_ratio(const PartialMode& mode, cplx ratio);

//! Radial current j_m(rho) of a H1 + b H2; negative means net inflow.
//! Regular modes carry no current and return exactly zero.
double partial_current(const ScatteringConfig& cfg, const PartialMode& mode, cplx a, cplx b,
                       double rho);

//! Constant N with p sigma_abs = -N M (2 pi rho j_m) for the channel
//! a H1 + b H2: 1/(4|b|^2) below the critical coupling, exp(pi mu)/(4|b|^2)
//! above it.
double flux_normalization(const PartialMode& mode, cplx b);

struct AmplitudeOptions {
    double phi_min = 1e-3;
    //! Add the closed-form pure-AB amplitude and sum only the deviations
    //! from it, out to |m - beta| = tail_cutoff (0 selects
    //! max(20, ceil(10 sqrt(1 + gamma^2)))).
    bool resum_tail = true;
    int tail_cutoff = 0;
};

//! Closed-form pure-AB amplitude at angle phi (beta only; gamma = 0).
cplx aharonov_bohm_amplitude(double beta, double p, double phi);

//! f(phi). `solutions` must contain every non-Regular mode; Regular modes
//! absent from it are generated from cfg.
cplx amplitude(const ScatteringConfig& cfg, const std::vector<ChannelSolution>& solutions,
               double phi, const AmplitudeOptions& options = {});

struct CrossSectionReport {
    std::map<int, double> partial_abs;
    double total_abs = 0.0;
    //! (phi, d sigma / d phi) samples
    std::vector<std::pair<double, double>> differential_elastic;
    std::pair<int, int> mode_range{0, 0};
    std::vector<ChannelSolution> channels;
};

//! Report from already solved channels (ascending m): partial and total
//! absorption plus |f(phi)|^2 at phi_samples.
CrossSectionReport assemble_report(const ScatteringConfig& cfg,
                                   std::vector<ChannelSolution> channels,
                                   std::pair<int, int> m_range,
                                   const std::vector<double>& phi_samples = {},
                                   const AmplitudeOptions& options = {});

//! Solves every mode in m_range (inclusive) and assembles the report.
//! Throws IncompleteRangeError when a non-Regular mode is outside m_range.
CrossSectionReport cross_sections(const ScatteringConfig& cfg, const ModelSchedule& schedule,
                                  std::pair<int, int> m_range,
                                  const std::vector<double>& phi_samples = {},
                                  const AmplitudeOptions& options = {});

CrossSectionReport cross_sections(const ScatteringConfig& cfg, const BoundaryModel& model,
                                  std::pair<int, int> m_range,
                                  const std::vector<double>& phi_samples = {},
                                  const AmplitudeOptions& options = {});

} // namespace abscat
