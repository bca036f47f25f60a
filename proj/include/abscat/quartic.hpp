#pragma once
//! \file quartic.hpp
//! Aharonov-Bohm flux line with a polarization core U = -kappa^2 / rho^4:
//!   R'' + R'/rho - (m - beta)^2 R / rho^2 + lambda^2 R / rho^4 + p^2 R = 0,
//! lambda^2 = 2 M kappa^2. With rho = rho0 e^x, rho0 = sqrt(lambda / p) this
//! is the modified Mathieu equation R_xx = (a - 2 q cosh 2x) R with
//! a = (m - beta)^2, q = p lambda.
//!
//! Instead of Mathieu functions the channel is connected numerically:
//!   R3, R4 ~ H1, H2 of order nu = |m - beta| at argument lambda / rho
//!            (R3 ingoing towards rho = 0, R4 = conj R3),
//!   R1, R2 ~ H1, H2 of order nu at argument p rho (R1 outgoing at infinity),
//! both with their first WKB correction, and the connection matrix T maps
//! small-rho coefficients (c3, c4) to large-rho coefficients (c1, c2).

#include "abscat/scatter.hpp"

#include <array>
#include <utility>
#include <variant>

namespace abscat::quartic {

struct QuarticConfig {
    double beta = 0.0;
    double lambda = 1.0; //!< lambda^2 = 2 M kappa^2
    double p = 1.0;
    double mass = 0.5;

    void validate() const;
    double rho0() const;
    double q() const { return p * lambda; }
    bool operator==(const QuarticConfig&) const = default;
};

//! T[i][j]: row i in {c1, c2}, column j in {c3, c4}.
struct ConnectionMatrix {
    std::array<std::array<cplx, 2>, 2> t{};
    double rho_start = 0.0; //!< where the small-rho asymptote was imposed
    double fit_residual = 0.0;

    //! max |T^+ diag(1,-1) T + diag(1,-1)| / max|T_ij|^2: zero when the map
    //! carries the conserved flux |c4|^2 - |c3|^2 into |c1|^2 - |c2|^2.
    double flux_form_defect() const;
    //! max of |T12 - conj(T21)| and |T22 - conj(T11)| relative to max|T_ij|;
    //! zero for a real radial equation.
    double conjugation_defect() const;
};

struct ConnectionOptions {
    double fit_lo = 200.0; //!< large-rho fit window [fit_lo, fit_hi] / p
    double fit_hi = 400.0;
    int points_per_wavelength = 32;
    //! Upper bound on the step in ln(rho) (0: free); for refinement studies.
    double max_step = 0.0;
};

//! Small-rho start t = lambda / rho: max(50, 2 (q^2 / tol)^{1/4}) capped at
//! 1e4, where the neglected WKB terms fall below tol.
double start_argument(const QuarticConfig& cfg, double tol);

//! Integrates R3 and R4 from the small-rho asymptote through the large-rho
//! window and fits (c1, c2). tol is the integrator's local tolerance.
//! Throws RangeError for tol < 1e-10 or q so large that the window overlaps
//! the start point; StiffnessError and FitDegenerateError propagate.
ConnectionMatrix connection_matrix(const QuarticConfig& cfg, int m, double tol,
                                   const ConnectionOptions& options = {});

//! Inverse connection: integrates R1 and R2 inwards from fit_hi / p to the
//! small-rho start and matches (c3, c4) there. inverse * T = identity.
std::array<std::array<cplx, 2>, 2> inverse_connection(const QuarticConfig& cfg, int m, double tol,
                                                       const ConnectionMatrix& forward,
                                                       const ConnectionOptions& options = {});

struct Elastic {
    double theta = 0.0; //!< R = e^{-i theta} R3 + e^{i theta} R4
    bool operator==(const Elastic&) const = default;
};
//! Core phase whose zero-energy solution e^{-i theta} H1_nu(lambda/rho) +
//! e^{i theta} H2_nu(lambda/rho) grows like rho^{+nu} outside the core:
//! -pi nu (J_{-nu}) for non-integer nu, 0 for nu = 0 (J_0) and pi/2 (Y_n)
//! for integer nu >= 1. With this phase the elastic S_m tends to the pure
//! AB value as lambda -> 0; any other phase leaves a zero-range remnant.
double regular_core_phase(const QuarticConfig& cfg, int m);

struct Sink {
    bool operator==(const Sink&) const = default;
};
struct TotalAbsorption {
    bool operator==(const TotalAbsorption&) const = default;
};
using QuarticModel = std::variant<Elastic, Sink, TotalAbsorption>;

std::string describe(const QuarticModel& model);

//! Mode record for the quartic channel: regime InverseQuartic, nu^2 = a.
PartialMode quartic_mode(const QuarticConfig& cfg, int m);

//! S_m = exp(i pi (m - |m - beta|)) c1 / c2 for the model's small-rho
//! combination. a = c1 / c2, b = 1 in the returned solution.
ChannelSolution quartic_smatrix(const QuarticConfig& cfg, int m, const QuarticModel& model,
                                const ConnectionMatrix& connection);
ChannelSolution quartic_smatrix(const QuarticConfig& cfg, int m, const QuarticModel& model,
                                double tol = 1e-10);

//! 1 - |S_m|^2 of the sink, i.e. 1 / |T21|^2.
double capture_probability(const ConnectionMatrix& connection);

//! model_inner for |m| <= m_abs, model_outer otherwise.
struct QuarticSchedule {
    int m_abs = 0;
    QuarticModel inner;
    QuarticModel outer;
    const QuarticModel& operator()(int m) const;
    bool operator==(const QuarticSchedule&) const = default;
};

QuarticSchedule model_schedule(const QuarticConfig& cfg, int m_abs, QuarticModel model_inner,
                               QuarticModel model_outer);

//! Solves m_range (inclusive) and assembles the report; the differential
//! cross section uses the AB tail outside m_range.
CrossSectionReport quartic_cross_sections(const QuarticConfig& cfg, const QuarticSchedule& schedule,
                                          std::pair<int, int> m_range,
                                          const std::vector<double>& phi_samples = {},
                                          double tol = 1e-10);

} // namespace abscat::quartic
