#pragma once
//! \file oracle.hpp
//! Direct numerical solution of the radial equation
//!   R'' + R'/rho + (p^2 - nu^2/rho^2) R = 0
//! and least-squares matching of the result to its small- and large-rho
//! asymptotic forms. Used to cross-check the closed-form channels.
//!
//! The equation is integrated in t = ln(rho), where it reads
//! R_tt = (nu^2 - p^2 rho^2) R and rho * Im(R* R') = Im(R* R_t) is exactly
//! conserved. The integrator is the 7(8) Runge-Kutta-Fehlberg pair from
//! Boost.Odeint in extended precision with a norm-relative error test.

#include "abscat/scatter.hpp"

#include <functional>
#include <vector>

namespace abscat::oracle {

struct OracleOptions {
    double tau = 1e-13;          //!< relative local error per step
    //! Upper bound on the step in t = ln(rho); 0 leaves it free. Setting it
    //! below the adaptive step turns the integrator into a fixed grid, used
    //! for refinement studies.
    double max_step = 0.0;
    double rho_in_factor = 1e-4; //!< rho_in = rho_in_factor * min(1/p, 1)
    double small_window = 10.0;  //!< small-rho fit over [rho_in, small_window * rho_in]
    int small_points = 40;
    double large_lo = 50.0;      //!< large-rho fit over [large_lo, large_hi] / p
    double large_hi = 100.0;
    int points_per_wavelength = 32;
    std::vector<double> extra_rho; //!< additional output radii
};

struct InitialData {
    double rho = 0.0;
    cplx value;
    cplx derivative; //!< dR/drho
};

struct RadialProfile {
    std::vector<double> rho;
    std::vector<cplx> values;
    std::vector<cplx> derivatives; //!< dR/drho
    int steps = 0;                 //!< accepted integrator steps

    //! 2 pi rho j(rho) = 2 pi rho Im(R* R') / M at grid point i.
    double scaled_current(std::size_t i, double mass) const;
    //! Linear interpolation is not used: `rho` must be a grid point
    //! (relative match 1e-12). Throws RangeError otherwise.
    std::size_t index_of(double rho) const;
};

struct SmallRhoCoefficients {
    cplx A; //!< coefficient of rho^{-nu} (1 + ...)
    cplx B; //!< coefficient of rho^{+nu} (1 + ...)
    double residual = 0.0; //!< relative RMS fit residual
};

struct LargeRhoCoefficients {
    cplx ingoing;  //!< coefficient of sqrt(2/(pi p rho)) e^{-i(p rho - pi/4)} (1 + ...)
    cplx outgoing; //!< coefficient of sqrt(2/(pi p rho)) e^{+i(p rho - pi/4)} (1 + ...)
    double residual = 0.0;
};

struct AsymptoticCoefficients {
    SmallRhoCoefficients small_rho;
    LargeRhoCoefficients large_rho;
};

//! Output grid: the small-rho window, the extra radii and the large-rho
//! window sampled at points_per_wavelength, ending at rho_out.
std::vector<double> output_grid(const ScatteringConfig& cfg, double rho_in, double rho_out,
                                const OracleOptions& options);

//! rho_in for these options.
double inner_radius(const ScatteringConfig& cfg, const OracleOptions& options);

//! Integrates R_tt = Q(t) R in t = ln(rho) from init.rho through `grid`
//! (monotone in either direction, first entry init.rho). The profile keeps
//! the grid order.
RadialProfile integrate_log_radial(const std::function<long double(long double)>& q,
                                   const InitialData& init, const std::vector<double>& grid,
                                   double tau, double max_step = 0.0);

//! Integrates from init.rho to rho_out, sampling on output_grid().
//! Throws StiffnessError when the step in ln(rho) collapses below 1e-14.
RadialProfile integrate_radial(const ScatteringConfig& cfg, const PartialMode& mode,
                               const InitialData& init, double rho_out,
                               const OracleOptions& options = {});

//! Value and derivative of A phi_-(rho) + B phi_+(rho), where
//! phi_{+-} = rho^{+-nu} sum_k (-p^2 rho^2 / 4)^k / (k! (1 +- nu)_k) are the
//! Frobenius solutions. Independent of specfun.
InitialData frobenius_data(const ScatteringConfig& cfg, const PartialMode& mode, cplx A, cplx B,
                           double rho);

//! a H1 + b H2 at rho from specfun.
InitialData hankel_data(const ScatteringConfig& cfg, const PartialMode& mode, cplx a, cplx b,
                        double rho);

//! Small-rho data realising `model` directly from its boundary condition:
//! Regular -> phi_+; ElasticSubcritical -> phi_+ + l phi_-;
//! ElasticSupercritical -> phi_+ + e^{i theta} phi_-; Sink -> phi_-.
//! TotalAbsorption and Custom are defined through a/b and use hankel_data.
InitialData boundary_data(const ScatteringConfig& cfg, const PartialMode& mode,
                          const BoundaryModel& model, double rho);

//! Least squares in the small-rho window. Throws FitDegenerateError for
//! mu < 1e-3.
SmallRhoCoefficients match_small_rho(const RadialProfile& profile, const ScatteringConfig& cfg,
                                     const PartialMode& mode, const OracleOptions& options = {});

//! Least squares in [large_lo, large_hi] / p against the Hankel asymptotic
//! series. Throws FitDegenerateError when the window holds fewer than 20
//! points per wavelength or the asymptotic series does not converge there.
LargeRhoCoefficients match_large_rho(const RadialProfile& profile, const ScatteringConfig& cfg,
                                     const PartialMode& mode, const OracleOptions& options = {});

struct TwoTermFit {
    cplx c1;
    cplx c2;
    double residual = 0.0; //!< relative RMS
};

//! Complex least squares y ~ c1 f1 + c2 f2 (column-scaled normal equations).
//! Throws FitDegenerateError for collinear or vanishing columns.
TwoTermFit fit_two(const std::vector<cplx>& f1, const std::vector<cplx>& f2,
                   const std::vector<cplx>& y);

//! S_m = exp(i pi m) outgoing / ingoing.
cplx extract_smatrix(const LargeRhoCoefficients& large, int m);

struct OracleChannel {
    RadialProfile profile;
    AsymptoticCoefficients coefficients;
    cplx s_matrix;
};

//! Integrates boundary_data(model) from rho_in out to large_hi / p and
//! extracts S_m.
OracleChannel solve_channel_numerically(const ScatteringConfig& cfg, const PartialMode& mode,
                                        const BoundaryModel& model,
                                        const OracleOptions& options = {});

} // namespace abscat::oracle
