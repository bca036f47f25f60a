#pragma once
//! \file specfun.hpp
//! Bessel and Hankel functions of real or purely imaginary order for real
//! positive argument, and the complex Gamma function.
//!
//! Evaluation strategy (shared by every entry point):
//!   - ascending power series, summed in extended precision, wherever the
//!     cancellation estimate stays below ~1e-14 (in practice x <~ 12);
//!   - the Hankel asymptotic expansion wherever it converges to full
//!     double precision (x >= 30 and x large compared with |nu|^2);
//!   - in between, Bessel's equation is integrated from the last point where
//!     the series is accurate with an adaptive 7(8) Runge-Kutta-Fehlberg pair,
//!     and the Hankel pair is accepted only if its Wronskian is intact.
//!
//! Hankel functions come from the connection formula
//!   H1_nu = (J_-nu - exp(-i nu pi) J_nu) / (i sin nu pi)
//! except within 1e-9 of an integer order, where H_n = J_n +- i Y_n is used.
//!
//! All functions are pure and reentrant.

#include <complex>

namespace abscat::specfun {

using cplx = std::complex<double>;

//! Largest |order| and argument accepted by the public functions.
inline constexpr double kMaxOrder = 50.0;
inline constexpr double kMaxArgument = 1e4;

//! Bessel order restricted to the real axis (nu = mu >= 0) or the imaginary
//! axis (nu = i mu, mu > 0).
class Order {
  public:
    static Order real(double mu);
    static Order imaginary(double mu);

    bool is_imaginary() const { return imaginary_; }
    double mu() const { return mu_; }
    //! nu as a complex number (mu or i mu)
    cplx nu() const { return imaginary_ ? cplx(0.0, mu_) : cplx(mu_, 0.0); }
    //! nu^2, negative for imaginary orders
    double nu_squared() const { return imaginary_ ? -mu_ * mu_ : mu_ * mu_; }

    bool operator==(const Order&) const = default;

  private:
    Order(bool imaginary, double mu) : imaginary_(imaginary), mu_(mu) {}
    bool imaginary_;
    double mu_;
};

enum class HankelKind { First, Second };

struct ValueAndDerivative {
    cplx value;
    cplx derivative; //!< d/dx
};

//! Gamma(z); relative error below 1e-12 for |z| <= 50.
//! Throws PoleError at non-positive integers.
cplx complex_gamma(cplx z);

//! J_nu(x).
cplx bessel_j(Order order, double x);
//! J_{-nu}(x); for an imaginary order this is J_{-i mu}, the conjugate of
//! J_{i mu}.
cplx bessel_j_reflected(Order order, double x);
//! Value and x-derivative of J_nu(x), or of J_{-nu}(x) when `reflected`.
ValueAndDerivative bessel_j_with_derivative(Order order, double x,
                                            bool reflected = false);

cplx hankel(HankelKind kind, Order order, double x);
ValueAndDerivative hankel_with_derivative(HankelKind kind, Order order,
                                          double x);

//! |W{H1, H2}(x) * i pi x / 4 - 1|: the deviation of the computed Hankel
//! Wronskian from its exact value -4i/(pi x).
double wronskian_check(Order order, double x);

} // namespace abscat::specfun
