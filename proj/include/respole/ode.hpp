#pragma once

// Adaptive integration of the linear second-order equation u'' = c(x) u on a
// single smooth interval.  Thin wrappers over boost::odeint's controlled
// Runge-Kutta-Fehlberg 7(8) stepper.

#include <array>
#include <complex>
#include <functional>

namespace respole::ode {

using cplx = std::complex<double>;

/// Cauchy data (u, u') plus the running integral of u^2.
struct RealState {
  double u = 0.0;
  double du = 0.0;
  double u2_integral = 0.0;
};

/// Integrates u'' = c(x) u from x0 to x1 with real coefficient, also
/// accumulating int u^2.  Tolerances are relative to the size of the state.
RealState shoot_real(const std::function<double(double)>& coeff, double x0, double x1,
                     RealState y0, double rtol = 1e-11);

/// Cauchy data for N independent complex solutions of the same equation.
template <std::size_t N>
using ComplexCauchy = std::array<std::array<cplx, 2>, N>;

/// Observer called after each accepted step with the current solutions.
template <std::size_t N>
using ComplexObserver = std::function<void(double, const ComplexCauchy<N>&)>;

ComplexCauchy<1> shoot_complex(const std::function<cplx(double)>& coeff, double x0, double x1,
                               const ComplexCauchy<1>& y0, double rtol = 1e-11,
                               const ComplexObserver<1>& obs = {});

ComplexCauchy<2> shoot_complex(const std::function<cplx(double)>& coeff, double x0, double x1,
                               const ComplexCauchy<2>& y0, double rtol = 1e-11,
                               const ComplexObserver<2>& obs = {});

}  // namespace respole::ode
