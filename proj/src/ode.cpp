#include "respole/ode.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace respole::ode {

namespace odeint = boost::numeric::odeint;

namespace {

// Absolute tolerance floor, relative to a unit-sized initial state.
constexpr double kAbsFloor = 1e-15;

template <std::size_t Dim, typename System, typename Observer>
std::array<double, Dim> run(System&& sys, std::array<double, Dim> y, double x0, double x1,
                            double rtol, Observer&& obs) {
  using State = std::array<double, Dim>;
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return y;
  auto stepper = odeint::make_controlled(kAbsFloor * scale, rtol, odeint::runge_kutta_fehlberg78<State>());
  const double dt0 = std::copysign(std::min(1e-2, std::abs(x1 - x0)), x1 - x0);
  odeint::integrate_adaptive(stepper, sys, y, x0, x1, dt0, obs);
  return y;
}

template <std::size_t N>
ComplexCauchy<N> shoot_complex_impl(const std::function<cplx(double)>& coeff, double x0, double x1,
                                    const ComplexCauchy<N>& y0, double rtol,
                                    const ComplexObserver<N>& obs) {
  constexpr std::size_t Dim = 4 * N;
  using State = std::array<double, Dim>;
  auto pack = [](const ComplexCauchy<N>& c) {
    State s{};
    for (std::size_t j = 0; j < N; ++j) {
      s[4 * j + 0] = c[j][0].real();
      s[4 * j + 1] = c[j][0].imag();
      s[4 * j + 2] = c[j][1].real();
      s[4 * j + 3] = c[j][1].imag();
    }
    return s;
  };
  auto unpack = [](const State& s) {
    ComplexCauchy<N> c{};
    for (std::size_t j = 0; j < N; ++j) {
      c[j][0] = {s[4 * j + 0], s[4 * j + 1]};
      c[j][1] = {s[4 * j + 2], s[4 * j + 3]};
    }
    return c;
  };
  auto sys = [&](const State& s, State& ds, double x) {
    const cplx c = coeff(x);
    for (std::size_t j = 0; j < N; ++j) {
      const cplx u{s[4 * j + 0], s[4 * j + 1]};
      const cplx f = c * u;
      ds[4 * j + 0] = s[4 * j + 2];
      ds[4 * j + 1] = s[4 * j + 3];
      ds[4 * j + 2] = f.real();
      ds[4 * j + 3] = f.imag();
    }
  };
  auto observer = [&](const State& s, double x) {
    if (obs) obs(x, unpack(s));
  };
  return unpack(run<Dim>(sys, pack(y0), x0, x1, rtol, observer));
}

}  // namespace

RealState shoot_real(const std::function<double(double)>& coeff, double x0, double x1,
                     RealState y0, double rtol) {
  using State = std::array<double, 3>;
  auto sys = [&](const State& s, State& ds, double x) {
    ds[0] = s[1];
    ds[1] = coeff(x) * s[0];
    ds[2] = s[0] * s[0];
  };
  const State out = run<3>(sys, State{y0.u, y0.du, y0.u2_integral}, x0, x1, rtol,
                           [](const State&, double) {});
  return {out[0], out[1], out[2]};
}

ComplexCauchy<1> shoot_complex(const std::function<cplx(double)>& coeff, double x0, double x1,
                               const ComplexCauchy<1>& y0, double rtol,
                               const ComplexObserver<1>& obs) {
  return shoot_complex_impl<1>(coeff, x0, x1, y0, rtol, obs);
}

ComplexCauchy<2> shoot_complex(const std::function<cplx(double)>& coeff, double x0, double x1,
                               const ComplexCauchy<2>& y0, double rtol,
                               const ComplexObserver<2>& obs) {
  return shoot_complex_impl<2>(coeff, x0, x1, y0, rtol, obs);
}

}  // namespace respole::ode
