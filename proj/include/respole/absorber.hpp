#pragma once

// Complex absorbing layer on [L, M]: the exterior equation
// u'' + (lambda^2 - W(x)) u = 0 with W(x) = -i sigma ((x - L)/(M - L))^2,
// its reflection coefficient rho(lambda), and the Dirichlet-capped pencil.

#include <complex>
#include <utility>

#include "respole/ode.hpp"
#include "respole/potential.hpp"
#include "respole/spectral.hpp"

namespace respole {

using cplx = std::complex<double>;

enum class AbsorberProfile { Quadratic };

struct AbsorberSpec {
  double start = 1.0;   ///< L
  double end = 31.0;    ///< M
  double sigma = 4.0;   ///< strength; negative values give the conjugate (amplifying) layer
  AbsorberProfile profile = AbsorberProfile::Quadratic;

  /// Shipped default: sigma = 4 over a layer of width 30.
  static AbsorberSpec with_defaults(double start);

  double width() const { return end - start; }
  /// W at distance s >= 0 past the start of the layer.
  cplx at_depth(double s) const;
  /// W(x) on [L, M].
  cplx operator()(double x) const { return at_depth(x - start); }
  void validate() const;
};

struct ReflectionData {
  cplx lambda;
  cplx gamma_plus_m;
  cplx gamma_minus_m;
  cplx rho;
  cplx lambda_hat;
};

/// gamma_+(M), gamma_-(M) for the solutions with Cauchy data c*(1, +-i lambda)
/// at L.
std::pair<cplx, cplx> integrate_gamma(const AbsorberSpec& abs, cplx lambda, cplx c = 1.0);

/// Integrates both solutions, reporting (x, gamma_+, gamma_-) data after each step.
ode::ComplexCauchy<2> integrate_gamma_observed(const AbsorberSpec& abs, cplx lambda,
                                               const ode::ComplexObserver<2>& obs);

/// rho = -gamma_+(M) / gamma_-(M).
cplx rho(const AbsorberSpec& abs, cplx lambda);

/// lambda (1 - rho) / (1 + rho).
cplx lambda_hat(cplx lambda, cplx rho_val);

ReflectionData reflection(const AbsorberSpec& abs, cplx lambda);

/// Absorber mirrored about 0 for the full line: W(|x|) for |x| > L.
ExtraPotential absorber_term(const AbsorberSpec& abs, const Domain& domain);

/// Mesh on [-M, M] (full line) or [0, M] (half line): the potential cells,
/// zero cells out to L, and absorber_cells equal cells on each layer.
Mesh capped_mesh(const PotentialSpec& p, const AbsorberSpec& abs, int order, int absorber_cells);

/// Pencil for -u'' + (V + W) u = lambda^2 u with u = 0 at the outer ends.
PencilPair capped_pencil(const PotentialSpec& p, const AbsorberSpec& abs, const Mesh& mesh_ext);

}  // namespace respole
