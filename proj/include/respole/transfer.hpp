#pragma once

// Exact propagation of Cauchy data [u, u'] for u'' = (V - lambda^2) u across
// piecewise-constant potentials, the Riccati/Dirichlet-to-Neumann quantities
// on the imaginary axis, and the secular functions whose zeros are bound
// states, antibound states and resonances.

#include <cmath>
#include <complex>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "respole/contour.hpp"
#include "respole/potential.hpp"

namespace respole {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Maps [u(a), u'(a)] to [u(b), u'(b)]; unit determinant.
using TransferMatrix = Mat2<cplx>;

namespace detail {
template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
}  // namespace detail

/// cosh(sqrt z) and sinh(sqrt z)/sqrt z.  Both are entire and even in the
/// root, so the branch of sqrt is irrelevant; small |z| uses the series.
template <typename Scalar>
std::pair<Scalar, Scalar> cosh_sinhc(Scalar z) {
  using std::abs;
  if (abs(z) < 1e-8) {
    return {Scalar(1) + z * (Scalar(0.5) + z / Scalar(24)), Scalar(1) + z * (Scalar(1) / Scalar(6) + z / Scalar(120))};
  }
  if constexpr (detail::is_complex<Scalar>::value) {
    const Scalar r = std::sqrt(z);
    return {std::cosh(r), std::sinh(r) / r};
  } else {
    if (z > 0) {
      const Scalar r = std::sqrt(z);
      return {std::cosh(r), std::sinh(r) / r};
    }
    const Scalar r = std::sqrt(-z);
    return {std::cos(r), std::sin(r) / r};
  }
}

/// Transfer matrix of u'' = kappa2 * u over an interval of length len:
/// [[cosh(kl), sinh(kl)/k], [k sinh(kl), cosh(kl)]] with k^2 = kappa2.
template <typename Scalar>
Mat2<Scalar> segment_matrix_kappa2(Scalar kappa2, double len) {
  const auto [c, s] = cosh_sinhc<Scalar>(kappa2 * Scalar(len * len));
  Mat2<Scalar> m;
  m << c, Scalar(len) * s, kappa2 * Scalar(len) * s, c;
  return m;
}

/// Segment of constant potential c and length len at spectral parameter lambda.
TransferMatrix segment_matrix(double c, double len, cplx lambda);

/// Left-to-right product over the pieces of a piecewise-constant potential;
/// identity for the empty potential.
TransferMatrix propagate(const PotentialSpec& p, cplx lambda);

/// Real transfer matrix at lambda = i k from the left end of the domain (0 on
/// the half line, the support start on the full line) to x_end.  Zero
/// potential is assumed between the support end and x_end.
Mat2<double> propagate_axis(const PotentialSpec& p, double k, double x_end);

/// Initial Cauchy data fixed by the half-line boundary condition.
Vec2<double> boundary_data(BoundaryCondition bc);

// ---------------------------------------------------------------------------
// Riccati / Dirichlet-to-Neumann quantities on the half line.

struct RiccatiSample {
  double x = 0.0;
  double k = 0.0;
  double v = 0.0;     ///< u'(x,k) / u(x,k)
  double vdot = 0.0;  ///< dv/dk
  double u = 0.0;     ///< u(x,k) for the normalized initial data
};

/// v(x_end, k) = u'/u for the solution of u'' = (k^2 + V) u started from the
/// boundary data at 0.  Piecewise-constant bodies use exact transfer
/// matrices, other bodies adaptive integration.
double riccati_v(const PotentialSpec& p, double k, double x_end);

/// Same quantity always computed by adaptive ODE integration.
double riccati_v_ode(const PotentialSpec& p, double k, double x_end);

/// dv/dk at x_end from 2k / u^2 * int_0^x_end u^2.
double riccati_v_dot(const PotentialSpec& p, double k, double x_end = 1.0);

/// Both v and vdot from one integration pass.
RiccatiSample riccati_sample(const PotentialSpec& p, double k, double x_end);

// ---------------------------------------------------------------------------
// Bound and antibound states on the imaginary axis.

enum class AxisKind { Bound, Antibound };

/// Half-line inner potential V0, optional barrier, and coupling q.  The
/// physical potential is q^2 (V0 + V1 1_[A,B]).
struct AxisProblem {
  PotentialSpec inner;
  std::optional<Barrier> barrier;
  double q = 1.0;

  AxisProblem(PotentialSpec inner_potential, std::optional<Barrier> b, double coupling);

  /// Point where v is evaluated: A with a barrier, else the end of the inner support.
  double edge() const;
};

/// beta_+ (antibound) and beta_- (bound) for given k and k1 = sqrt(k^2 + q^2 V1).
/// Their product is 1.
std::pair<double, double> barrier_betas(double k, double k1);

struct AxisSecular {
  double value = 0.0;   ///< s(k); infinite at a pole of v
  double v = 0.0;       ///< v(edge, k)
  double u_edge = 0.0;  ///< u(edge, k), changes sign across poles of v
  double k1 = 0.0;      ///< sqrt(k^2 + q^2 V1), or k without barrier
  double F = 0.0;       ///< v / k1 + 1, O(exp(-2 k1 (B-A))) at a root
};

/// Secular value without throwing at poles of v.
AxisSecular axis_secular_eval(const AxisProblem& prob, double k, AxisKind kind);

/// s_-(k) = v + k1 (1 - beta_- e)/(1 + beta_- e) for bound states,
/// s_+(k) likewise with beta_+ for antibound states, e = exp(-2 k1 (B-A)).
/// Without a barrier s_-(k) = v + k and s_+(k) = v - k.
double axis_secular(const AxisProblem& prob, double k, AxisKind kind);

struct AxisState {
  double k = 0.0;
  AxisKind kind = AxisKind::Bound;
  double residual = 0.0;
};

struct AxisSearchOptions {
  double points_per_decade = 2048.0;
};

/// sqrt(max|V0|) * q * 1.1 + 5.
double default_k_ceiling(const AxisProblem& prob);

/// All simple zeros of the chosen secular function in [k_lo, k_hi], ascending.
std::vector<AxisState> find_axis_states(const AxisProblem& prob, double k_lo, double k_hi,
                                        AxisKind kind, const AxisSearchOptions& opts = {});

// ---------------------------------------------------------------------------
// Complex secular function.

struct SecularValue {
  cplx d;
  double scale = 0.0;  ///< |i lambda u| + |u'|, the size of the cancelling terms
};

/// d(lambda) = i lambda u(R) - u'(R) for the solution that is outgoing
/// (proportional to exp(-i lambda x)) at the left end of a full-line support,
/// or satisfies the boundary condition at 0 on the half line.  Vanishes
/// exactly at resonances, bound and antibound states.
SecularValue resonance_secular_eval(const PotentialSpec& p, cplx lambda);
cplx resonance_secular(const PotentialSpec& p, cplx lambda);

/// Zeros of d in the region, excluding |lambda| < 1e-3.
std::vector<ComplexZero> find_resonances_secular(const PotentialSpec& p, const Region& region,
                                                 int grid_density = 64);

}  // namespace respole
