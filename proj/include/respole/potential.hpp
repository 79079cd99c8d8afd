#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace respole {

enum class BoundaryCondition { Dirichlet, Neumann };

/// Where the operator -d^2/dx^2 + V lives: the whole line, or [0, inf) with a
/// boundary condition at the origin.
struct Domain {
  bool half_line = false;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;

  static Domain full_line() { return {}; }
  static Domain half(BoundaryCondition bc) { return {true, bc}; }

  friend bool operator==(const Domain&, const Domain&) = default;
};

enum class BodyKind { PiecewiseConstant, PiecewiseCubic };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool empty() const { return !(hi > lo); }
};

/// Polynomial piece V(x) = c0 + c1 t + c2 t^2 + c3 t^3, t = x - lo, on [lo, hi].
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  std::array<double, 4> coef{};

  double operator()(double x) const {
    const double t = x - lo;
    return coef[0] + t * (coef[1] + t * (coef[2] + t * coef[3]));
  }
  double derivative(double x) const {
    const double t = x - lo;
    return coef[1] + t * (2.0 * coef[2] + t * 3.0 * coef[3]);
  }
  bool is_constant() const { return coef[1] == 0.0 && coef[2] == 0.0 && coef[3] == 0.0; }
};

/// Barrier V1 * 1_[A,B] appended to an inner potential.
struct Barrier {
  double a = 1.0;
  double b = 2.0;
  double height = 1.0;
};

/// Coupling constant q; potentials are scaled by q^2.
struct ScaleParams {
  double q = 1.0;

  explicit ScaleParams(double q_value);
};

/// A real, compactly supported potential made of polynomial pieces.
///
/// The pieces are contiguous and ordered; their union is the support.  The
/// potential is identically zero outside the support, and evaluation at a
/// breakpoint returns the right-hand limit.  Instances are immutable.
class PotentialSpec {
 public:
  PotentialSpec() = default;

  /// n+1 strictly increasing breaks, n values.
  static PotentialSpec piecewise_constant(Domain domain, std::vector<double> breaks,
                                          std::vector<double> values);
  static PotentialSpec from_pieces(Domain domain, BodyKind kind, std::vector<Piece> pieces);
  static PotentialSpec zero(Domain domain) { return from_pieces(domain, BodyKind::PiecewiseConstant, {}); }

  const Domain& domain() const { return domain_; }
  BodyKind kind() const { return kind_; }
  std::span<const Piece> pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  /// Closed support interval; {0,0} for the empty potential.
  Interval support() const;
  /// Every piece endpoint, ascending.
  std::vector<double> breakpoints() const;
  /// Stored bound C with |V(x)| <= C.
  double bound() const { return bound_; }

  double operator()(double x) const;
  /// Index of the piece containing x (right-continuous), or nullopt outside.
  std::optional<std::size_t> piece_index(double x) const;

  /// Stable 64-bit digest of domain and pieces, rendered as 16 hex digits.
  std::string hash() const;

 private:
  Domain domain_{};
  BodyKind kind_ = BodyKind::PiecewiseConstant;
  std::vector<Piece> pieces_;
  double bound_ = 0.0;
};

double evaluate(const PotentialSpec& p, double x);

/// V0 + V1 * 1_[A,B].  Gaps between the support of p and A (and between 0 and
/// the support on the half line) are filled with zero pieces.
PotentialSpec add_barrier(const PotentialSpec& p, const Barrier& barrier);

/// q^2 * V.
PotentialSpec scale(const PotentialSpec& p, ScaleParams s);

/// Natural cubic spline through (knots, values) extended by zero; first and
/// last values must vanish.
PotentialSpec spline_build(std::span<const double> values, std::span<const double> knots,
                           Domain domain = Domain::full_line());

}  // namespace respole
