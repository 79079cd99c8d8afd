#include "respole/absorber.hpp"

#include <algorithm>
#include <cmath>

#include "respole/error.hpp"

namespace respole {

namespace {
constexpr double kDefaultSigma = 4.0;
constexpr double kDefaultWidth = 30.0;
constexpr double kRtol = 1e-11;
}  // namespace

AbsorberSpec AbsorberSpec::with_defaults(double start) {
  return {start, start + kDefaultWidth, kDefaultSigma, AbsorberProfile::Quadratic};
}

cplx AbsorberSpec::at_depth(double s) const {
  if (s <= 0.0) return 0.0;
  const double r = s / width();
  return cplx(0.0, -sigma * r * r);
}

void AbsorberSpec::validate() const {
  if (!(end > start)) throw Error(ErrorCode::InvalidArgument, "absorber needs M > L");
  if (!std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "absorber strength must be finite");
}

ode::ComplexCauchy<2> integrate_gamma_observed(const AbsorberSpec& abs, cplx lambda,
                                               const ode::ComplexObserver<2>& obs) {
  abs.validate();
  if (lambda == cplx(0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be nonzero");
  const cplx I(0.0, 1.0);
  const cplx lam2 = lambda * lambda;
  auto coeff = [&abs, lam2](double x) { return abs(x) - lam2; };
  const ode::ComplexCauchy<2> y0{{{cplx(1.0), I * lambda}, {cplx(1.0), -I * lambda}}};
  return ode::shoot_complex(coeff, abs.start, abs.end, y0, kRtol, obs);
}

std::pair<cplx, cplx> integrate_gamma(const AbsorberSpec& abs, cplx lambda, cplx c) {
  abs.validate();
  if (lambda == cplx(0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be nonzero");
  const cplx I(0.0, 1.0);
  const cplx lam2 = lambda * lambda;
  auto coeff = [&abs, lam2](double x) { return abs(x) - lam2; };
  const ode::ComplexCauchy<2> y0{{{c, c * I * lambda}, {c, -c * I * lambda}}};
  const auto y = ode::shoot_complex(coeff, abs.start, abs.end, y0, kRtol);
  return {y[0][0], y[1][0]};
}

cplx rho(const AbsorberSpec& abs, cplx lambda) { return reflection(abs, lambda).rho; }

cplx lambda_hat(cplx lambda, cplx rho_val) {
  if (std::abs(1.0 + rho_val) < 1e-12) throw Error(ErrorCode::ResonantDenominator, "1 + rho vanishes");
  return lambda * (1.0 - rho_val) / (1.0 + rho_val);
}

ReflectionData reflection(const AbsorberSpec& abs, cplx lambda) {
  const auto [gp, gm] = integrate_gamma(abs, lambda);
  if (std::abs(gm) < 1e-14 * std::abs(gp)) {
    throw Error(ErrorCode::IncomingVanishes, "incoming solution vanishes at M");
  }
  ReflectionData r;
  r.lambda = lambda;
  r.gamma_plus_m = gp;
  r.gamma_minus_m = gm;
  r.rho = -gp / gm;
  r.lambda_hat = lambda_hat(lambda, r.rho);
  return r;
}

ExtraPotential absorber_term(const AbsorberSpec& abs, const Domain& domain) {
  abs.validate();
  const bool half = domain.half_line;
  return [abs, half](double x) -> cplx {
    if (x > abs.start) return abs.at_depth(x - abs.start);
    if (!half && x < -abs.start) return abs.at_depth(-abs.start - x);
    return 0.0;
  };
}

Mesh capped_mesh(const PotentialSpec& p, const AbsorberSpec& abs, int order, int absorber_cells) {
  abs.validate();
  if (absorber_cells < 1) throw Error(ErrorCode::InvalidArgument, "need at least one absorber cell");
  const bool half = p.domain().half_line;
  const double L = abs.start;
  const double M = abs.end;
  if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "absorber must start at L > 0");
  if (!p.empty() && (p.support().hi > L || (!half && p.support().lo < -L))) {
    throw Error(ErrorCode::MeshMismatch, "potential support must lie inside [-L, L]");
  }
  std::vector<Interval> cells;
  auto layer = [&](double lo, double hi) {
    for (int j = 0; j < absorber_cells; ++j) {
      const double a = j == 0 ? lo : lo + (hi - lo) * j / absorber_cells;
      const double b = j + 1 == absorber_cells ? hi : lo + (hi - lo) * (j + 1) / absorber_cells;
      cells.push_back({a, b});
    }
  };
  if (!half) layer(-M, -L);
  double x = half ? 0.0 : -L;
  for (double bp : p.breakpoints()) {
    if (bp > x) {
      cells.push_back({x, bp});
      x = bp;
    }
  }
  if (L > x) cells.push_back({x, L});
  layer(L, M);
  std::vector<int> orders(cells.size(), order);
  return Mesh(std::move(cells), std::move(orders));
}

PencilPair capped_pencil(const PotentialSpec& p, const AbsorberSpec& abs, const Mesh& mesh_ext) {
  const Interval span = mesh_ext.span();
  const double expect_lo = p.domain().half_line ? 0.0 : -abs.end;
  const double tol = 1e-12 * std::max(1.0, abs.end);
  if (std::abs(span.hi - abs.end) > tol || std::abs(span.lo - expect_lo) > tol) {
    throw Error(ErrorCode::MeshMismatch, "capped mesh must span the absorbing layers");
  }
  const bool has_l = std::any_of(mesh_ext.cells.begin(), mesh_ext.cells.end(),
                                 [&](const Interval& c) { return std::abs(c.hi - abs.start) <= tol; });
  if (!has_l) throw Error(ErrorCode::MeshMismatch, "absorber start must be a mesh cell endpoint");
  return assemble_pencil(p, mesh_ext, BoundaryScheme::Dirichlet, absorber_term(abs, p.domain()));
}

}  // namespace respole
