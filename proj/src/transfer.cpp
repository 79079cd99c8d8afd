#include "respole/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "respole/error.hpp"
#include "respole/ode.hpp"

namespace respole {

namespace {

constexpr double kPoleRatio = 1e-14;

void require_half_line(const PotentialSpec& p) {
  if (!p.domain().half_line) {
    throw Error(ErrorCode::InvalidArgument, "Riccati quantities are defined on the half line");
  }
}

void require_piecewise_constant(const PotentialSpec& p) {
  if (p.kind() != BodyKind::PiecewiseConstant) {
    throw Error(ErrorCode::UnsupportedBody, "transfer matrices need a piecewise-constant potential");
  }
}

bool is_pole(double u, double du, double k) {
  return std::abs(u) * std::max(1.0, k) <= kPoleRatio * std::abs(du) || u == 0.0;
}

// Integrates u'' = (k^2 + V) u from 0 to x_end piece by piece, renormalizing
// between pieces; v and vdot are invariant under that rescaling.
ode::RealState shoot_axis(const PotentialSpec& p, double k, double x_end) {
  const Vec2<double> y0 = boundary_data(p.domain().bc);
  ode::RealState st{y0(0), y0(1), 0.0};
  const double k2 = k * k;
  double x = 0.0;
  auto advance = [&](const std::function<double(double)>& coeff, double to) {
    if (to <= x) return;
    st = ode::shoot_real(coeff, x, to, st);
    x = to;
    const double s = std::max(std::abs(st.u), std::abs(st.du));
    if (s > 0.0) {
      st.u /= s;
      st.du /= s;
      st.u2_integral /= s * s;
    }
  };
  for (const auto& pc : p.pieces()) {
    if (pc.hi <= x) continue;
    if (pc.lo > x) advance([k2](double) { return k2; }, std::min(pc.lo, x_end));
    if (x >= x_end) break;
    advance([&pc, k2](double xx) { return k2 + pc(xx); }, std::min(pc.hi, x_end));
    if (x >= x_end) break;
  }
  advance([k2](double) { return k2; }, x_end);
  return st;
}

}  // namespace

TransferMatrix segment_matrix(double c, double len, cplx lambda) {
  return segment_matrix_kappa2<cplx>(cplx(c) - lambda * lambda, len);
}

TransferMatrix propagate(const PotentialSpec& p, cplx lambda) {
  require_piecewise_constant(p);
  TransferMatrix m = TransferMatrix::Identity();
  for (const auto& pc : p.pieces()) m = segment_matrix(pc.coef[0], pc.hi - pc.lo, lambda) * m;
  return m;
}

Mat2<double> propagate_axis(const PotentialSpec& p, double k, double x_end) {
  require_piecewise_constant(p);
  const double k2 = k * k;
  Mat2<double> m = Mat2<double>::Identity();
  double x = p.domain().half_line ? 0.0 : p.support().lo;
  for (const auto& pc : p.pieces()) {
    if (pc.hi <= x) continue;
    if (pc.lo > x) {
      const double to = std::min(pc.lo, x_end);
      if (to > x) m = segment_matrix_kappa2<double>(k2, to - x) * m;
      x = std::max(x, to);
    }
    if (x >= x_end) break;
    const double to = std::min(pc.hi, x_end);
    m = segment_matrix_kappa2<double>(k2 + pc.coef[0], to - x) * m;
    x = to;
    if (x >= x_end) break;
  }
  if (x_end > x) m = segment_matrix_kappa2<double>(k2, x_end - x) * m;
  return m;
}

Vec2<double> boundary_data(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? Vec2<double>(0.0, 1.0) : Vec2<double>(1.0, 0.0);
}

double riccati_v(const PotentialSpec& p, double k, double x_end) {
  require_half_line(p);
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (p.kind() != BodyKind::PiecewiseConstant) return riccati_v_ode(p, k, x_end);
  const Vec2<double> y = propagate_axis(p, k, x_end) * boundary_data(p.domain().bc);
  if (is_pole(y(0), y(1), k)) {
    throw Error(ErrorCode::PoleAtEvaluationPoint, "u vanishes at the evaluation point");
  }
  return y(1) / y(0);
}

double riccati_v_ode(const PotentialSpec& p, double k, double x_end) {
  return riccati_sample(p, k, x_end).v;
}

RiccatiSample riccati_sample(const PotentialSpec& p, double k, double x_end) {
  require_half_line(p);
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (!(x_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "x_end must be positive");
  const ode::RealState st = shoot_axis(p, k, x_end);
  if (is_pole(st.u, st.du, k)) {
    throw Error(ErrorCode::PoleAtEvaluationPoint, "u vanishes at the evaluation point");
  }
  return {x_end, k, st.du / st.u, 2.0 * k * st.u2_integral / (st.u * st.u), st.u};
}

double riccati_v_dot(const PotentialSpec& p, double k, double x_end) {
  return riccati_sample(p, k, x_end).vdot;
}

// ---------------------------------------------------------------------------

AxisProblem::AxisProblem(PotentialSpec inner_potential, std::optional<Barrier> b, double coupling)
    : inner(std::move(inner_potential)), barrier(b), q(ScaleParams(coupling).q) {
  require_half_line(inner);
  if (barrier) {
    if (!(barrier->height > 0.0)) throw Error(ErrorCode::NonPositiveBarrier, "barrier height must be positive");
    if (!(barrier->b > barrier->a)) throw Error(ErrorCode::InvalidArgument, "barrier needs B > A");
    if (!inner.empty() && inner.support().hi > barrier->a) {
      throw Error(ErrorCode::BarrierOverlap, "inner potential reaches past the barrier start");
    }
  }
  // q^2 V0 is stored; the barrier stays unscaled and is scaled on use.
  inner = scale(inner, ScaleParams(q));
}

double AxisProblem::edge() const {
  if (barrier) return barrier->a;
  return inner.empty() ? 0.0 : inner.support().hi;
}

std::pair<double, double> barrier_betas(double k, double k1) {
  const double r = k / k1;
  return {(1.0 + r) / (1.0 - r), (1.0 - r) / (1.0 + r)};
}

AxisSecular axis_secular_eval(const AxisProblem& prob, double k, AxisKind kind) {
  const double x_edge = prob.edge();
  double u = 0.0;
  double du = 0.0;
  if (x_edge == 0.0) {
    const Vec2<double> y = boundary_data(prob.inner.domain().bc);
    u = y(0);
    du = y(1);
  } else if (prob.inner.kind() == BodyKind::PiecewiseConstant) {
    const Vec2<double> y = propagate_axis(prob.inner, k, x_edge) * boundary_data(prob.inner.domain().bc);
    u = y(0);
    du = y(1);
  } else {
    const ode::RealState st = shoot_axis(prob.inner, k, x_edge);
    u = st.u;
    du = st.du;
  }
  AxisSecular out;
  out.u_edge = u;
  out.v = u == 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), du) : du / u;
  if (prob.barrier) {
    const double k1 = std::sqrt(k * k + prob.q * prob.q * prob.barrier->height);
    const auto [beta_plus, beta_minus] = barrier_betas(k, k1);
    const double beta = kind == AxisKind::Bound ? beta_minus : beta_plus;
    const double e = std::exp(-2.0 * k1 * (prob.barrier->b - prob.barrier->a));
    out.k1 = k1;
    out.value = out.v + k1 * (1.0 - beta * e) / (1.0 + beta * e);
  } else {
    out.k1 = k;
    out.value = kind == AxisKind::Bound ? out.v + k : out.v - k;
  }
  out.F = out.v / out.k1 + 1.0;
  return out;
}

double axis_secular(const AxisProblem& prob, double k, AxisKind kind) {
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  const AxisSecular s = axis_secular_eval(prob, k, kind);
  if (!std::isfinite(s.value) || is_pole(s.u_edge, s.u_edge * s.v, k)) {
    throw Error(ErrorCode::PoleAtEvaluationPoint, "v has a pole at this k");
  }
  return s.value;
}

double default_k_ceiling(const AxisProblem& prob) {
  // prob.inner already carries q^2, so sqrt of its bound is sqrt(max|V0|) q.
  return std::sqrt(prob.inner.bound()) * 1.1 + 5.0;
}

std::vector<AxisState> find_axis_states(const AxisProblem& prob, double k_lo, double k_hi, AxisKind kind,
                                        const AxisSearchOptions& opts) {
  if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw Error(ErrorCode::InvalidArgument, "need 0 < k_lo < k_hi");
  const int n = std::max(64, static_cast<int>(std::ceil(opts.points_per_decade * std::log10(k_hi / k_lo))));

  auto eval = [&](double k) { return axis_secular_eval(prob, k, kind); };
  auto sec = [&](double k) { return eval(k).value; };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(a); };

  std::vector<AxisState> roots;
  auto refine = [&](double a, double b, double fa, double fb) {
    if (fa == 0.0) {
      roots.push_back({a, kind, 0.0});
      return;
    }
    std::uintmax_t iters = 200;
    const auto [r0, r1] = boost::math::tools::toms748_solve(sec, a, b, fa, fb, tol, iters);
    const double f0 = sec(r0);
    const double f1 = sec(r1);
    const double k = std::abs(f0) <= std::abs(f1) ? r0 : r1;
    roots.push_back({k, kind, std::min(std::abs(f0), std::abs(f1))});
  };
  auto try_bracket = [&](double a, double b, double fa, double fb) {
    if (!std::isfinite(fa) || !std::isfinite(fb)) return;
    if (fa == 0.0 || fa * fb < 0.0) refine(a, b, fa, fb);
  };

  double ka = k_lo;
  AxisSecular sa = eval(ka);
  for (int i = 1; i <= n; ++i) {
    const double kb = i == n ? k_hi : k_lo * std::pow(k_hi / k_lo, static_cast<double>(i) / n);
    const AxisSecular sb = eval(kb);
    if (sa.u_edge == 0.0 || sb.u_edge == 0.0 || (sa.u_edge < 0.0) != (sb.u_edge < 0.0)) {
      if (sa.u_edge != 0.0 && sb.u_edge != 0.0) {
        // A pole of v lies in (ka, kb): split there and look on both sides.
        auto u_at = [&](double k) { return eval(k).u_edge; };
        std::uintmax_t iters = 200;
        const auto [p0, p1] = boost::math::tools::toms748_solve(u_at, ka, kb, sa.u_edge, sb.u_edge, tol, iters);
        const double pole = 0.5 * (p0 + p1);
        const double gap = 1e-10 * pole;
        if (pole - gap > ka) try_bracket(ka, pole - gap, sa.value, sec(pole - gap));
        if (pole + gap < kb) try_bracket(pole + gap, kb, sec(pole + gap), sb.value);
      }
    } else {
      try_bracket(ka, kb, sa.value, sb.value);
    }
    ka = kb;
    sa = sb;
  }
  std::sort(roots.begin(), roots.end(), [](const AxisState& a, const AxisState& b) { return a.k < b.k; });
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](const AxisState& a, const AxisState& b) { return std::abs(a.k - b.k) <= 1e-12 * a.k; }),
              roots.end());
  return roots;
}

// ---------------------------------------------------------------------------

SecularValue resonance_secular_eval(const PotentialSpec& p, cplx lambda) {
  require_piecewise_constant(p);
  const cplx i(0.0, 1.0);
  Vec2<cplx> y;
  if (p.domain().half_line) {
    const Vec2<double> b = boundary_data(p.domain().bc);
    y << cplx(b(0)), cplx(b(1));
    // Half-line propagation starts at 0 even if the support starts later.
    const double gap = p.empty() ? 0.0 : p.support().lo;
    if (gap > 0.0) y = segment_matrix(0.0, gap, lambda) * y;
    y = propagate(p, lambda) * y;
  } else {
    y << cplx(1.0), -i * lambda;
    y = propagate(p, lambda) * y;
  }
  const cplx a = i * lambda * y(0);
  return {a - y(1), std::abs(a) + std::abs(y(1))};
}

cplx resonance_secular(const PotentialSpec& p, cplx lambda) { return resonance_secular_eval(p, lambda).d; }

std::vector<ComplexZero> find_resonances_secular(const PotentialSpec& p, const Region& region, int grid_density) {
  require_piecewise_constant(p);
  ZeroSearchOptions opts;
  opts.samples_per_edge = std::max(8, grid_density);
  auto f = [&p](cplx z) { return resonance_secular_eval(p, z).d; };
  auto scale = [&p](cplx z) { return resonance_secular_eval(p, z).scale; };
  return find_zeros(f, scale, region, opts);
}

}  // namespace respole
