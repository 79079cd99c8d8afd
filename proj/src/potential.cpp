#include "respole/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "respole/error.hpp"

namespace respole {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BarrierOverlap: return "BarrierOverlap";
    case ErrorCode::NonPositiveBarrier: return "NonPositiveBarrier";
    case ErrorCode::NonZeroEndpoints: return "NonZeroEndpoints";
    case ErrorCode::NonMonotoneKnots: return "NonMonotoneKnots";
    case ErrorCode::UnsupportedBody: return "UnsupportedBody";
    case ErrorCode::PoleAtEvaluationPoint: return "PoleAtEvaluationPoint";
    case ErrorCode::ContourThroughZero: return "ContourThroughZero";
    case ErrorCode::OrderTooSmall: return "OrderTooSmall";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::IncomingVanishes: return "IncomingVanishes";
    case ErrorCode::ResonantDenominator: return "ResonantDenominator";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::InsufficientData: return "InsufficientData";
  }
  return "Unknown";
}

bool Error::is_input_error() const noexcept {
  switch (code_) {
    case ErrorCode::PoleAtEvaluationPoint:
    case ErrorCode::ContourThroughZero:
    case ErrorCode::SolverFailure:
    case ErrorCode::IncomingVanishes:
    case ErrorCode::ResonantDenominator:
    case ErrorCode::InsufficientData:
      return false;
    default:
      return true;
  }
}

ScaleParams::ScaleParams(double q_value) : q(q_value) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw Error(ErrorCode::InvalidArgument, "coupling q must be positive");
  }
}

namespace {

constexpr int kSplineBoundSamples = 10000;

double compute_bound(BodyKind kind, std::span<const Piece> pieces) {
  double c = 0.0;
  if (pieces.empty()) return c;
  if (kind == BodyKind::PiecewiseConstant) {
    for (const auto& pc : pieces) c = std::max(c, std::abs(pc.coef[0]));
    return c;
  }
  const double lo = pieces.front().lo;
  const double hi = pieces.back().hi;
  std::size_t idx = 0;
  for (int i = 0; i <= kSplineBoundSamples; ++i) {
    const double x = lo + (hi - lo) * i / kSplineBoundSamples;
    while (idx + 1 < pieces.size() && x >= pieces[idx].hi) ++idx;
    c = std::max(c, std::abs(pieces[idx](x)));
  }
  // The grid can miss a bit of a peak; piece endpoints cover the rest.
  for (const auto& pc : pieces) c = std::max({c, std::abs(pc(pc.lo)), std::abs(pc(pc.hi))});
  return c;
}

void check_increasing(std::span<const double> xs, ErrorCode code, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) throw Error(code, std::string(what) + " must be finite");
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw Error(code, std::string(what) + " must be strictly increasing");
    }
  }
}

}  // namespace

PotentialSpec PotentialSpec::piecewise_constant(Domain domain, std::vector<double> breaks,
                                                std::vector<double> values) {
  if (breaks.size() != values.size() + 1) {
    throw Error(ErrorCode::InvalidArgument, "piecewise-constant potential needs n+1 breaks for n values");
  }
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "at least one value required");
  check_increasing(breaks, ErrorCode::InvalidArgument, "breaks");
  std::vector<Piece> pieces;
  pieces.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw Error(ErrorCode::InvalidArgument, "values must be finite");
    pieces.push_back({breaks[i], breaks[i + 1], {values[i], 0.0, 0.0, 0.0}});
  }
  return from_pieces(domain, BodyKind::PiecewiseConstant, std::move(pieces));
}

PotentialSpec PotentialSpec::from_pieces(Domain domain, BodyKind kind, std::vector<Piece> pieces) {
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].hi > pieces[i].lo)) throw Error(ErrorCode::InvalidArgument, "empty piece");
    if (i > 0 && pieces[i].lo != pieces[i - 1].hi) {
      throw Error(ErrorCode::InvalidArgument, "pieces must be contiguous");
    }
    if (kind == BodyKind::PiecewiseConstant && !pieces[i].is_constant()) {
      throw Error(ErrorCode::InvalidArgument, "non-constant piece in a piecewise-constant body");
    }
  }
  if (domain.half_line && !pieces.empty() && pieces.front().lo < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "half-line potential must be supported in [0, inf)");
  }
  PotentialSpec p;
  p.domain_ = domain;
  p.kind_ = kind;
  p.pieces_ = std::move(pieces);
  p.bound_ = compute_bound(kind, p.pieces_);
  return p;
}

Interval PotentialSpec::support() const {
  if (pieces_.empty()) return {};
  return {pieces_.front().lo, pieces_.back().hi};
}

std::vector<double> PotentialSpec::breakpoints() const {
  std::vector<double> out;
  if (pieces_.empty()) return out;
  out.reserve(pieces_.size() + 1);
  for (const auto& pc : pieces_) out.push_back(pc.lo);
  out.push_back(pieces_.back().hi);
  return out;
}

std::optional<std::size_t> PotentialSpec::piece_index(double x) const {
  if (pieces_.empty() || x < pieces_.front().lo || x >= pieces_.back().hi) return std::nullopt;
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& pc) { return v < pc.hi; });
  return static_cast<std::size_t>(it - pieces_.begin());
}

double PotentialSpec::operator()(double x) const {
  const auto idx = piece_index(x);
  return idx ? pieces_[*idx](x) : 0.0;
}

std::string PotentialSpec::hash() const {
  // FNV-1a over a canonical hexfloat rendering.
  std::string canon = domain_.half_line ? "half:" : "full:";
  if (domain_.half_line) canon += domain_.bc == BoundaryCondition::Dirichlet ? "D;" : "N;";
  char buf[64];
  for (const auto& pc : pieces_) {
    std::snprintf(buf, sizeof buf, "%a,%a", pc.lo, pc.hi);
    canon += buf;
    for (double c : pc.coef) {
      std::snprintf(buf, sizeof buf, ",%a", c);
      canon += buf;
    }
    canon += ';';
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double evaluate(const PotentialSpec& p, double x) { return p(x); }

PotentialSpec add_barrier(const PotentialSpec& p, const Barrier& barrier) {
  if (!(barrier.height > 0.0)) throw Error(ErrorCode::NonPositiveBarrier, "barrier height must be positive");
  if (!(barrier.b > barrier.a)) throw Error(ErrorCode::InvalidArgument, "barrier needs B > A");
  const Interval s = p.support();
  if (!p.empty() && s.hi > barrier.a) {
    throw Error(ErrorCode::BarrierOverlap, "potential support reaches past the barrier start");
  }
  std::vector<Piece> pieces;
  const double origin = p.domain().half_line ? 0.0 : (p.empty() ? barrier.a : s.lo);
  if (!p.empty() && s.lo > origin) pieces.push_back({origin, s.lo, {}});
  pieces.insert(pieces.end(), p.pieces().begin(), p.pieces().end());
  const double inner_end = p.empty() ? origin : s.hi;
  if (barrier.a > inner_end) pieces.push_back({inner_end, barrier.a, {}});
  pieces.push_back({barrier.a, barrier.b, {barrier.height, 0.0, 0.0, 0.0}});
  return PotentialSpec::from_pieces(p.domain(), p.kind(), std::move(pieces));
}

PotentialSpec scale(const PotentialSpec& p, ScaleParams s) {
  const double f = s.q * s.q;
  std::vector<Piece> pieces(p.pieces().begin(), p.pieces().end());
  for (auto& pc : pieces) {
    for (double& c : pc.coef) c *= f;
  }
  return PotentialSpec::from_pieces(p.domain(), p.kind(), std::move(pieces));
}

PotentialSpec spline_build(std::span<const double> values, std::span<const double> knots,
                           Domain domain) {
  if (values.size() != knots.size() || knots.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "spline needs matching values/knots, at least two");
  }
  check_increasing(knots, ErrorCode::NonMonotoneKnots, "knots");
  if (values.front() != 0.0 || values.back() != 0.0) {
    throw Error(ErrorCode::NonZeroEndpoints, "first and last spline values must be 0");
  }
  const std::size_t m = knots.size() - 1;
  // Natural spline: second derivatives M_i with M_0 = M_m = 0.
  Eigen::VectorXd second = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m + 1));
  if (m >= 2) {
    const auto n = static_cast<Eigen::Index>(m - 1);
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const std::size_t i = static_cast<std::size_t>(r) + 1;
      const double h0 = knots[i] - knots[i - 1];
      const double h1 = knots[i + 1] - knots[i];
      if (r > 0) sys(r, r - 1) = h0;
      sys(r, r) = 2.0 * (h0 + h1);
      if (r + 1 < n) sys(r, r + 1) = h1;
      rhs(r) = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
    }
    second.segment(1, n) = sys.partialPivLu().solve(rhs);
  }
  std::vector<Piece> pieces;
  pieces.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double h = knots[i + 1] - knots[i];
    const double m0 = second(static_cast<Eigen::Index>(i));
    const double m1 = second(static_cast<Eigen::Index>(i + 1));
    const double slope = (values[i + 1] - values[i]) / h - h * (2.0 * m0 + m1) / 6.0;
    pieces.push_back({knots[i], knots[i + 1], {values[i], slope, 0.5 * m0, (m1 - m0) / (6.0 * h)}});
  }
  return PotentialSpec::from_pieces(domain, BodyKind::PiecewiseCubic, std::move(pieces));
}

}  // namespace respole
