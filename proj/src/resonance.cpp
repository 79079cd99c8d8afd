#include "respole/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "respole/error.hpp"
#include "respole/spectral.hpp"

namespace respole {

std::string_view to_string(PoleClass c) {
  switch (c) {
    case PoleClass::Bound: return "bound";
    case PoleClass::Antibound: return "antibound";
    case PoleClass::Resonance: return "resonance";
  }
  return "resonance";
}

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Transfer: return "transfer";
    case Engine::Spectral: return "spectral";
    case Engine::Capped: return "capped";
  }
  return "spectral";
}

PoleClass parse_pole_class(std::string_view s) {
  if (s == "bound") return PoleClass::Bound;
  if (s == "antibound") return PoleClass::Antibound;
  if (s == "resonance") return PoleClass::Resonance;
  throw Error(ErrorCode::ParseError, "unknown class '" + std::string(s) + "'");
}

Engine parse_engine(std::string_view s) {
  if (s == "transfer") return Engine::Transfer;
  if (s == "spectral") return Engine::Spectral;
  if (s == "capped") return Engine::Capped;
  throw Error(ErrorCode::ParseError, "unknown engine '" + std::string(s) + "'");
}

PoleClass classify(std::complex<double> lambda, double tol_axis) {
  if (std::abs(lambda) <= tol_axis) throw Error(ErrorCode::Ambiguous, "eigenvalue too close to the origin");
  if (std::abs(lambda.real()) <= tol_axis) {
    return lambda.imag() > 0.0 ? PoleClass::Bound : PoleClass::Antibound;
  }
  return PoleClass::Resonance;
}

void ResonanceSet::sort() {
  std::sort(entries.begin(), entries.end(), [](const ResonanceEntry& a, const ResonanceEntry& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
}

std::size_t ResonanceSet::count(PoleClass c) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [c](const ResonanceEntry& e) { return e.cls == c; }));
}

Pairing pair_defects(std::span<const double> bounds, std::span<const double> antibounds, double k0) {
  std::vector<double> b, a;
  for (double k : bounds)
    if (k >= k0) b.push_back(k);
  for (double k : antibounds)
    if (k >= k0) a.push_back(k);

  struct Cand {
    double d;
    std::size_t i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(b.size() * a.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) cands.push_back({std::abs(b[i] - a[j]), i, j});
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.d < y.d; });

  std::vector<char> used_b(b.size(), 0), used_a(a.size(), 0);
  Pairing out;
  for (const Cand& c : cands) {
    if (used_b[c.i] || used_a[c.j]) continue;
    used_b[c.i] = used_a[c.j] = 1;
    out.pairs.push_back({b[c.i], a[c.j], c.d});
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const DefectPair& x, const DefectPair& y) { return x.bound_k < y.bound_k; });
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!used_b[i]) out.unpaired_bound.push_back(b[i]);
  for (std::size_t j = 0; j < a.size(); ++j)
    if (!used_a[j]) out.unpaired_antibound.push_back(a[j]);
  std::sort(out.unpaired_bound.begin(), out.unpaired_bound.end());
  std::sort(out.unpaired_antibound.begin(), out.unpaired_antibound.end());
  return out;
}

std::optional<double> ScanPoint::max_defect() const {
  if (pairing.pairs.empty()) return std::nullopt;
  double m = 0.0;
  for (const auto& p : pairing.pairs) m = std::max(m, p.defect);
  return m;
}

std::vector<double> SymmetryScan::q_values() const {
  std::vector<double> q;
  for (const auto& p : points) q.push_back(p.q);
  return q;
}

namespace {

ScanPoint scan_transfer(const PotentialSpec& v0, const std::optional<Barrier>& barrier, double q, double k0,
                        const ScanOptions& opts) {
  const AxisProblem prob(v0, barrier, q);
  const double k_lo = std::max(k0, 1e-3);
  const double k_hi = default_k_ceiling(prob);
  ScanPoint pt;
  pt.q = q;
  AxisSearchOptions so;
  so.points_per_decade = opts.points_per_decade;
  if (k_hi > k_lo) {
    for (const auto& s : find_axis_states(prob, k_lo, k_hi, AxisKind::Bound, so)) pt.bound_k.push_back(s.k);
    for (const auto& s : find_axis_states(prob, k_lo, k_hi, AxisKind::Antibound, so))
      pt.antibound_k.push_back(s.k);
  }
  return pt;
}

ScanPoint scan_spectral(const PotentialSpec& v0, const std::optional<Barrier>& barrier, double q, double k0,
                        const ScanOptions& opts) {
  const PotentialSpec body = scale(barrier ? add_barrier(v0, *barrier) : v0, ScaleParams(q));
  FilterOptions fo;
  fo.match_tol = opts.match_tol;
  const ResonanceSet rs = filtered_eigenvalues(body, mesh_for(body, opts.order), BoundaryScheme::Outgoing, fo);
  ScanPoint pt;
  pt.q = q;
  for (const auto& e : rs.entries) {
    if (e.cls == PoleClass::Bound && e.lambda.imag() >= k0) pt.bound_k.push_back(e.lambda.imag());
    if (e.cls == PoleClass::Antibound && -e.lambda.imag() >= k0) pt.antibound_k.push_back(-e.lambda.imag());
  }
  std::sort(pt.bound_k.begin(), pt.bound_k.end());
  std::sort(pt.antibound_k.begin(), pt.antibound_k.end());
  return pt;
}

}  // namespace

SymmetryScan q_scan(const PotentialSpec& v0, const std::optional<Barrier>& barrier, std::span<const double> q_grid,
                    double k0, const ScanOptions& opts) {
  if (q_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty q grid");
  if (!(k0 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "k0 must be nonnegative");
  if (!v0.domain().half_line) throw Error(ErrorCode::InvalidArgument, "the scan needs a half-line potential");
  for (double q : q_grid) (void)ScaleParams(q);
  if (opts.engine == Engine::Capped) throw Error(ErrorCode::InvalidArgument, "scan supports transfer or spectral");

  auto one = [&](double q) {
    ScanPoint pt = opts.engine == Engine::Transfer ? scan_transfer(v0, barrier, q, k0, opts)
                                                   : scan_spectral(v0, barrier, q, k0, opts);
    pt.pairing = pair_defects(pt.bound_k, pt.antibound_k, k0);
    return pt;
  };

  SymmetryScan scan;
  scan.k0 = k0;
  if (opts.parallel && q_grid.size() > 1) {
    std::vector<std::future<ScanPoint>> jobs;
    for (double q : q_grid) jobs.push_back(std::async(std::launch::async, one, q));
    for (auto& j : jobs) scan.points.push_back(j.get());
  } else {
    for (double q : q_grid) scan.points.push_back(one(q));
  }
  try {
    scan.fit = fit_decay_rate(scan);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  return scan;
}

DecayFit fit_decay_rate(std::span<const double> q, std::span<const double> defects) {
  if (q.size() != defects.size()) throw Error(ErrorCode::InvalidArgument, "q and defect lengths differ");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (defects[i] > kDefectFloor && std::isfinite(defects[i])) {
      x.push_back(q[i]);
      y.push_back(std::log(defects[i]));
    }
  }
  if (x.size() < 3) throw Error(ErrorCode::InsufficientData, "need at least three defects above the floor");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "defects at a single q only");
  const double slope = sxy / sxx;
  DecayFit f;
  f.c_hat = -slope;
  f.intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + slope * x[i]);
    ssr += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.points = static_cast<int>(x.size());
  return f;
}

DecayFit fit_decay_rate(const SymmetryScan& scan) {
  std::vector<double> q, d;
  for (const auto& pt : scan.points) {
    for (const auto& p : pt.pairing.pairs) {
      q.push_back(pt.q);
      d.push_back(p.defect);
    }
  }
  return fit_decay_rate(q, d);
}

std::vector<std::vector<std::optional<double>>> tracked_defects(const SymmetryScan& scan) {
  std::size_t ranks = 0;
  for (const auto& pt : scan.points) ranks = std::max(ranks, pt.pairing.pairs.size());
  std::vector<std::vector<std::optional<double>>> out(ranks,
                                                      std::vector<std::optional<double>>(scan.points.size()));
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const auto& pairs = scan.points[i].pairing.pairs;
    for (std::size_t r = 0; r < pairs.size(); ++r) out[r][i] = pairs[pairs.size() - 1 - r].defect;
  }
  return out;
}

}  // namespace respole
