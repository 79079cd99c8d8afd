#include "respole/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "respole/error.hpp"

namespace respole {

namespace {

using cplx = std::complex<double>;
using Fn = std::function<cplx(cplx)>;
using ScaleFn = std::function<double(cplx)>;

constexpr int kMaxEdgeDepth = 40;
constexpr double kMaxPhaseStep = std::numbers::pi / 5.0;
constexpr double kVanishing = 1e-13;
constexpr int kMaxNewton = 60;

struct Sample {
  cplx z;
  cplx f;
};

Sample sample(const Fn& f, const ScaleFn& scale, cplx z) {
  const cplx v = f(z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) <= kVanishing * scale(z)) {
    throw Error(ErrorCode::ContourThroughZero, "secular function vanishes on the contour");
  }
  return {z, v};
}

// Accumulated phase change of f from a to b, refining until each step turns by
// less than kMaxPhaseStep.
double phase_along(const Fn& f, const ScaleFn& scale, const Sample& a, const Sample& b, int depth) {
  const double dphi = std::arg(b.f / a.f);
  if (std::abs(dphi) < kMaxPhaseStep) {
    // Guard against a full turn hidden between samples: check the midpoint.
    if (depth > 6) return dphi;
    const Sample m = sample(f, scale, 0.5 * (a.z + b.z));
    const double d1 = std::arg(m.f / a.f);
    const double d2 = std::arg(b.f / m.f);
    if (std::abs(d1 + d2 - dphi) < 1e-9) return dphi;
    return phase_along(f, scale, a, m, depth + 1) + phase_along(f, scale, m, b, depth + 1);
  }
  if (depth >= kMaxEdgeDepth) {
    throw Error(ErrorCode::ContourThroughZero, "phase not resolved along contour");
  }
  const Sample m = sample(f, scale, 0.5 * (a.z + b.z));
  return phase_along(f, scale, a, m, depth + 1) + phase_along(f, scale, m, b, depth + 1);
}

double total_phase(const Fn& f, const ScaleFn& scale, const Region& box, int samples_per_edge) {
  const cplx corners[5] = {{box.re_lo, box.im_lo}, {box.re_hi, box.im_lo}, {box.re_hi, box.im_hi},
                           {box.re_lo, box.im_hi}, {box.re_lo, box.im_lo}};
  double total = 0.0;
  Sample prev = sample(f, scale, corners[0]);
  const Sample first = prev;
  for (int e = 0; e < 4; ++e) {
    for (int j = 1; j <= samples_per_edge; ++j) {
      const double t = static_cast<double>(j) / samples_per_edge;
      const Sample cur = (e == 3 && j == samples_per_edge)
                             ? first
                             : sample(f, scale, corners[e] + t * (corners[e + 1] - corners[e]));
      total += phase_along(f, scale, prev, cur, 0);
      prev = cur;
    }
  }
  return total;
}

struct Newton {
  cplx z;
  double residual;
  bool converged;
};

Newton newton(const Fn& f, const ScaleFn& scale, cplx z, double tol) {
  for (int it = 0; it < kMaxNewton; ++it) {
    const cplx fz = f(z);
    const double s = scale(z);
    if (std::abs(fz) <= tol * s) return {z, std::abs(fz) / s, true};
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    const cplx df = (f(z + h) - f(z - h)) / (2.0 * h);
    if (df == cplx(0.0) || !std::isfinite(std::abs(df))) break;
    const cplx step = fz / df;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) {
      const double r = std::abs(f(z)) / scale(z);
      return {z, r, r <= tol};
    }
  }
  const double r = std::abs(f(z)) / scale(z);
  return {z, r, r <= tol};
}

class QuadSearch {
 public:
  QuadSearch(const Fn& f, const ScaleFn& scale, const ZeroSearchOptions& opts, double min_size)
      : f_(f), scale_(scale), opts_(opts), min_size_(min_size) {}

  void run(const Region& box, int count, int depth) {
    if (count <= 0) return;
    // Zeros this close to the origin are discarded anyway; d and its scale both vanish there.
    const double far = std::max(std::hypot(box.re_lo, box.im_lo), std::max(std::hypot(box.re_hi, box.im_lo),
                                std::max(std::hypot(box.re_lo, box.im_hi), std::hypot(box.re_hi, box.im_hi))));
    if (far < opts_.exclusion_radius) return;
    if (count == 1 || box.diameter() < min_size_) {
      const Newton nw = newton(f_, scale_, cplx(0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)),
                               opts_.tolerance);
      const double slack = 1e-9 * std::max(1.0, box.diameter());
      if (nw.converged && box.contains(nw.z, slack)) {
        zeros_.push_back({nw.z, count, nw.residual});
        return;
      }
      if (box.diameter() < min_size_) {
        throw Error(ErrorCode::SolverFailure, "Newton failed inside a minimal box");
      }
    }
    split(box, count, depth);
  }

  std::vector<ComplexZero>& zeros() { return zeros_; }

 private:
  void split(const Region& box, int count, int depth) {
    static constexpr double kFractions[] = {0.5, 0.4871, 0.5237, 0.4619};
    for (double frac : kFractions) {
      const double xm = box.re_lo + frac * (box.re_hi - box.re_lo);
      const double ym = box.im_lo + (1.0 - frac) * (box.im_hi - box.im_lo);
      const Region kids[4] = {{box.re_lo, xm, box.im_lo, ym},
                              {xm, box.re_hi, box.im_lo, ym},
                              {box.re_lo, xm, ym, box.im_hi},
                              {xm, box.re_hi, ym, box.im_hi}};
      int counts[4];
      try {
        int sum = 0;
        for (int i = 0; i < 4; ++i) {
          counts[i] = winding_number(f_, scale_, kids[i], std::max(8, opts_.samples_per_edge / 4));
          sum += counts[i];
        }
        if (sum != count) continue;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ContourThroughZero) throw;
        continue;
      }
      for (int i = 0; i < 4; ++i) run(kids[i], counts[i], depth + 1);
      return;
    }
    // Every split line grazes a zero: a multiple zero or a tight cluster.
    const Newton nw = newton(f_, scale_, cplx(0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)),
                             opts_.tolerance);
    if (count > 1 && nw.converged && box.contains(nw.z, 1e-9 * std::max(1.0, box.diameter()))) {
      zeros_.push_back({nw.z, count, nw.residual});
      return;
    }
    throw Error(ErrorCode::ContourThroughZero, "could not subdivide box without crossing a zero");
  }

  const Fn& f_;
  const ScaleFn& scale_;
  const ZeroSearchOptions& opts_;
  double min_size_;
  std::vector<ComplexZero> zeros_;
};

}  // namespace

int winding_number(const Fn& f, const ScaleFn& scale, const Region& box, int samples_per_edge) {
  const double turns = total_phase(f, scale, box, std::max(4, samples_per_edge)) / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.1) {
    throw Error(ErrorCode::ContourThroughZero, "non-integer winding number");
  }
  return static_cast<int>(rounded);
}

std::vector<ComplexZero> find_zeros(const Fn& f, const ScaleFn& scale, const Region& region,
                                    const ZeroSearchOptions& opts) {
  if (!region.valid()) throw Error(ErrorCode::InvalidArgument, "empty search region");
  const double min_size = 1e-9 * std::max(1.0, region.diameter());

  // A zero sitting on the outer boundary is retried with a slightly grown box.
  Region box = region;
  int count = 0;
  bool ok = false;
  for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
    try {
      count = winding_number(f, scale, box, opts.samples_per_edge);
      ok = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ContourThroughZero) throw;
      const double grow = 1e-7 * (attempt + 1) * std::max(1.0, region.diameter());
      box = {region.re_lo - grow, region.re_hi + 1.3 * grow, region.im_lo - 0.7 * grow, region.im_hi + grow};
    }
  }
  if (!ok) throw Error(ErrorCode::ContourThroughZero, "region boundary passes through a zero");
  if (count < 0) throw Error(ErrorCode::SolverFailure, "negative winding number: function has poles");

  QuadSearch search(f, scale, opts, min_size);
  search.run(box, count, 0);

  std::vector<ComplexZero> out;
  for (const auto& z : search.zeros()) {
    if (std::abs(z.lambda) < opts.exclusion_radius) continue;
    if (!region.contains(z.lambda)) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const ComplexZero& o) {
      return std::abs(o.lambda - z.lambda) < 1e-8 * std::max(1.0, std::abs(z.lambda));
    });
    if (!dup) out.push_back(z);
  }
  std::sort(out.begin(), out.end(), [](const ComplexZero& a, const ComplexZero& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

}  // namespace respole
