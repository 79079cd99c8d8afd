#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace respole {

/// Axis-aligned rectangle in the complex lambda plane.
struct Region {
  double re_lo = 0.0;
  double re_hi = 0.0;
  double im_lo = 0.0;
  double im_hi = 0.0;

  bool contains(std::complex<double> z, double slack = 0.0) const {
    return z.real() >= re_lo - slack && z.real() <= re_hi + slack && z.imag() >= im_lo - slack &&
           z.imag() <= im_hi + slack;
  }
  double diameter() const { return std::hypot(re_hi - re_lo, im_hi - im_lo); }
  bool valid() const { return re_hi > re_lo && im_hi > im_lo; }
};

struct ComplexZero {
  std::complex<double> lambda;
  int multiplicity = 1;
  double residual = 0.0;  ///< |f| / scale at the returned point
};

struct ZeroSearchOptions {
  int samples_per_edge = 64;
  double exclusion_radius = 1e-3;  ///< zeros closer than this to 0 are dropped
  double tolerance = 1e-10;        ///< |f| <= tolerance * scale on exit
};

/// Zeros of an analytic function inside a rectangle: argument-principle counts
/// on a quadtree until each box holds one zero (or a tight cluster), then
/// Newton.  scale(z) gives the magnitude against which |f| is judged.
std::vector<ComplexZero> find_zeros(const std::function<std::complex<double>(std::complex<double>)>& f,
                                    const std::function<double(std::complex<double>)>& scale,
                                    const Region& region, const ZeroSearchOptions& opts = {});

/// Winding number of f around the boundary of the region.
int winding_number(const std::function<std::complex<double>(std::complex<double>)>& f,
                   const std::function<double(std::complex<double>)>& scale, const Region& box,
                   int samples_per_edge = 32);

}  // namespace respole
