#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace respole {

enum class PoleClass { Bound, Antibound, Resonance };
enum class Engine { Transfer, Spectral, Capped };

std::string_view to_string(PoleClass c);
std::string_view to_string(Engine e);
PoleClass parse_pole_class(std::string_view s);
Engine parse_engine(std::string_view s);

/// Bound: on the positive imaginary axis, Antibound: on the negative one,
/// Resonance otherwise.  Throws Ambiguous for |lambda| <= tol_axis.
PoleClass classify(std::complex<double> lambda, double tol_axis = 1e-6);

struct ResonanceEntry {
  std::complex<double> lambda;
  PoleClass cls = PoleClass::Resonance;
  double accuracy = 0.0;
};

struct ResonanceSet {
  Engine engine = Engine::Spectral;
  std::string potential_hash;
  std::vector<ResonanceEntry> entries;

  /// Entries ordered by (Re, Im) for stable output.
  void sort();
  std::size_t count(PoleClass c) const;
};

}  // namespace respole
