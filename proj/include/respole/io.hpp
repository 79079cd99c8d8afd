#pragma once

// Potential description files and the CSV/JSON result formats.  Floating
// point output always uses 17 significant digits.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "respole/absorber.hpp"
#include "respole/potential.hpp"
#include "respole/resonance.hpp"
#include "respole/resonance_set.hpp"

namespace respole::io {

/// A parsed key=value potential file.
struct PotentialFile {
  std::string kind;  ///< "squarepot" or "splinepot"
  PotentialSpec potential;
  std::vector<double> values;
  std::vector<double> breaks;  ///< breaks or knots
  std::optional<AbsorberSpec> absorber;  ///< present when any absorber.* key is given
};

PotentialFile parse_potential(std::string_view text);
PotentialFile load_potential(const std::string& path);
std::string render_potential(const PotentialFile& f);

/// "%.17g"
std::string fmt(double x);

/// Comma separated reals, e.g. "--window 0.5,6,-2,-1e-3".
std::vector<double> parse_list(std::string_view s);

std::string resonance_json(const ResonanceSet& rs);
std::string resonance_csv(const ResonanceSet& rs);
ResonanceSet parse_resonance_json(std::string_view text);
/// CSV carries only (re, im, class); engine, hash and accuracy are left default.
ResonanceSet parse_resonance_csv(std::string_view text);

struct ScanRow {
  double q = 0.0;
  double q_squared = 0.0;
  PoleClass kind = PoleClass::Bound;
  double k = 0.0;
  double im_lambda = 0.0;
  std::optional<double> paired_defect;
};

std::vector<ScanRow> scan_rows(const SymmetryScan& scan);
std::string scan_csv(const SymmetryScan& scan);
std::vector<ScanRow> parse_scan_csv(std::string_view text);

struct ScanSummary {
  std::optional<double> c_hat;
  std::optional<double> r2;
  double k0 = 0.5;
  std::vector<double> q_grid;
  bool symmetry = false;
  std::string engine = "transfer";
  std::optional<Barrier> barrier;
};

/// symmetry is true when the fit exists with c_hat > 0 and r2 >= 0.5.
ScanSummary summarize(const SymmetryScan& scan, Engine engine, const std::optional<Barrier>& barrier);
std::string summary_json(const ScanSummary& s);
ScanSummary parse_summary_json(std::string_view text);

std::string read_file(const std::string& path);
/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace respole::io
