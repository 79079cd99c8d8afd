#pragma once

// Bound/antibound pairing, the coupling scan, and the decay-rate fit of the
// symmetry defect |k_bound - k_antibound|.

#include <optional>
#include <span>
#include <vector>

#include "respole/potential.hpp"
#include "respole/resonance_set.hpp"
#include "respole/transfer.hpp"

namespace respole {

struct DefectPair {
  double bound_k = 0.0;
  double antibound_k = 0.0;
  double defect = 0.0;
};

struct Pairing {
  std::vector<DefectPair> pairs;  ///< ascending in bound_k
  std::vector<double> unpaired_bound;
  std::vector<double> unpaired_antibound;
};

/// Greedy nearest-neighbour injective pairing of the entries >= k0.
Pairing pair_defects(std::span<const double> bounds, std::span<const double> antibounds, double k0);

struct ScanPoint {
  double q = 0.0;
  std::vector<double> bound_k;      ///< ascending, all >= k0
  std::vector<double> antibound_k;  ///< ascending, all >= k0
  Pairing pairing;

  /// Largest paired defect at this q, if any pair exists.
  std::optional<double> max_defect() const;
};

struct DecayFit {
  double c_hat = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

struct SymmetryScan {
  std::vector<ScanPoint> points;  ///< in q_grid order
  double k0 = 0.5;
  std::optional<DecayFit> fit;

  std::vector<double> q_values() const;
};

struct ScanOptions {
  Engine engine = Engine::Transfer;
  int order = 24;                   ///< spectral engine only
  double match_tol = 1e-6;          ///< spectral engine only
  double points_per_decade = 2048;  ///< transfer engine only
  bool parallel = true;
};

/// For each q: states of q^2 (V0 + W) on the imaginary axis with k >= k0,
/// paired into defects.  The fit is attached when at least three usable
/// defects exist.
SymmetryScan q_scan(const PotentialSpec& v0, const std::optional<Barrier>& barrier, std::span<const double> q_grid,
                    double k0, const ScanOptions& opts = {});

/// Floor below which defects are excluded from the regression.
inline constexpr double kDefectFloor = 1e-12;

/// Least squares fit of log(defect) = -c q + b.
DecayFit fit_decay_rate(std::span<const double> q, std::span<const double> defects);

/// Fit over every paired defect of the scan above the floor.
DecayFit fit_decay_rate(const SymmetryScan& scan);

/// Defect histories of individual states.  States are tracked by rank from
/// the deepest one (largest bound k), which is stable as q grows because new
/// states enter at the top of the well.  branch[r][i] is the defect of the
/// r-th deepest pair at points[i], if that pair exists.
std::vector<std::vector<std::optional<double>>> tracked_defects(const SymmetryScan& scan);

}  // namespace respole
