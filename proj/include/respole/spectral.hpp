#pragma once

// Chebyshev collocation of -u'' + V u = lambda^2 u with outgoing boundary
// rows, linearized with psi = lambda u into a generalized eigenvalue problem
// A x = lambda B x, and the order-refinement filter for spurious eigenvalues.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "respole/contour.hpp"
#include "respole/potential.hpp"
#include "respole/resonance_set.hpp"

namespace respole {

using cplx = std::complex<double>;

/// Collocation data on one subinterval: Chebyshev-Gauss-Lobatto nodes in
/// ascending order and the first/second differentiation matrices.
template <typename Real>
struct ChebBlock {
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

  Real a{};
  Real b{};
  Vector nodes;
  Matrix d1;
  Matrix d2;

  int order() const { return static_cast<int>(nodes.size()) - 1; }
};

/// Nodes a + (b-a)(1 - cos(j pi / n))/2, j = 0..n; D2 = D1 D1.
template <typename Real = double>
ChebBlock<Real> cheb_block(int n, Real a, Real b);

/// Ordered contiguous cells with a collocation order each (>= 4).
struct Mesh {
  std::vector<Interval> cells;
  std::vector<int> orders;

  Mesh() = default;
  Mesh(std::vector<Interval> c, std::vector<int> o);

  Interval span() const { return {cells.front().lo, cells.back().hi}; }
  int total_nodes() const;
  /// Same cells, every order raised to ceil(factor * N).
  Mesh refined(double factor = 1.5) const;
};

/// Cells are the pieces of the potential, each further split so that no cell
/// is longer than max_cell (0 means no limit).
Mesh mesh_for(const PotentialSpec& p, int order, double max_cell = 0.0);

enum class BoundaryScheme {
  Outgoing,   ///< u' = i lambda u at the right end, u' = -i lambda u at the left end
  Dirichlet,  ///< u = 0 at both ends (truncated box)
};

enum class RowTag { DomainU, DefinitionPsi, JunctionU, JunctionDu, BoundaryLeft, BoundaryRight };

struct PencilPair {
  Eigen::MatrixXcd A;
  Eigen::MatrixXcd B;
  std::vector<RowTag> row_map;
  std::vector<double> nodes;  ///< collocation point of each u unknown
  Mesh mesh;

  Eigen::Index size() const { return A.rows(); }
  int node_count() const { return static_cast<int>(nodes.size()); }
};

/// Optional complex term added to V, e.g. an absorbing layer.
using ExtraPotential = std::function<cplx(double)>;

/// Unknowns [u; psi] at every node of every cell (interface nodes duplicated).
/// u rows: collocated equation -u'' + V u - lambda psi = 0, replaced by the
/// boundary rows at the two extreme nodes and by value/derivative continuity
/// at each interface.  psi rows: psi = lambda u at every node.  On the half
/// line the left boundary row is the Dirichlet or Neumann condition.
PencilPair assemble_pencil(const PotentialSpec& p, const Mesh& mesh, BoundaryScheme bc,
                           const ExtraPotential& extra = {});

struct EigenResult {
  std::vector<cplx> eigenvalues;
  std::vector<Eigen::VectorXcd> vectors;  ///< full [u; psi] right eigenvectors, unit norm
  std::vector<double> residuals;          ///< ||(A - lambda B) x|| / ||x||
  int infinite_count = 0;                 ///< infinite or indeterminate eigenvalues dropped
  int rejected_count = 0;                 ///< finite ones dropped for residual > 1e-8 ||A||
  double norm_a = 0.0;
};

struct SolveOptions {
  int dense_limit = 3000;
  bool vectors = true;
};

/// Dense QZ solve of the pencil.
EigenResult solve_pencil(const PencilPair& pp, const SolveOptions& opts = {});

/// Same spectrum for pencils whose boundary rows do not involve lambda (the
/// Dirichlet scheme): psi is eliminated, K u = mu M u is solved for
/// mu = lambda^2 and both roots are returned.
EigenResult solve_pencil_squared(const PencilPair& pp, const SolveOptions& opts = {});

struct FilterOptions {
  double match_tol = 1e-6;       ///< relative distance for a coarse/fine pair
  double origin_radius = 1e-6;   ///< eigenvalues this close to 0 are ignored
  double tol_axis = 1e-6;        ///< classification tolerance
  double refine_factor = 1.5;
  bool residual_check = true;    ///< compute eigenvectors and drop large-residual pairs
  std::optional<Region> window;  ///< keep only eigenvalues inside
};

/// Greedy injective nearest-neighbour pairing of two eigenvalue lists.
/// Returns (index_in_coarse, index_in_fine, distance), pairs within the
/// relative tolerance only.
struct EigenMatch {
  std::size_t coarse = 0;
  std::size_t fine = 0;
  double distance = 0.0;
};
std::vector<EigenMatch> match_eigenvalues(const std::vector<cplx>& coarse, const std::vector<cplx>& fine,
                                          double rel_tol, double origin_radius);

/// Eigenvalues that reappear when every order is raised by 50%; the value
/// from the finer solve is kept and the coarse/fine distance is the accuracy.
ResonanceSet filtered_eigenvalues(const PotentialSpec& p, const Mesh& mesh, BoundaryScheme bc,
                                  const FilterOptions& opts = {}, const ExtraPotential& extra = {});

}  // namespace respole
