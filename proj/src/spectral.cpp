#include "respole/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "respole/error.hpp"

namespace respole {

template <typename Real>
ChebBlock<Real> cheb_block(int n, Real a, Real b) {
  if (n < 2) throw Error(ErrorCode::OrderTooSmall, "Chebyshev block needs n >= 2");
  if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "Chebyshev block needs a < b");
  using std::sin;
  const Real pi = std::numbers::pi_v<Real>;
  const Real half_theta = pi / Real(2 * n);
  ChebBlock<Real> blk;
  blk.a = a;
  blk.b = b;
  // Reference nodes t_j = -cos(j pi/n) = sin((2j - n) pi / 2n), exactly symmetric.
  typename ChebBlock<Real>::Vector t(n + 1);
  for (int j = 0; j <= n; ++j) t(j) = sin(Real(2 * j - n) * half_theta);
  blk.nodes = (a + (b - a) * (t.array() + Real(1)) / Real(2)).matrix();

  auto weight = [n](int j) { return Real((j % 2 == 0) ? 1 : -1) * ((j == 0 || j == n) ? Real(0.5) : Real(1)); };
  typename ChebBlock<Real>::Matrix d(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    Real diag = 0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      // t_i - t_j via a product of sines avoids cancellation.
      const Real diff = Real(2) * sin(Real(i + j) * half_theta) * sin(Real(i - j) * half_theta);
      d(i, j) = weight(j) / weight(i) / diff;
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  blk.d1 = d * (Real(2) / (b - a));
  blk.d2 = blk.d1 * blk.d1;
  return blk;
}

template ChebBlock<double> cheb_block<double>(int, double, double);
template ChebBlock<long double> cheb_block<long double>(int, long double, long double);

Mesh::Mesh(std::vector<Interval> c, std::vector<int> o) : cells(std::move(c)), orders(std::move(o)) {
  if (cells.empty() || cells.size() != orders.size()) {
    throw Error(ErrorCode::InvalidArgument, "mesh needs one order per cell and at least one cell");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (orders[i] < 4) throw Error(ErrorCode::OrderTooSmall, "collocation order must be at least 4");
    if (cells[i].empty()) throw Error(ErrorCode::InvalidArgument, "empty mesh cell");
    if (i > 0 && cells[i].lo != cells[i - 1].hi) throw Error(ErrorCode::InvalidArgument, "mesh cells must be contiguous");
  }
}

int Mesh::total_nodes() const {
  int n = 0;
  for (int o : orders) n += o + 1;
  return n;
}

Mesh Mesh::refined(double factor) const {
  std::vector<int> o(orders.size());
  std::transform(orders.begin(), orders.end(), o.begin(),
                 [factor](int n) { return static_cast<int>(std::ceil(factor * n - 1e-9)); });
  return Mesh(cells, std::move(o));
}

Mesh mesh_for(const PotentialSpec& p, int order, double max_cell) {
  if (p.empty()) throw Error(ErrorCode::InvalidArgument, "potential has no support to discretize");
  std::vector<double> breaks = p.breakpoints();
  if (p.domain().half_line && breaks.front() > 0.0) breaks.insert(breaks.begin(), 0.0);
  std::vector<Interval> cells;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    const int parts = max_cell > 0.0 ? std::max(1, static_cast<int>(std::ceil(len / max_cell - 1e-12))) : 1;
    for (int j = 0; j < parts; ++j) {
      const double lo = j == 0 ? breaks[i] : breaks[i] + len * j / parts;
      const double hi = j + 1 == parts ? breaks[i + 1] : breaks[i] + len * (j + 1) / parts;
      cells.push_back({lo, hi});
    }
  }
  std::vector<int> orders(cells.size(), order);
  return Mesh(std::move(cells), std::move(orders));
}

PencilPair assemble_pencil(const PotentialSpec& p, const Mesh& mesh, BoundaryScheme bc, const ExtraPotential& extra) {
  const Interval span = mesh.span();
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(span.lo), std::abs(span.hi)));
  for (double x : p.breakpoints()) {
    if (x < span.lo - tol || x > span.hi + tol) {
      if (bc == BoundaryScheme::Outgoing) throw Error(ErrorCode::MeshMismatch, "mesh does not cover the potential");
      continue;
    }
    const bool hit = std::any_of(mesh.cells.begin(), mesh.cells.end(), [&](const Interval& c) {
      return std::abs(c.lo - x) <= tol || std::abs(c.hi - x) <= tol;
    });
    if (!hit) throw Error(ErrorCode::MeshMismatch, "potential breakpoint is not a mesh cell endpoint");
  }
  if (p.domain().half_line && std::abs(span.lo) > tol) {
    throw Error(ErrorCode::MeshMismatch, "half-line mesh must start at 0");
  }

  const int ncell = static_cast<int>(mesh.cells.size());
  const int n = mesh.total_nodes();
  const cplx I(0.0, 1.0);
  PencilPair pp;
  pp.A = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  pp.B = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  pp.row_map.assign(2 * n, RowTag::DefinitionPsi);
  pp.nodes.resize(n);
  pp.mesh = mesh;

  std::vector<ChebBlock<double>> blocks;
  std::vector<int> offset(ncell);
  int off = 0;
  for (int c = 0; c < ncell; ++c) {
    blocks.push_back(cheb_block<double>(mesh.orders[c], mesh.cells[c].lo, mesh.cells[c].hi));
    offset[c] = off;
    off += mesh.orders[c] + 1;
  }

  for (int c = 0; c < ncell; ++c) {
    const auto& blk = blocks[c];
    const int m = blk.order() + 1;
    const int o = offset[c];
    const auto piece = p.piece_index(mesh.cells[c].mid());
    for (int l = 0; l < m; ++l) {
      const int row = o + l;
      const double x = blk.nodes(l);
      pp.nodes[row] = x;
      // psi = lambda u at every node.
      pp.A(n + row, n + row) = 1.0;
      pp.B(n + row, row) = 1.0;

      const bool first = l == 0;
      const bool last = l == m - 1;
      if (c == 0 && first) {
        pp.row_map[row] = RowTag::BoundaryLeft;
        const bool dirichlet = bc == BoundaryScheme::Dirichlet ||
                               (p.domain().half_line && p.domain().bc == BoundaryCondition::Dirichlet);
        if (dirichlet) {
          pp.A(row, row) = 1.0;
        } else {
          pp.A.block(row, o, 1, m) = blk.d1.row(l).cast<cplx>();
          if (!p.domain().half_line) pp.B(row, row) = -I;
        }
      } else if (c == ncell - 1 && last) {
        pp.row_map[row] = RowTag::BoundaryRight;
        if (bc == BoundaryScheme::Dirichlet) {
          pp.A(row, row) = 1.0;
        } else {
          pp.A.block(row, o, 1, m) = blk.d1.row(l).cast<cplx>();
          pp.B(row, row) = I;
        }
      } else if (last) {
        pp.row_map[row] = RowTag::JunctionU;
        pp.A(row, row) = 1.0;
        pp.A(row, offset[c + 1]) = -1.0;
      } else if (first) {
        pp.row_map[row] = RowTag::JunctionDu;
        const auto& prev = blocks[c - 1];
        const int pm = prev.order() + 1;
        pp.A.block(row, offset[c - 1], 1, pm) = prev.d1.row(pm - 1).cast<cplx>();
        pp.A.block(row, o, 1, m) -= blk.d1.row(0).cast<cplx>();
      } else {
        pp.row_map[row] = RowTag::DomainU;
        pp.A.block(row, o, 1, m) = -blk.d2.row(l).cast<cplx>();
        cplx v = piece ? p.pieces()[*piece](x) : 0.0;
        if (extra) v += extra(x);
        pp.A(row, row) += v;
        pp.B(row, n + row) = 1.0;
      }
    }
  }
  return pp;
}

namespace {

struct GevOutput {
  Eigen::VectorXcd alpha;
  Eigen::VectorXcd beta;
  Eigen::MatrixXcd vr;
};

GevOutput zggev(Eigen::MatrixXcd a, Eigen::MatrixXcd b, bool vectors, int dense_limit) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n > dense_limit) {
    throw Error(ErrorCode::SolverFailure, "pencil of size " + std::to_string(n) + " exceeds the dense limit");
  }
  const double na = a.norm();
  const double nb = b.norm();
  GevOutput g{Eigen::VectorXcd(n), Eigen::VectorXcd(n), Eigen::MatrixXcd(vectors ? n : 1, vectors ? n : 1)};
  cplx dummy;
  const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(), n, b.data(), n,
                                        g.alpha.data(), g.beta.data(), &dummy, 1, g.vr.data(), vectors ? n : 1);
  if (info != 0) {
    throw Error(ErrorCode::SolverFailure, "zggev failed with info=" + std::to_string(info) +
                                              ", ||A||=" + std::to_string(na) + ", ||B||=" + std::to_string(nb));
  }
  return g;
}

bool is_infinite(cplx alpha, cplx beta, double cap) { return beta == cplx(0.0) || std::abs(alpha) > cap * std::abs(beta); }

// Appends lam after the residual test on the full pencil.
void accept(const PencilPair& pp, cplx lam, Eigen::VectorXcd x, bool vectors, EigenResult& res) {
  if (!vectors) {
    res.eigenvalues.push_back(lam);
    return;
  }
  const double nx = x.norm();
  if (nx == 0.0) {
    ++res.infinite_count;
    return;
  }
  x /= nx;
  const double r = (pp.A * x - lam * (pp.B * x)).norm();
  if (r > 1e-8 * res.norm_a) {
    ++res.rejected_count;
    return;
  }
  res.eigenvalues.push_back(lam);
  res.vectors.push_back(std::move(x));
  res.residuals.push_back(r);
}

}  // namespace

EigenResult solve_pencil(const PencilPair& pp, const SolveOptions& opts) {
  const GevOutput g = zggev(pp.A, pp.B, opts.vectors, opts.dense_limit);
  EigenResult res;
  res.norm_a = pp.A.norm();
  const double cap = 1e10 * (res.norm_a / std::max(pp.B.norm(), 1e-300) + 1.0);
  for (Eigen::Index j = 0; j < g.alpha.size(); ++j) {
    if (is_infinite(g.alpha(j), g.beta(j), cap)) {
      ++res.infinite_count;
      continue;
    }
    accept(pp, g.alpha(j) / g.beta(j), opts.vectors ? Eigen::VectorXcd(g.vr.col(j)) : Eigen::VectorXcd(), opts.vectors,
           res);
  }
  return res;
}

EigenResult solve_pencil_squared(const PencilPair& pp, const SolveOptions& opts) {
  const Eigen::Index n = pp.size() / 2;
  if (pp.B.topLeftCorner(n, n).cwiseAbs().maxCoeff() != 0.0 ||
      pp.A.topRightCorner(n, n).cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "boundary rows depend on lambda; use solve_pencil");
  }
  const Eigen::MatrixXcd K = pp.A.topLeftCorner(n, n);
  const Eigen::MatrixXcd M = pp.B.topRightCorner(n, n);
  const GevOutput g = zggev(K, M, opts.vectors, opts.dense_limit);
  EigenResult res;
  res.norm_a = pp.A.norm();
  const double cap = 1e10 * (K.norm() / std::max(M.norm(), 1e-300) + 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (is_infinite(g.alpha(j), g.beta(j), cap)) {
      res.infinite_count += 2;
      continue;
    }
    const cplx root = std::sqrt(g.alpha(j) / g.beta(j));
    for (const cplx lam : {root, -root}) {
      Eigen::VectorXcd x;
      if (opts.vectors) {
        x.resize(2 * n);
        x.head(n) = g.vr.col(j);
        x.tail(n) = lam * g.vr.col(j);
      }
      accept(pp, lam, std::move(x), opts.vectors, res);
      if (root == cplx(0.0)) break;
    }
  }
  return res;
}

std::vector<EigenMatch> match_eigenvalues(const std::vector<cplx>& coarse, const std::vector<cplx>& fine,
                                          double rel_tol, double origin_radius) {
  std::vector<EigenMatch> cand;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (std::abs(coarse[i]) < origin_radius) continue;
    for (std::size_t j = 0; j < fine.size(); ++j) {
      if (std::abs(fine[j]) < origin_radius) continue;
      const double d = std::abs(coarse[i] - fine[j]);
      if (d <= rel_tol * std::abs(fine[j])) cand.push_back({i, j, d});
    }
  }
  std::stable_sort(cand.begin(), cand.end(), [](const EigenMatch& a, const EigenMatch& b) { return a.distance < b.distance; });
  std::vector<char> used_c(coarse.size(), 0), used_f(fine.size(), 0);
  std::vector<EigenMatch> out;
  for (const auto& m : cand) {
    if (used_c[m.coarse] || used_f[m.fine]) continue;
    used_c[m.coarse] = used_f[m.fine] = 1;
    out.push_back(m);
  }
  return out;
}

ResonanceSet filtered_eigenvalues(const PotentialSpec& p, const Mesh& mesh, BoundaryScheme bc,
                                  const FilterOptions& opts, const ExtraPotential& extra) {
  const Mesh fine_mesh = mesh.refined(opts.refine_factor);
  SolveOptions so;
  so.vectors = opts.residual_check;
  if (2 * fine_mesh.total_nodes() > so.dense_limit) {
    throw Error(ErrorCode::SolverFailure, "refined pencil of size " + std::to_string(2 * fine_mesh.total_nodes()) +
                                              " exceeds the dense limit");
  }
  auto solve = [&](const Mesh& m) {
    const PencilPair pp = assemble_pencil(p, m, bc, extra);
    return bc == BoundaryScheme::Dirichlet ? solve_pencil_squared(pp, so) : solve_pencil(pp, so);
  };
  auto fine_future = std::async(std::launch::async, solve, std::cref(fine_mesh));
  const EigenResult coarse = solve(mesh);
  const EigenResult fine = fine_future.get();

  ResonanceSet set;
  set.engine = bc == BoundaryScheme::Outgoing ? Engine::Spectral : Engine::Capped;
  set.potential_hash = p.hash();
  for (const auto& m : match_eigenvalues(coarse.eigenvalues, fine.eigenvalues, opts.match_tol, opts.origin_radius)) {
    const cplx lam = fine.eigenvalues[m.fine];
    if (opts.window && !opts.window->contains(lam)) continue;
    if (std::abs(lam) <= opts.tol_axis) continue;
    set.entries.push_back({lam, classify(lam, opts.tol_axis), m.distance});
  }
  set.sort();
  return set;
}

}  // namespace respole
