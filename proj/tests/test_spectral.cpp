#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "respole/spectral.hpp"
#include "respole/transfer.hpp"
#include "test_util.hpp"

using namespace respole;

namespace {

const double kPi = std::acos(-1.0);

PotentialSpec square_well() { return PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 1}, {-1}); }

double nearest(const std::vector<cplx>& zs, cplx z) {
  double best = 1e300;
  for (const cplx& w : zs) best = std::min(best, std::abs(w - z));
  return best;
}

std::vector<cplx> lambdas(const ResonanceSet& rs) {
  std::vector<cplx> out;
  for (const auto& e : rs.entries) out.push_back(e.lambda);
  return out;
}

}  // namespace

TEST_CASE("cheb_block nodes and differentiation") {
  const auto r = cheb_block(2, -1.0, 1.0);
  REQUIRE(r.nodes.size() == 3);
  CHECK(r.nodes(0) == doctest::Approx(-1.0));
  CHECK(std::abs(r.nodes(1)) < 1e-15);
  CHECK(r.nodes(2) == doctest::Approx(1.0));

  const auto s = cheb_block(2, 0.0, 2.0);
  CHECK(s.nodes(0) == doctest::Approx(0.0));
  CHECK(s.nodes(1) == doctest::Approx(1.0));
  CHECK(s.nodes(2) == doctest::Approx(2.0));
  CHECK((s.d1 - r.d1 * (2.0 / 2.0)).norm() < 1e-14);

  const auto t = cheb_block(8, -1.0, 1.0);
  const auto u = cheb_block(8, 3.0, 3.5);
  CHECK((u.d1 - t.d1 * (2.0 / 0.5)).norm() < 1e-10 * t.d1.norm() * 4.0);
  CHECK((u.d2 - u.d1 * u.d1).norm() < 1e-12 * u.d2.norm());

  for (int n : {4, 8, 16, 24}) {
    for (auto [a, b] : {std::pair{-1.0, 1.0}, std::pair{0.0, 2.0}, std::pair{-3.0, 7.5}}) {
      const auto c = cheb_block(n, a, b);
      const Eigen::VectorXd x2 = c.nodes.array().square();
      const Eigen::VectorXd dx2 = c.d1 * x2;
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      CHECK((dx2 - 2.0 * c.nodes).cwiseAbs().maxCoeff() <= 1e-10 * scale * scale);
      // a degree-n polynomial is differentiated exactly
      Eigen::VectorXd pn = Eigen::VectorXd::Ones(c.nodes.size());
      Eigen::VectorXd dpn = Eigen::VectorXd::Zero(c.nodes.size());
      const Eigen::VectorXd y = (c.nodes.array() - a) / (b - a);
      for (int k = 0; k < n; ++k) {
        dpn = (dpn.array() * y.array() + pn.array() / (b - a)).matrix();
        pn = (pn.array() * y.array()).matrix();
      }
      CHECK((c.d1 * pn - dpn).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, dpn.cwiseAbs().maxCoeff()));
      CHECK(c.d1.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, 2.0 / (b - a)));
    }
  }
}

TEST_CASE("cheb_block and Mesh reject small orders") {
  CHECK(code_of([] { cheb_block(1, -1.0, 1.0); }) == ErrorCode::OrderTooSmall);
  CHECK(code_of([] { cheb_block(4, 1.0, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Mesh({{-1, 1}}, {3}); }) == ErrorCode::OrderTooSmall);
  CHECK(code_of([] { Mesh({{-1, 0}, {0.5, 1}}, {4, 4}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("assemble_pencil structure") {
  SUBCASE("single block of order 4 on the full line") {
    const auto p = square_well();
    const auto pp = assemble_pencil(p, Mesh({{-1, 1}}, {4}), BoundaryScheme::Outgoing);
    CHECK(pp.A.rows() == 10);
    CHECK(pp.A.cols() == 10);
    CHECK(pp.B.rows() == 10);
    const auto n_left = std::count(pp.row_map.begin(), pp.row_map.end(), RowTag::BoundaryLeft);
    const auto n_right = std::count(pp.row_map.begin(), pp.row_map.end(), RowTag::BoundaryRight);
    CHECK(n_left + n_right == 2);
    CHECK(std::count(pp.row_map.begin(), pp.row_map.end(), RowTag::DefinitionPsi) == 5);
  }
  SUBCASE("junction rows on a two-cell mesh") {
    const auto p = PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 0, 1}, {-1, 2});
    const auto pp = assemble_pencil(p, mesh_for(p, 6), BoundaryScheme::Outgoing);
    CHECK(pp.size() == 2 * 14);
    CHECK(std::count(pp.row_map.begin(), pp.row_map.end(), RowTag::JunctionU) == 1);
    CHECK(std::count(pp.row_map.begin(), pp.row_map.end(), RowTag::JunctionDu) == 1);
    CHECK(std::count(pp.row_map.begin(), pp.row_map.end(), RowTag::DefinitionPsi) == 14);
  }
  SUBCASE("zero potential: domain rows hold -D2 only") {
    const auto p = PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 1}, {0});
    const auto pp = assemble_pencil(p, Mesh({{-1, 1}}, {8}), BoundaryScheme::Outgoing);
    const auto c = cheb_block(8, -1.0, 1.0);
    const int n = 9;
    for (int i = 0; i < n; ++i) {
      if (pp.row_map[i] != RowTag::DomainU) continue;
      for (int j = 0; j < n; ++j) CHECK(std::abs(pp.A(i, j) + c.d2(i, j)) < 1e-12 * c.d2.norm());
      CHECK(pp.A.row(i).tail(n).cwiseAbs().maxCoeff() == 0.0);
      CHECK(std::abs(pp.B(i, n + i) - 1.0) < 1e-15);
    }
  }
  SUBCASE("breakpoints must be mesh endpoints") {
    const auto p = PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 0, 1}, {-1, 2});
    CHECK(code_of([&] { assemble_pencil(p, Mesh({{-1, 1}}, {8}), BoundaryScheme::Outgoing); }) ==
          ErrorCode::MeshMismatch);
    CHECK(code_of([&] { assemble_pencil(p, Mesh({{-1, 0}}, {8}), BoundaryScheme::Outgoing); }) ==
          ErrorCode::MeshMismatch);
  }
}

TEST_CASE("solve_pencil") {
  SUBCASE("diagonal pencil") {
    PencilPair pp;
    pp.A = Eigen::MatrixXcd::Zero(2, 2);
    pp.A(0, 0) = 1.0;
    pp.A(1, 1) = 2.0;
    pp.B = Eigen::MatrixXcd::Identity(2, 2);
    auto r = solve_pencil(pp);
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    REQUIRE(r.eigenvalues.size() == 2);
    CHECK(std::abs(r.eigenvalues[0] - 1.0) < 1e-14);
    CHECK(std::abs(r.eigenvalues[1] - 2.0) < 1e-14);
    CHECK(r.infinite_count == 0);
  }
  SUBCASE("residuals, count and singular B") {
    const auto p = PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 0.3, 1}, {-2, 1});
    const auto pp = assemble_pencil(p, mesh_for(p, 10), BoundaryScheme::Outgoing);
    const auto r = solve_pencil(pp);
    REQUIRE(r.vectors.size() == r.eigenvalues.size());
    CHECK(r.infinite_count > 0);
    CHECK(static_cast<Eigen::Index>(r.eigenvalues.size()) + r.infinite_count + r.rejected_count == pp.size());
    CHECK(r.eigenvalues.size() > 10);
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      const Eigen::VectorXcd& x = r.vectors[i];
      const double res = (pp.A * x - r.eigenvalues[i] * (pp.B * x)).norm() / x.norm();
      CHECK(res <= 1e-8 * r.norm_a);
      CHECK(r.residuals[i] <= 1e-8 * r.norm_a);
    }
  }
  SUBCASE("dense limit") {
    const auto p = square_well();
    const auto pp = assemble_pencil(p, Mesh({{-1, 1}}, {30}), BoundaryScheme::Outgoing);
    SolveOptions so;
    so.dense_limit = 20;
    CHECK(code_of([&] { solve_pencil(pp, so); }) == ErrorCode::SolverFailure);
  }
}

TEST_CASE("solve_pencil_squared") {
  SUBCASE("free Dirichlet box has the spectrum n pi / M") {
    const double m = 5.0;
    const auto p = PotentialSpec::piecewise_constant(Domain::half(BoundaryCondition::Dirichlet), {0, m}, {0});
    const auto pp = assemble_pencil(p, Mesh({{0, m}}, {32}), BoundaryScheme::Dirichlet);
    const auto r = solve_pencil_squared(pp);
    for (int n = 1; n <= 6; ++n) {
      CHECK(nearest(r.eigenvalues, n * kPi / m) < 1e-9);
      CHECK(nearest(r.eigenvalues, -n * kPi / m) < 1e-9);
    }
    for (const cplx& z : r.eigenvalues) CHECK(std::abs(z.imag()) < 1e-6 * std::max(1.0, std::abs(z)));
  }
  SUBCASE("agrees with the full solve on a Dirichlet pencil") {
    const auto p = PotentialSpec::piecewise_constant(Domain::full_line(), {-2, -0.5, 1, 2}, {1, -3, 2});
    const auto pp = assemble_pencil(p, mesh_for(p, 10), BoundaryScheme::Dirichlet,
                                    [](double x) { return cplx(0, -0.5 * x * x); });
    const auto a = solve_pencil(pp);
    const auto b = solve_pencil_squared(pp);
    int small = 0;
    for (const cplx& z : a.eigenvalues) {
      if (std::abs(z) > 30) continue;
      ++small;
      CHECK(nearest(b.eigenvalues, z) <= 1e-8 * std::max(1.0, std::abs(z)));
    }
    CHECK(small > 10);
    for (std::size_t i = 0; i < b.eigenvalues.size(); ++i) {
      const Eigen::VectorXcd& x = b.vectors[i];
      CHECK((pp.A * x - b.eigenvalues[i] * (pp.B * x)).norm() / x.norm() <= 1e-8 * b.norm_a);
    }
  }
  SUBCASE("refuses lambda-dependent boundary rows") {
    const auto pp = assemble_pencil(square_well(), Mesh({{-1, 1}}, {8}), BoundaryScheme::Outgoing);
    CHECK(code_of([&] { solve_pencil_squared(pp); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("filtered_eigenvalues") {
  SUBCASE("free problem leaves nothing") {
    const auto p = PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 1}, {0});
    const auto rs = filtered_eigenvalues(p, mesh_for(p, 24), BoundaryScheme::Outgoing);
    CHECK(rs.entries.empty());
  }
  SUBCASE("square well against the secular zeros and the matching equations") {
    const auto p = square_well();
    const Region w{0.5, 6, -2, -1e-3};
    FilterOptions fo;
    fo.window = w;
    const auto rs = filtered_eigenvalues(p, mesh_for(p, 24), BoundaryScheme::Outgoing, fo);
    const auto sec = find_resonances_secular(p, w);
    const auto ref = oracle::well_resonances(1.0, 1.0, w.re_lo, w.re_hi, w.im_lo, w.im_hi);
    REQUIRE(!rs.entries.empty());
    REQUIRE(rs.entries.size() == ref.size());
    std::vector<cplx> sl;
    for (const auto& z : sec) sl.push_back(z.lambda);
    for (const auto& e : rs.entries) {
      CHECK(nearest(sl, e.lambda) <= 1e-6);
      CHECK(nearest(ref, e.lambda) <= 1e-6);
      CHECK(e.cls == PoleClass::Resonance);
      CHECK(e.accuracy <= 1e-6 * std::abs(e.lambda));
    }
  }
  SUBCASE("closure under lambda -> -conj(lambda)") {
    const auto p = square_well();
    FilterOptions fo;
    const auto rs = filtered_eigenvalues(p, mesh_for(p, 24), BoundaryScheme::Outgoing, fo);
    const auto ls = lambdas(rs);
    REQUIRE(ls.size() >= 4);
    for (const cplx& z : ls) CHECK(nearest(ls, -std::conj(z)) <= 10 * fo.match_tol * std::abs(z));
  }
  SUBCASE("bound state of a half-line well") {
    const auto p = PotentialSpec::piecewise_constant(Domain::half(BoundaryCondition::Dirichlet), {0, 1}, {-9});
    FilterOptions fo;
    fo.window = Region{-1, 1, 0.5, 3};
    const auto rs = filtered_eigenvalues(p, mesh_for(p, 24), BoundaryScheme::Outgoing, fo);
    REQUIRE(rs.entries.size() == 1);
    CHECK(rs.entries[0].cls == PoleClass::Bound);
    CHECK(rs.entries[0].lambda.imag() == doctest::Approx(oracle::dirichlet_well_bound(9.0)[0]).epsilon(1e-8));
  }
}

TEST_CASE("spectral convergence on the square well") {
  const auto p = square_well();
  const auto ref = oracle::well_resonances(1.0, 1.0, 2.0, 3.0, -2.5, -1.0);
  REQUIRE(ref.size() == 1);
  std::vector<double> err;
  for (int n : {12, 18, 24}) {
    const auto pp = assemble_pencil(p, mesh_for(p, n), BoundaryScheme::Outgoing);
    err.push_back(nearest(solve_pencil(pp).eigenvalues, ref[0]));
  }
  CHECK(err[0] > 0.0);
  CHECK(err[1] <= std::max(err[0] / 10, 1e-10));
  CHECK(err[2] <= std::max(err[1] / 10, 1e-10));
}

TEST_CASE("eigenvectors are continuous across junctions") {
  const auto p = PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 0.2, 1}, {-2, -1});
  const Mesh mesh = mesh_for(p, 20);
  REQUIRE(mesh.cells.size() == 2);
  const auto pp = assemble_pencil(p, mesh, BoundaryScheme::Outgoing);
  const auto r = solve_pencil(pp);
  const auto c0 = cheb_block(mesh.orders[0], mesh.cells[0].lo, mesh.cells[0].hi);
  const auto c1 = cheb_block(mesh.orders[1], mesh.cells[1].lo, mesh.cells[1].hi);
  const int n0 = mesh.orders[0] + 1, n1 = mesh.orders[1] + 1;
  int checked = 0;
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
    if (std::abs(r.eigenvalues[k]) > 8) continue;
    const Eigen::VectorXcd u = r.vectors[k].head(n0 + n1);
    const double unorm = u.cwiseAbs().maxCoeff();
    const Eigen::VectorXcd u0 = u.head(n0), u1 = u.tail(n1);
    const cplx du0 = (c0.d1.row(n0 - 1).cast<cplx>() * u0)(0);
    const cplx du1 = (c1.d1.row(0).cast<cplx>() * u1)(0);
    CHECK(std::abs(u0(n0 - 1) - u1(0)) <= 1e-7 * unorm);
    CHECK(std::abs(du0 - du1) <= 1e-7 * unorm * std::max(1.0, std::abs(r.eigenvalues[k])));
    ++checked;
  }
  CHECK(checked > 4);
}

TEST_CASE("match_eigenvalues is injective and respects the tolerance") {
  const std::vector<cplx> a{{1, -1}, {2, -1}, {3, 0}, {1e-8, 0}};
  const std::vector<cplx> b{{1 + 1e-9, -1}, {1 - 1e-9, -1}, {3.1, 0}, {0, 1e-8}};
  const auto m = match_eigenvalues(a, b, 1e-6, 1e-6);
  REQUIRE(m.size() == 1);
  CHECK(m[0].coarse == 0);
  CHECK(m[0].distance <= 1e-9 * 1.0001);
}
