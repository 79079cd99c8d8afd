// Acceptance checks.  One line per criterion:
//   PASS|FAIL <n> <name> (<seconds>s): <measurements>
// Usage: acceptance [--criterion N]...

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "respole/absorber.hpp"
#include "respole/io.hpp"
#include "respole/resonance.hpp"
#include "respole/spectral.hpp"
#include "respole/transfer.hpp"

using namespace respole;
namespace fs = std::filesystem;

namespace {

const Domain kHalf = Domain::half(BoundaryCondition::Dirichlet);

// Values frozen from the first transfer-engine run of the barrier scan; 5% tolerance.
constexpr double kPinnedCHat = 2.24499;
constexpr double kPinnedR2 = 0.557964;
constexpr double kPinnedControlMin = 0.0504399;
const std::map<int, double> kPinnedMaxDefect = {
    {2, 4.32873e-3}, {3, 2.30321e-3}, {4, 7.37302e-6}, {5, 4.75476e-6}, {6, 7.46167e-6}, {7, 8.7519e-9},
    {8, 1.24551e-8}, {9, 3.84604e-8}, {10, 2.06573e-11}};
constexpr double kPinTol = 0.05;

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << "[failed: " << what << "] ";
    }
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

bool pinned(double measured, double expected) { return std::abs(measured - expected) <= kPinTol * std::abs(expected); }

double nearest(const std::vector<cplx>& zs, cplx z) {
  double best = INFINITY;
  for (const cplx& w : zs) best = std::min(best, std::abs(w - z));
  return best;
}

PotentialSpec well_half(double depth, double width = 1.0) {
  return PotentialSpec::piecewise_constant(kHalf, {0, width}, {-depth});
}

PotentialSpec well_full() { return PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 1}, {-1}); }

std::vector<double> q_grid() {
  std::vector<double> q;
  for (int i = 1; i <= 10; ++i) q.push_back(i);
  return q;
}

void transfer_identities(Outcome& o) {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> uc(-20, 20), ul(0.01, 2.0), ur(-5, 5), ui(-3, 3);
  double det_err = 0.0, semi_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double c = uc(rng), l1 = ul(rng), l2 = ul(rng);
    const cplx lam(ur(rng), ui(rng));
    const TransferMatrix m = segment_matrix(c, l1, lam);
    det_err = std::max(det_err, std::abs(m.determinant() - 1.0) / std::max(1.0, m.cwiseAbs().maxCoeff()));
    const TransferMatrix whole = segment_matrix(c, l1 + l2, lam);
    const TransferMatrix prod = segment_matrix(c, l2, lam) * segment_matrix(c, l1, lam);
    semi_err = std::max(semi_err, (whole - prod).cwiseAbs().maxCoeff() / std::max(1.0, whole.cwiseAbs().maxCoeff()));
  }
  o.note << "max |det-1| " << sci(det_err) << ", max semigroup " << sci(semi_err) << "; ";
  o.require(det_err <= 1e-10, "det");
  o.require(semi_err <= 1e-12, "semigroup");
}

void dtn_closed_form(Outcome& o) {
  const auto zero = PotentialSpec::zero(kHalf);
  double v_err = 0.0, vd_err = 0.0, fd_err = 0.0;
  for (double k : {0.1, 1.0, 2.0, 10.0}) {
    v_err = std::max(v_err, std::abs(riccati_v(zero, k, 1.0) / oracle::kcoth(k) - 1.0));
    const double vd = riccati_v_dot(zero, k, 1.0);
    vd_err = std::max(vd_err, std::abs(vd / oracle::kcoth_dot(k) - 1.0));
    const double h = 1e-5 * k;
    const double fd = (riccati_v(zero, k + h, 1.0) - riccati_v(zero, k - h, 1.0)) / (2 * h);
    fd_err = std::max(fd_err, std::abs(vd / fd - 1.0));
  }
  o.note << "v rel " << sci(v_err) << ", vdot vs analytic " << sci(vd_err) << ", vs finite difference " << sci(fd_err)
         << "; ";
  o.require(v_err <= 1e-9, "k coth k");
  o.require(vd_err <= 1e-6 && fd_err <= 1e-6, "derivative");
}

void dotv_bound(Outcome& o) {
  const auto p = well_half(9.0, 0.5);
  double lo = INFINITY;
  for (int i = 0; i <= 400; ++i) lo = std::min(lo, riccati_v_dot(p, 20.0 + 40.0 * i / 400, 1.0));
  o.note << "min vdot on [20,60] = " << sci(lo) << "; ";
  o.require(lo >= 0.9, "vdot >= 0.9");
}

void square_well_states(Outcome& o) {
  const AxisProblem p9(well_half(9.0), std::nullopt, 1.0);
  const double hi9 = default_k_ceiling(p9);
  const auto b9 = find_axis_states(p9, 1e-3, hi9, AxisKind::Bound);
  const auto a9 = find_axis_states(p9, 1e-3, hi9, AxisKind::Antibound);
  const auto ref = oracle::dirichlet_well_bound(9.0);
  o.require(b9.size() == 1 && ref.size() == 1, "one bound state of the -9 well");
  if (!b9.empty() && !ref.empty()) {
    o.note << "-9 well: k = " << io::fmt(b9[0].k) << " (oracle " << io::fmt(ref[0]) << ")";
    o.require(std::abs(b9[0].k - ref[0]) <= 1e-8, "bisection agreement");
    o.require(std::abs(b9[0].k - 1.95) <= 0.01, "k near 1.95");
  }
  o.note << ", antibound " << a9.size() << "; ";
  o.require(a9.empty(), "no antibound state for -9");

  const AxisProblem p25(well_half(25.0), std::nullopt, 1.0);
  const double hi25 = default_k_ceiling(p25);
  const auto b25 = find_axis_states(p25, 1e-3, hi25, AxisKind::Bound);
  const auto a25 = find_axis_states(p25, 1e-3, hi25, AxisKind::Antibound);
  o.note << "-25 well: bound " << b25.size() << ", antibound " << a25.size() << "; ";
  o.require(b25.size() == 2, "two bound states for -25");
  o.require(a25.size() >= 1, "an antibound state for -25");
}

void cross_engine(Outcome& o) {
  const auto p = well_full();
  const Region w{0.5, 6, -2, -1e-3};
  const auto sec = find_resonances_secular(p, w);
  FilterOptions fo;
  fo.window = Region{-6, 6, -2, -1e-3};
  const auto rs = filtered_eigenvalues(p, mesh_for(p, 24), BoundaryScheme::Outgoing, fo);
  std::vector<cplx> all, inside, zeros;
  for (const auto& e : rs.entries) {
    all.push_back(e.lambda);
    if (w.contains(e.lambda)) inside.push_back(e.lambda);
  }
  for (const auto& z : sec) zeros.push_back(z.lambda);
  double match = 0.0, closure = 0.0;
  for (const cplx& z : inside) match = std::max(match, nearest(zeros, z));
  for (const cplx& z : zeros) match = std::max(match, nearest(inside, z));
  for (const cplx& z : all) closure = std::max(closure, nearest(all, -std::conj(z)));
  o.note << inside.size() << " spectral vs " << zeros.size() << " secular zeros, max distance " << sci(match)
         << ", -conj closure " << sci(closure) << "; ";
  o.require(!zeros.empty() && inside.size() == zeros.size(), "same count");
  o.require(match <= 1e-6, "agreement 1e-6");
  o.require(closure <= 1e-5, "closure 1e-5");
}

void spectral_accuracy(Outcome& o) {
  const auto p = well_full();
  const auto ref = oracle::well_resonances(1.0, 1.0, 2.0, 3.0, -2.5, -1.0);
  o.require(ref.size() == 1, "tracked resonance");
  if (ref.size() != 1) return;
  std::vector<double> err;
  for (int n : {12, 18, 24}) {
    err.push_back(nearest(solve_pencil(assemble_pencil(p, mesh_for(p, n), BoundaryScheme::Outgoing)).eigenvalues, ref[0]));
  }
  o.note << "tracked error at 12/18/24: " << sci(err[0]) << ", " << sci(err[1]) << ", " << sci(err[2]) << "; ";
  for (int i = 0; i < 2; ++i) o.require(err[i + 1] <= std::max(err[i] / 10, 1e-10), "tenfold drop");
  const auto free = PotentialSpec::piecewise_constant(Domain::full_line(), {-1, 1}, {0});
  const auto rs = filtered_eigenvalues(free, mesh_for(free, 24), BoundaryScheme::Outgoing);
  o.note << "free filtered set size " << rs.entries.size() << "; ";
  o.require(rs.entries.empty(), "free set empty");
}

const SymmetryScan& barrier_scan() {
  static const SymmetryScan s = q_scan(well_half(4.0), Barrier{1, 2, 1}, q_grid(), 0.5);
  return s;
}

void barrier_scan_checks(Outcome& o) {
  const SymmetryScan& s = barrier_scan();
  // each state's defect history, tracked from the deepest state
  const auto branches = tracked_defects(s);
  int violations = 0;
  for (const auto& br : branches) {
    std::optional<double> prev;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (s.points[i].q < 3 || !br[i]) continue;
      const double d = *br[i];
      if (prev && !(d < *prev || (d <= kDefectFloor && *prev <= kDefectFloor))) ++violations;
      prev = d;
    }
  }
  o.note << branches.size() << " tracked states, " << violations << " increases for q>=3";
  std::string nonmono;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    const auto a = s.points[i - 1].max_defect(), b = s.points[i].max_defect();
    if (s.points[i - 1].q >= 3 && a && b && *b > *a) nonmono += " " + sci(s.points[i].q);
  }
  if (!nonmono.empty()) o.note << " (per-q maximum rises at q =" << nonmono << ")";
  o.note << "; ";
  o.require(violations == 0, "monotone decrease");

  const auto last = s.points.back().max_defect();
  o.note << "defect at q=10 " << (last ? sci(*last) : "none") << "; ";
  o.require(last && *last <= 1e-6, "final defect <= 1e-6");

  o.require(s.fit.has_value(), "fit exists");
  if (s.fit) {
    o.note << "c_hat " << sci(s.fit->c_hat) << ", r2 " << sci(s.fit->r2) << " over " << s.fit->points << " defects; ";
    o.require(s.fit->c_hat > 0, "c_hat > 0");
    o.require(s.fit->r2 >= 0.9, "r2 >= 0.9");
    o.require(pinned(s.fit->c_hat, kPinnedCHat) && pinned(s.fit->r2, kPinnedR2), "pinned fit");
  }
  for (const auto& pt : s.points) {
    const auto it = kPinnedMaxDefect.find(static_cast<int>(pt.q));
    if (it == kPinnedMaxDefect.end()) continue;
    const auto m = pt.max_defect();
    if (!m || !pinned(*m, it->second)) o.require(false, "pinned defect at q=" + sci(pt.q) + " got " + (m ? sci(*m) : "none"));
  }

  const SymmetryScan control = q_scan(well_half(4.0), std::nullopt, q_grid(), 0.5);
  double lo = INFINITY;
  for (const auto& pt : control.points)
    for (const auto& pr : pt.pairing.pairs) lo = std::min(lo, pr.defect);
  o.note << "no-barrier min defect " << sci(lo) << "; ";
  o.require(lo >= 1e-3, "control min defect >= 1e-3");
  o.require(pinned(lo, kPinnedControlMin), "pinned control");
}

void never_symmetric(Outcome& o) {
  const SymmetryScan& s = barrier_scan();
  double overall = INFINITY;
  std::string per_q;
  for (const auto& pt : s.points) {
    const AxisProblem prob(well_half(4.0), Barrier{1, 2, 1}, pt.q);
    double lo = INFINITY, sep = INFINITY;
    auto probe = [&](double k, AxisKind other) {
      lo = std::min(lo, std::abs(axis_secular(prob, k, other)));
      // s+ - s- at the same k, from the closed form of the barrier terms
      const double k1 = std::sqrt(k * k + pt.q * pt.q);
      const auto [bp, bm] = barrier_betas(k, k1);
      const double e = std::exp(-2.0 * k1);
      sep = std::min(sep, std::abs(k1 * ((1 - bp * e) / (1 + bp * e) - (1 - bm * e) / (1 + bm * e))));
    };
    for (double k : pt.bound_k) probe(k, AxisKind::Antibound);
    for (double k : pt.antibound_k) probe(k, AxisKind::Bound);
    if (std::isfinite(lo)) {
      per_q += " q=" + sci(pt.q) + ":" + sci(lo) + "/" + sci(sep);
      overall = std::min(overall, lo);
    }
  }
  o.note << "min |other secular| at roots (measured/closed form)" << per_q << "; ";
  o.require(overall >= 1e-8, "cross value >= 1e-8");
}

void absorber_checks(Outcome& o) {
  double free_err = 0.0;
  for (double lam : {0.5, 1.0, 2.0, 3.0, 5.0}) {
    const AbsorberSpec off{1.0, 2.0, 0.0, AbsorberProfile::Quadratic};
    const cplx r = rho(off, lam);
    free_err = std::max({free_err, std::abs(std::abs(r) - 1.0), std::abs(r + std::exp(cplx(0, 2 * lam)))});
  }
  o.note << "free |rho|-1 " << sci(free_err) << "; ";
  o.require(free_err <= 1e-9, "free layer");

  double worst = 0.0;
  const auto def = AbsorberSpec::with_defaults(1.0);
  for (int i = 0; i <= 200; ++i) worst = std::max(worst, std::abs(rho(def, 1.0 + 4.0 * i / 200)));
  o.note << "default max |rho| on [1,5] " << sci(worst) << "; ";
  o.require(worst <= 1e-3, "default |rho| <= 1e-3");

  auto capped_check = [&](const PotentialSpec& p, const AbsorberSpec& a, const Region& w, const std::string& name) {
    FilterOptions fo;
    fo.window = w;
    const auto rs = filtered_eigenvalues(p, capped_mesh(p, a, 24, 5), BoundaryScheme::Dirichlet, fo,
                                         absorber_term(a, p.domain()));
    std::vector<cplx> capped;
    for (const auto& e : rs.entries) capped.push_back(e.lambda);
    const auto exact = find_resonances_secular(p, w);
    double tight = INFINITY;
    int ok = 0;
    for (const auto& z : exact) {
      const double r = std::abs(rho(a, z.lambda));
      const double d = nearest(capped, z.lambda);
      if (d <= 5 * r * std::abs(z.lambda)) ++ok;
      tight = std::min(tight, 5 * r * std::abs(z.lambda));
    }
    o.note << name << ": " << ok << "/" << exact.size() << " within 5|rho||lambda| (smallest bound " << sci(tight)
           << "); ";
    o.require(!exact.empty() && ok == static_cast<int>(exact.size()), name);
  };
  capped_check(well_full(), AbsorberSpec::with_defaults(1.0), {0.5, 6, -2, -1e-3}, "V=-1 well");
  // narrow resonances where |rho| is small, so the bound has content
  capped_check(PotentialSpec::piecewise_constant(Domain::full_line(), {-2, -1.5, 1.5, 2}, {10, 0, 10}),
               AbsorberSpec::with_defaults(2.0), {0.5, 5, -0.5, -1e-3}, "double barrier");
}

int run_cli(const std::string& args) {
  const int st = std::system((std::string(RESPOLE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void determinism(Outcome& o) {
  const fs::path d = fs::temp_directory_path() / "respole_acceptance";
  fs::create_directories(d);
  const std::string data = RESPOLE_DATA;
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"squarepot --potential " + data + "/well1.txt --out ", {".json", ".csv"}},
      {"squarepot --potential " + data + "/well1.txt --engine transfer --window 0.5,6,-2,-1e-3 --out ",
       {".json", ".csv"}},
      {"scan --potential " + data + "/v0.txt --barrier 1,2,1 --format csv --out ", {".csv", ".summary.json"}},
      {"rho --lambda 2,0 --lambda 3,-0.1 --out ", {".csv"}},
  };
  int differing = 0, files = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& [args, exts] = runs[i];
    const std::string a = (d / ("a" + std::to_string(i))).string(), b = (d / ("b" + std::to_string(i))).string();
    const bool ok = run_cli(args + a + exts[0]) == 0 && run_cli(args + b + exts[0]) == 0;
    o.require(ok, "cli run " + std::to_string(i));
    if (!ok) continue;
    for (const auto& e : exts) {
      ++files;
      if (io::read_file(a + e) != io::read_file(b + e)) ++differing;
    }
  }
  fs::remove_all(d);
  o.note << files << " files compared, " << differing << " differ; ";
  o.require(differing == 0, "byte-identical");
}

void spline_chart(Outcome& o) {
  const std::vector<double> v{0, 40, -80, 40, 0}, k{-2, -1, 0, 1, 2};
  const auto p = spline_build(v, k);
  FilterOptions fo;
  fo.window = Region{-15, 15, -4, 4};
  const auto rs = filtered_eigenvalues(p, mesh_for(p, 24), BoundaryScheme::Outgoing, fo);
  std::vector<cplx> all;
  int below = 0;
  for (const auto& e : rs.entries) {
    all.push_back(e.lambda);
    if (e.cls == PoleClass::Resonance && e.lambda.imag() < 0) ++below;
  }
  double closure = 0.0;
  for (const cplx& z : all) closure = std::max(closure, nearest(all, -std::conj(z)));
  o.note << rs.count(PoleClass::Bound) << " bound, " << rs.count(PoleClass::Antibound) << " antibound, " << below
         << " resonances below the axis, -conj closure " << sci(closure) << "; ";
  o.require(rs.count(PoleClass::Bound) >= 1, "bound states on the positive imaginary axis");
  o.require(below >= 4, "string of resonances");
  o.require(closure <= 1e-5, "conjugate symmetry");
}

struct Criterion {
  std::string id;
  std::string name;
  double time_limit;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<std::string> only;
  app.add_option("--criterion", only, "criterion id (1-10 or spline); repeatable");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {"1", "transfer-matrix identities", 1, transfer_identities},
      {"2", "DtN closed form", 1, dtn_closed_form},
      {"3", "vdot lower bound", 5, dotv_bound},
      {"4", "square-well bound/antibound states", 5, square_well_states},
      {"5", "cross-engine equivalence", 60, cross_engine},
      {"6", "spectral accuracy and free filter", 120, spectral_accuracy},
      {"7", "barrier symmetry scan", 60, barrier_scan_checks},
      {"8", "never exactly symmetric", 60, never_symmetric},
      {"9", "absorber", 60, absorber_checks},
      {"10", "CLI determinism", 5, determinism},
      {"spline", "spline resonance chart", 120, spline_chart},
  };

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.time_limit, "runtime limit " + sci(c.time_limit) + "s");
    std::printf("%s %s %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(), secs,
                o.note.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
