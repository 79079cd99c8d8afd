// respole: resonances of compactly supported 1-D potentials.
//
//   respole squarepot --potential well.txt --window 0.5,6,-2,-1e-3 --out res.json
//   respole splinepot --potential spline.txt --window -15,15,-4,4 --out spline.csv --format csv
//   respole scan --potential v0.txt --barrier 1,2,1 --q-min 1 --q-max 10 --q-steps 10 --out scan.csv
//   respole rho --lambda 2,0 --lambda 3,0

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "respole/absorber.hpp"
#include "respole/error.hpp"
#include "respole/io.hpp"
#include "respole/resonance.hpp"
#include "respole/spectral.hpp"
#include "respole/transfer.hpp"

namespace {

using namespace respole;

struct RunConfig {
  std::string potential;
  std::string out;
  std::string format = "json";
  std::string window;
  int order = 24;
  double match_tol = 1e-6;
  std::string engine;
  std::string barrier;
  double q_min = 1.0;
  double q_max = 10.0;
  int q_steps = 10;
  double k0 = 0.5;
  std::vector<std::string> lambdas;
  std::optional<double> sigma;
  std::optional<double> width;
  std::optional<double> absorber_start;
  int absorber_cells = 0;
};

void add_shared(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--potential", cfg.potential, "potential description file");
  sub->add_option("--out", cfg.out, "output path (stdout when omitted)");
  sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--window", cfg.window, "re_lo,re_hi,im_lo,im_hi");
  sub->add_option("--order", cfg.order, "collocation order per cell");
  sub->add_option("--match-tol", cfg.match_tol, "relative coarse/fine match tolerance");
  sub->add_option("--engine", cfg.engine, "transfer, spectral or capped");
  sub->add_option("--barrier", cfg.barrier, "A,B,V1");
  sub->add_option("--q-min", cfg.q_min);
  sub->add_option("--q-max", cfg.q_max);
  sub->add_option("--q-steps", cfg.q_steps);
  sub->add_option("--k0", cfg.k0, "smallest |k| entering the defect pairing");
  sub->add_option("--sigma", cfg.sigma, "absorber strength");
  sub->add_option("--width", cfg.width, "absorber width M - L");
  sub->add_option("--absorber-start", cfg.absorber_start, "absorber start L");
  sub->add_option("--absorber-cells", cfg.absorber_cells, "collocation cells per absorbing layer");
}

Error input(const std::string& msg) { return Error(ErrorCode::InvalidArgument, msg); }

std::optional<Region> parse_window(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto w = io::parse_list(s);
  if (w.size() != 4) throw input("--window needs four numbers");
  Region r{w[0], w[1], w[2], w[3]};
  if (!r.valid()) throw input("--window is empty");
  return r;
}

std::optional<Barrier> parse_barrier(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto b = io::parse_list(s);
  if (b.size() != 3) throw input("--barrier needs A,B,V1");
  return Barrier{b[0], b[1], b[2]};
}

AbsorberSpec absorber_for(const RunConfig& cfg, const std::optional<io::PotentialFile>& file) {
  double start = 1.0;
  if (file) {
    const Interval s = file->potential.support();
    if (!file->potential.empty()) start = std::max(std::abs(s.lo), std::abs(s.hi));
  }
  AbsorberSpec a = file && file->absorber ? *file->absorber : AbsorberSpec::with_defaults(start);
  if (cfg.absorber_start) {
    const double w = a.width();
    a.start = *cfg.absorber_start;
    a.end = a.start + w;
  }
  if (cfg.sigma) a.sigma = *cfg.sigma;
  if (cfg.width) a.end = a.start + *cfg.width;
  a.validate();
  return a;
}

void emit(const RunConfig& cfg, const std::string& primary, const std::string& companion,
          const std::string& companion_ext) {
  if (cfg.out.empty()) {
    std::cout << primary;
    return;
  }
  io::write_atomic(cfg.out, primary);
  if (!companion.empty()) {
    std::filesystem::path p(cfg.out);
    p.replace_extension(companion_ext);
    if (p.string() != cfg.out) io::write_atomic(p.string(), companion);
  }
}

int cmd_resonances(const RunConfig& cfg, const std::string& kind) {
  if (cfg.potential.empty()) throw input("--potential is required");
  const io::PotentialFile file = io::load_potential(cfg.potential);
  if (file.kind != kind) throw Error(ErrorCode::ParseError, "file kind is " + file.kind + ", expected " + kind);
  const PotentialSpec& p = file.potential;
  const auto window = parse_window(cfg.window);
  if (cfg.order < 4) throw Error(ErrorCode::OrderTooSmall, "--order must be at least 4");
  const Engine engine = parse_engine(cfg.engine.empty() ? "spectral" : cfg.engine);

  ResonanceSet rs;
  if (engine == Engine::Transfer) {
    if (!window) throw input("the transfer engine needs --window");
    rs.engine = Engine::Transfer;
    for (const auto& z : find_resonances_secular(p, *window)) {
      rs.entries.push_back({z.lambda, classify(z.lambda), z.residual});
    }
  } else {
    FilterOptions fo;
    fo.match_tol = cfg.match_tol;
    fo.window = window;
    if (engine == Engine::Spectral) {
      rs = filtered_eigenvalues(p, mesh_for(p, cfg.order), BoundaryScheme::Outgoing, fo);
    } else {
      const AbsorberSpec abs = absorber_for(cfg, file);
      const int cells = cfg.absorber_cells > 0 ? cfg.absorber_cells
                                               : std::max(1, static_cast<int>(std::ceil(abs.width() / 6.0)));
      rs = filtered_eigenvalues(p, capped_mesh(p, abs, cfg.order, cells), BoundaryScheme::Dirichlet, fo,
                                absorber_term(abs, p.domain()));
    }
  }
  rs.potential_hash = p.hash();
  rs.sort();
  const std::string json = io::resonance_json(rs);
  const std::string csv = io::resonance_csv(rs);
  if (cfg.format == "json") emit(cfg, json, csv, ".csv");
  else emit(cfg, csv, json, ".json");
  return 0;
}

int cmd_scan(const RunConfig& cfg) {
  if (cfg.potential.empty()) throw input("--potential is required");
  if (cfg.q_steps < 2) throw input("--q-steps must be at least 2");
  if (!(cfg.q_min > 0.0) || !(cfg.q_max > cfg.q_min)) throw input("need 0 < q_min < q_max");
  if (!(cfg.k0 >= 0.0)) throw input("--k0 must be nonnegative");
  const io::PotentialFile file = io::load_potential(cfg.potential);
  const auto barrier = parse_barrier(cfg.barrier);
  ScanOptions so;
  so.engine = parse_engine(cfg.engine.empty() ? "transfer" : cfg.engine);
  so.order = cfg.order;
  so.match_tol = cfg.match_tol;

  std::vector<double> q_grid;
  for (int i = 0; i < cfg.q_steps; ++i) {
    q_grid.push_back(i + 1 == cfg.q_steps ? cfg.q_max
                                          : cfg.q_min + (cfg.q_max - cfg.q_min) * i / (cfg.q_steps - 1));
  }
  const SymmetryScan scan = q_scan(file.potential, barrier, q_grid, cfg.k0, so);
  const std::string csv = io::scan_csv(scan);
  const std::string summary = io::summary_json(io::summarize(scan, so.engine, barrier));
  if (cfg.out.empty()) {
    std::cout << (cfg.format == "json" ? summary : csv);
    return 0;
  }
  std::filesystem::path stem(cfg.out);
  stem.replace_extension();
  if (cfg.format == "json") {
    io::write_atomic(cfg.out, summary);
    io::write_atomic(stem.string() + ".csv", csv);
  } else {
    io::write_atomic(cfg.out, csv);
    io::write_atomic(stem.string() + ".summary.json", summary);
  }
  return 0;
}

int cmd_rho(const RunConfig& cfg) {
  if (cfg.lambdas.empty()) throw input("at least one --lambda re,im is required");
  std::optional<io::PotentialFile> file;
  if (!cfg.potential.empty()) file = io::load_potential(cfg.potential);
  const AbsorberSpec abs = absorber_for(cfg, file);
  std::vector<cplx> lams;
  for (const auto& s : cfg.lambdas) {
    const auto v = io::parse_list(s);
    if (v.size() != 2) throw input("--lambda needs re,im");
    const cplx l(v[0], v[1]);
    if (l == cplx(0.0)) throw input("lambda must be nonzero");
    lams.push_back(l);
  }
  std::string out = "re_lambda,im_lambda,re_rho,im_rho,abs_rho,re_lambda_hat,im_lambda_hat\n";
  for (const cplx l : lams) {
    const ReflectionData r = reflection(abs, l);
    out += io::fmt(l.real()) + "," + io::fmt(l.imag()) + "," + io::fmt(r.rho.real()) + "," + io::fmt(r.rho.imag()) +
           "," + io::fmt(std::abs(r.rho)) + "," + io::fmt(r.lambda_hat.real()) + "," +
           io::fmt(r.lambda_hat.imag()) + "\n";
  }
  if (cfg.out.empty()) std::cout << out;
  else io::write_atomic(cfg.out, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances, bound and antibound states of 1-D Schrodinger operators"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto* sq = app.add_subcommand("squarepot", "piecewise-constant potential");
  auto* sp = app.add_subcommand("splinepot", "cubic spline potential");
  auto* sc = app.add_subcommand("scan", "bound/antibound symmetry scan over the coupling q");
  auto* rh = app.add_subcommand("rho", "absorber reflection coefficient");
  for (auto* s : {sq, sp, sc, rh}) add_shared(s, cfg);
  rh->add_option("--lambda", cfg.lambdas, "re,im (repeatable)")->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sq) return cmd_resonances(cfg, "squarepot");
    if (*sp) return cmd_resonances(cfg, "splinepot");
    if (*sc) return cmd_scan(cfg);
    if (*rh) return cmd_rho(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "respole: %s\n", e.what());
    return e.is_input_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "respole: %s\n", e.what());
    return 3;
  }
  return 2;
}
