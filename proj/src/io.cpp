#include "respole/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "respole/error.hpp"

namespace respole::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view s) {
  const std::string t(trim(s));
  if (t.empty()) throw Error(ErrorCode::ParseError, "empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, "bad number '" + t + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto l : split(text, '\n')) {
    l = trim(l);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

std::string json_number(std::optional<double> x) { return x && std::isfinite(*x) ? fmt(*x) : "null"; }

}  // namespace

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (auto part : split(s, ',')) out.push_back(parse_real(part));
  return out;
}

PotentialFile parse_potential(std::string_view text) {
  std::map<std::string, std::string> kv;
  for (auto line : lines(text)) {
    if (line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::ParseError, "expected key=value: " + std::string(line));
    std::string key(trim(line.substr(0, eq)));
    if (kv.count(key)) throw Error(ErrorCode::ParseError, "duplicate key " + key);
    kv[key] = std::string(trim(line.substr(eq + 1)));
  }
  static const char* known[] = {"domain", "bc", "kind", "values", "breaks", "knots", "absorber.sigma",
                                "absorber.width", "absorber.profile", "absorber.start"};
  for (const auto& [k, v] : kv) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known)) {
      throw Error(ErrorCode::ParseError, "unknown key " + k);
    }
  }

  Domain domain = Domain::full_line();
  if (kv.count("domain")) {
    if (kv["domain"] == "halfline") domain.half_line = true;
    else if (kv["domain"] != "fullline") throw Error(ErrorCode::ParseError, "domain must be halfline or fullline");
  }
  if (kv.count("bc")) {
    if (kv["bc"] == "neumann") domain.bc = BoundaryCondition::Neumann;
    else if (kv["bc"] != "dirichlet") throw Error(ErrorCode::ParseError, "bc must be dirichlet or neumann");
  }
  if (!kv.count("kind")) throw Error(ErrorCode::ParseError, "missing kind");
  if (!kv.count("values")) throw Error(ErrorCode::ParseError, "missing values");

  PotentialFile f;
  f.kind = kv["kind"];
  f.values = parse_list(kv["values"]);
  if (f.kind == "squarepot") {
    if (!kv.count("breaks") || kv.count("knots")) throw Error(ErrorCode::ParseError, "squarepot needs breaks");
    f.breaks = parse_list(kv["breaks"]);
    f.potential = PotentialSpec::piecewise_constant(domain, f.breaks, f.values);
  } else if (f.kind == "splinepot") {
    if (!kv.count("knots") || kv.count("breaks")) throw Error(ErrorCode::ParseError, "splinepot needs knots");
    f.breaks = parse_list(kv["knots"]);
    f.potential = spline_build(f.values, f.breaks, domain);
  } else {
    throw Error(ErrorCode::ParseError, "kind must be squarepot or splinepot");
  }

  const bool any_abs = kv.count("absorber.sigma") || kv.count("absorber.width") || kv.count("absorber.profile") ||
                       kv.count("absorber.start");
  if (any_abs) {
    const Interval s = f.potential.support();
    double start = f.potential.empty() ? 1.0 : std::max(std::abs(s.lo), std::abs(s.hi));
    if (kv.count("absorber.start")) start = parse_real(kv["absorber.start"]);
    AbsorberSpec a = AbsorberSpec::with_defaults(start);
    if (kv.count("absorber.sigma")) a.sigma = parse_real(kv["absorber.sigma"]);
    if (kv.count("absorber.width")) a.end = start + parse_real(kv["absorber.width"]);
    if (kv.count("absorber.profile") && kv["absorber.profile"] != "quadratic") {
      throw Error(ErrorCode::ParseError, "absorber.profile must be quadratic");
    }
    try {
      a.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
    f.absorber = a;
  }
  return f;
}

PotentialFile load_potential(const std::string& path) { return parse_potential(read_file(path)); }

std::string render_potential(const PotentialFile& f) {
  const Domain& d = f.potential.domain();
  std::string s;
  s += std::string("domain=") + (d.half_line ? "halfline" : "fullline") + "\n";
  s += std::string("bc=") + (d.bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet") + "\n";
  s += "kind=" + f.kind + "\n";
  s += "values=" + join(f.values) + "\n";
  s += (f.kind == "splinepot" ? "knots=" : "breaks=") + join(f.breaks) + "\n";
  if (f.absorber) {
    s += "absorber.sigma=" + fmt(f.absorber->sigma) + "\n";
    s += "absorber.width=" + fmt(f.absorber->width()) + "\n";
    s += "absorber.start=" + fmt(f.absorber->start) + "\n";
    s += "absorber.profile=quadratic\n";
  }
  return s;
}

std::string resonance_json(const ResonanceSet& rs) {
  std::string s = "{\"engine\":\"" + std::string(to_string(rs.engine)) + "\",\"potential_hash\":\"" +
                  rs.potential_hash + "\",\"entries\":[";
  for (std::size_t i = 0; i < rs.entries.size(); ++i) {
    const auto& e = rs.entries[i];
    if (i) s += ',';
    s += "\n{\"re\":" + fmt(e.lambda.real()) + ",\"im\":" + fmt(e.lambda.imag()) + ",\"class\":\"" +
         std::string(to_string(e.cls)) + "\",\"accuracy\":" + json_number(e.accuracy) + "}";
  }
  s += rs.entries.empty() ? "]}\n" : "\n]}\n";
  return s;
}

std::string resonance_csv(const ResonanceSet& rs) {
  std::string s = "re,im,class\n";
  for (const auto& e : rs.entries) {
    s += fmt(e.lambda.real()) + "," + fmt(e.lambda.imag()) + "," + std::string(to_string(e.cls)) + "\n";
  }
  return s;
}

ResonanceSet parse_resonance_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ResonanceSet rs;
    rs.engine = parse_engine(j.at("engine").get<std::string>());
    rs.potential_hash = j.at("potential_hash").get<std::string>();
    for (const auto& e : j.at("entries")) {
      ResonanceEntry r;
      r.lambda = {e.at("re").get<double>(), e.at("im").get<double>()};
      r.cls = parse_pole_class(e.at("class").get<std::string>());
      r.accuracy = e.at("accuracy").is_null() ? std::nan("") : e.at("accuracy").get<double>();
      rs.entries.push_back(r);
    }
    return rs;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

ResonanceSet parse_resonance_csv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.empty() || ls.front() != "re,im,class") throw Error(ErrorCode::ParseError, "missing CSV header");
  ResonanceSet rs;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = split(ls[i], ',');
    if (f.size() != 3) throw Error(ErrorCode::ParseError, "expected 3 columns");
    rs.entries.push_back({{parse_real(f[0]), parse_real(f[1])}, parse_pole_class(trim(f[2])), 0.0});
  }
  return rs;
}

std::vector<ScanRow> scan_rows(const SymmetryScan& scan) {
  std::vector<ScanRow> rows;
  for (const auto& pt : scan.points) {
    auto defect_of = [&](double k, bool bound) -> std::optional<double> {
      for (const auto& p : pt.pairing.pairs)
        if ((bound ? p.bound_k : p.antibound_k) == k) return p.defect;
      return std::nullopt;
    };
    for (double k : pt.bound_k) rows.push_back({pt.q, pt.q * pt.q, PoleClass::Bound, k, k, defect_of(k, true)});
    for (double k : pt.antibound_k)
      rows.push_back({pt.q, pt.q * pt.q, PoleClass::Antibound, k, -k, defect_of(k, false)});
  }
  return rows;
}

std::string scan_csv(const SymmetryScan& scan) {
  std::string s = "q,q_squared,kind,k,im_lambda,paired_defect\n";
  for (const auto& r : scan_rows(scan)) {
    s += fmt(r.q) + "," + fmt(r.q_squared) + "," + std::string(to_string(r.kind)) + "," + fmt(r.k) + "," +
         fmt(r.im_lambda) + "," + (r.paired_defect ? fmt(*r.paired_defect) : "") + "\n";
  }
  return s;
}

std::vector<ScanRow> parse_scan_csv(std::string_view text) {
  const auto ls = lines(text);
  if (ls.empty() || ls.front() != "q,q_squared,kind,k,im_lambda,paired_defect") {
    throw Error(ErrorCode::ParseError, "missing scan CSV header");
  }
  std::vector<ScanRow> rows;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = split(ls[i], ',');
    if (f.size() != 6) throw Error(ErrorCode::ParseError, "expected 6 columns");
    ScanRow r;
    r.q = parse_real(f[0]);
    r.q_squared = parse_real(f[1]);
    r.kind = parse_pole_class(trim(f[2]));
    if (r.kind == PoleClass::Resonance) throw Error(ErrorCode::ParseError, "scan rows are bound or antibound");
    r.k = parse_real(f[3]);
    r.im_lambda = parse_real(f[4]);
    if (!trim(f[5]).empty()) r.paired_defect = parse_real(f[5]);
    rows.push_back(r);
  }
  return rows;
}

ScanSummary summarize(const SymmetryScan& scan, Engine engine, const std::optional<Barrier>& barrier) {
  ScanSummary s;
  s.k0 = scan.k0;
  s.q_grid = scan.q_values();
  s.engine = std::string(to_string(engine));
  s.barrier = barrier;
  if (scan.fit) {
    s.c_hat = scan.fit->c_hat;
    s.r2 = scan.fit->r2;
    s.symmetry = scan.fit->c_hat > 0.0 && scan.fit->r2 >= 0.5;
  }
  return s;
}

std::string summary_json(const ScanSummary& s) {
  std::string out = "{\"c_hat\":" + json_number(s.c_hat) + ",\"r2\":" + json_number(s.r2) +
                    ",\"k0\":" + fmt(s.k0) + ",\"q_grid\":[" + join(s.q_grid) + "],\"symmetry\":" +
                    (s.symmetry ? "true" : "false") + ",\"engine\":\"" + s.engine + "\",\"barrier\":";
  if (s.barrier) {
    out += "[" + join({s.barrier->a, s.barrier->b, s.barrier->height}) + "]";
  } else {
    out += "null";
  }
  out += "}\n";
  return out;
}

ScanSummary parse_summary_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ScanSummary s;
    if (!j.at("c_hat").is_null()) s.c_hat = j.at("c_hat").get<double>();
    if (!j.at("r2").is_null()) s.r2 = j.at("r2").get<double>();
    s.k0 = j.at("k0").get<double>();
    s.q_grid = j.at("q_grid").get<std::vector<double>>();
    s.symmetry = j.at("symmetry").get<bool>();
    s.engine = j.value("engine", "transfer");
    if (j.contains("barrier") && !j.at("barrier").is_null()) {
      const auto b = j.at("barrier").get<std::vector<double>>();
      if (b.size() != 3) throw Error(ErrorCode::ParseError, "barrier needs three numbers");
      s.barrier = Barrier{b[0], b[1], b[2]};
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "rename failed: " + ec.message());
}

}  // namespace respole::io
