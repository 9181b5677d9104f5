#include "hmlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hmlab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& tok, const std::string& origin, int line) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail(origin, line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) fail(origin, line, "trailing characters in number '" + tok + "'");
  return v;
}

// Complex tokens are "(re, im)" or a bare real.
cplx parse_complex(const std::string& tok, const std::string& origin, int line) {
  const std::string t = trim(tok);
  if (!t.empty() && t.front() == '(') {
    if (t.back() != ')') fail(origin, line, "unbalanced complex literal '" + t + "'");
    const std::string inner = t.substr(1, t.size() - 2);
    const auto comma = inner.find(',');
    if (comma == std::string::npos) fail(origin, line, "complex literal needs '(re, im)'");
    return {parse_real(trim(inner.substr(0, comma)), origin, line),
            parse_real(trim(inner.substr(comma + 1)), origin, line)};
  }
  return {parse_real(t, origin, line), 0.0};
}

// Splits "poly (0,0) (1,0)" style values into complex tokens.
std::vector<cplx> parse_complex_list(const std::string& text, const std::string& origin,
                                     int line) {
  std::vector<cplx> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    if (text[i] == '(') {
      j = text.find(')', i);
      if (j == std::string::npos) fail(origin, line, "unbalanced '(' in list");
      ++j;
    } else {
      while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    }
    out.push_back(parse_complex(text.substr(i, j - i), origin, line));
    i = j;
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(cplx z) { return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")"; }

}  // namespace

SurfaceDomain RunConfig::domain() const {
  return kind == SurfaceDomain::Kind::Torus ? SurfaceDomain::torus(N, tau)
                                            : SurfaceDomain::patch(N, L);
}

SolveParams RunConfig::solver_params() const {
  SolveParams p;
  p.tol = tol;
  p.max_iter = max_iter;
  p.dt = dt;
  p.method = method;
  return p;
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "# hmlab-config-v1\n";
  os << "group.n = " << n << "\n";
  os << "surface.kind = " << (kind == SurfaceDomain::Kind::Torus ? "torus" : "patch") << "\n";
  os << "surface.N = " << N << "\n";
  if (kind == SurfaceDomain::Kind::Torus)
    os << "surface.tau = " << fmt(tau) << "\n";
  else
    os << "surface.L = " << fmt(L) << "\n";
  std::vector<Differential> sorted = alphas;
  std::sort(sorted.begin(), sorted.end(),
            [](const Differential& a, const Differential& b) { return a.k < b.k; });
  for (const auto& a : sorted) {
    os << "alpha." << a.k << " = ";
    if (a.rep == Differential::Rep::Constant) {
      os << fmt(a.constant);
    } else {
      os << "poly";
      for (const cplx& c : a.coeffs) os << " " << fmt(c);
    }
    os << "\n";
  }
  os << "solver.tol = " << fmt(tol) << "\n";
  os << "solver.max_iter = " << max_iter << "\n";
  os << "solver.dt = " << fmt(dt) << "\n";
  os << "solver.method = "
     << (method == SolveParams::Method::Auto
             ? "auto"
             : (method == SolveParams::Method::Relax ? "relax" : "newton"))
     << "\n";
  os << "metric.kappa = " << fmt(kappa) << "\n";
  if (!output_dir.empty()) os << "output.dir = " << output_dir << "\n";
  if (!sweep_t.empty()) {
    os << "sweep.t =";
    for (double t : sweep_t) os << " " << fmt(t);
    os << "\n";
  }
  return os.str();
}

RunConfig RunConfig::parse_string(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  bool saw_tau = false, saw_L = false;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (value.empty()) fail(origin, line, "empty value for '" + key + "'");

    if (key == "group.n") {
      cfg.n = static_cast<int>(parse_real(value, origin, line));
    } else if (key == "surface.kind") {
      if (value == "torus")
        cfg.kind = SurfaceDomain::Kind::Torus;
      else if (value == "patch")
        cfg.kind = SurfaceDomain::Kind::Patch;
      else
        fail(origin, line, "surface.kind must be torus or patch");
    } else if (key == "surface.N") {
      cfg.N = static_cast<int>(parse_real(value, origin, line));
    } else if (key == "surface.tau") {
      cfg.tau = parse_complex(value, origin, line);
      saw_tau = true;
    } else if (key == "surface.L") {
      cfg.L = parse_real(value, origin, line);
      saw_L = true;
    } else if (key.rfind("alpha.", 0) == 0) {
      int k = 0;
      try {
        k = std::stoi(key.substr(6));
      } catch (const std::exception&) {
        fail(origin, line, "bad differential key '" + key + "'");
      }
      if (value.rfind("poly", 0) == 0) {
        const auto coeffs = parse_complex_list(value.substr(4), origin, line);
        if (coeffs.empty()) fail(origin, line, "poly needs at least one coefficient");
        cfg.alphas.push_back(Differential::make_poly(k, coeffs));
      } else {
        cfg.alphas.push_back(Differential::make_constant(k, parse_complex(value, origin, line)));
      }
    } else if (key == "solver.tol") {
      cfg.tol = parse_real(value, origin, line);
    } else if (key == "solver.max_iter") {
      cfg.max_iter = static_cast<int>(parse_real(value, origin, line));
    } else if (key == "solver.dt") {
      cfg.dt = parse_real(value, origin, line);
    } else if (key == "solver.method") {
      if (value == "auto")
        cfg.method = SolveParams::Method::Auto;
      else if (value == "relax")
        cfg.method = SolveParams::Method::Relax;
      else if (value == "newton")
        cfg.method = SolveParams::Method::Newton;
      else
        fail(origin, line, "solver.method must be auto, relax or newton");
    } else if (key == "metric.kappa") {
      cfg.kappa = parse_real(value, origin, line);
    } else if (key == "output.dir") {
      cfg.output_dir = value;
    } else if (key == "sweep.t") {
      std::string v = value;
      std::replace(v.begin(), v.end(), ',', ' ');
      std::istringstream ts(v);
      std::string tok;
      while (ts >> tok) cfg.sweep_t.push_back(parse_real(tok, origin, line));
    } else {
      fail(origin, line, "unknown key '" + key + "'");
    }
  }
  if (cfg.kind == SurfaceDomain::Kind::Torus && saw_L)
    throw std::invalid_argument(origin + ": surface.L given for a torus domain");
  if (cfg.kind == SurfaceDomain::Kind::Patch && saw_tau)
    throw std::invalid_argument(origin + ": surface.tau given for a patch domain");
  return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path.string());
}

}  // namespace hmlab
