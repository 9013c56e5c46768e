#include "magbill/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace magbill {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::invalid_argument&) {
    fail(line, "expected a number, got '" + v + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range: '" + v + "'");
  }
}

int to_int(const std::string& v, int line) {
  const double d = to_double(v, line);
  const int i = static_cast<int>(std::lround(d));
  if (std::abs(d - i) > 0) fail(line, "expected an integer, got '" + v + "'");
  return i;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::pair<std::string, int>> seen;  // section.key -> (value, line)
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;

  static const std::map<std::string, std::vector<std::string>> schema = {
      {"domain", {"kind", "a", "b", "nx", "ny", "r", "r_in", "r_out", "nr", "ntheta"}},
      {"gauge", {"gauge", "B", "phi", "compare"}},
      {"bc", {"bc", "alpha", "beta"}},
      {"physics", {"hbar", "e", "m"}},
      {"solver", {"method", "k", "tol"}},
      {"sweep", {"parameter", "values"}},
      {"output", {"directory"}}};

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!schema.count(section)) fail(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (section.empty()) fail(line, "key outside any [section]");
    const auto& keys = schema.at(section);
    bool known = false;
    for (const auto& k : keys) known = known || (k == key);
    if (!known) fail(line, "unknown key '" + key + "' in [" + section + "]");
    const std::string id = section + "." + key;
    if (seen.count(id))
      fail(line, "duplicate key '" + key + "' (first set on line " +
                     std::to_string(seen[id].second) + ")");
    seen[id] = {val, line};
  }

  auto get = [&](const std::string& id) -> std::optional<std::pair<std::string, int>> {
    auto it = seen.find(id);
    if (it == seen.end()) return std::nullopt;
    return it->second;
  };

  if (auto v = get("domain.kind")) {
    if (v->first == "rectangle") cfg.kind = GridKind::Rectangle;
    else if (v->first == "disk") cfg.kind = GridKind::Disk;
    else if (v->first == "annulus") cfg.kind = GridKind::Annulus;
    else fail(v->second, "unknown domain kind '" + v->first + "'");
  }
  if (auto v = get("domain.a")) cfg.a = to_double(v->first, v->second);
  if (auto v = get("domain.b")) cfg.b = to_double(v->first, v->second);
  if (auto v = get("domain.nx")) cfg.nx = to_int(v->first, v->second);
  if (auto v = get("domain.ny")) cfg.ny = to_int(v->first, v->second);
  if (auto v = get("domain.r")) cfg.r = to_double(v->first, v->second);
  if (auto v = get("domain.r_in")) cfg.r_in = to_double(v->first, v->second);
  if (auto v = get("domain.r_out")) cfg.r_out = to_double(v->first, v->second);
  if (auto v = get("domain.nr")) cfg.nr = to_int(v->first, v->second);
  if (auto v = get("domain.ntheta")) cfg.ntheta = to_int(v->first, v->second);

  if (auto v = get("gauge.gauge")) {
    static const char* names[] = {"none", "landau", "symmetric", "ab", "sum"};
    bool ok = false;
    for (const char* n : names) ok = ok || (v->first == n);
    if (!ok) fail(v->second, "unknown gauge '" + v->first + "'");
    cfg.gauge = v->first;
  }
  if (auto v = get("gauge.B")) cfg.field_b = to_double(v->first, v->second);
  if (auto v = get("gauge.phi")) cfg.phi = to_double(v->first, v->second);
  if (auto v = get("gauge.compare")) cfg.compare = v->first;

  if (auto v = get("bc.bc")) {
    if (v->first == "dirichlet") cfg.bc = BcFamily::Dirichlet;
    else if (v->first == "neumann") cfg.bc = BcFamily::Neumann;
    else if (v->first == "robin") cfg.bc = BcFamily::Robin;
    else if (v->first == "chiral") cfg.bc = BcFamily::Chiral;
    else fail(v->second, "unknown boundary condition '" + v->first + "'");
  }
  if (auto v = get("bc.alpha")) cfg.alpha_expr = v->first;
  if (auto v = get("bc.beta")) cfg.beta = to_double(v->first, v->second);

  if (auto v = get("physics.hbar")) cfg.params.hbar = to_double(v->first, v->second);
  if (auto v = get("physics.e")) cfg.params.e = to_double(v->first, v->second);
  if (auto v = get("physics.m")) cfg.params.m = to_double(v->first, v->second);

  if (auto v = get("solver.method")) {
    if (v->first == "dense") cfg.method = SolveMethod::Dense;
    else if (v->first == "iterative") cfg.method = SolveMethod::Iterative;
    else fail(v->second, "unknown solver method '" + v->first + "'");
  }
  if (auto v = get("solver.k")) cfg.k = to_int(v->first, v->second);
  if (auto v = get("solver.tol")) cfg.tol = to_double(v->first, v->second);

  if (auto v = get("sweep.parameter")) {
    if (v->first == "none") cfg.sweep = SweepParameter::None;
    else if (v->first == "phi") cfg.sweep = SweepParameter::Phi;
    else if (v->first == "alpha") cfg.sweep = SweepParameter::Alpha;
    else if (v->first == "resolution") cfg.sweep = SweepParameter::Resolution;
    else fail(v->second, "unknown sweep parameter '" + v->first + "'");
  }
  if (auto v = get("sweep.values")) {
    std::stringstream ss(v->first);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.sweep_values.push_back(to_double(trim(tok), v->second));
    if (cfg.sweep_values.empty()) fail(v->second, "empty sweep value list");
  }
  if (auto v = get("output.directory")) cfg.out_dir = v->first;

  // admissibility
  cfg.params.validate();
  const bool uses_ab = (cfg.gauge == "ab") || (cfg.gauge == "sum" && cfg.phi != 0.0) ||
                       cfg.sweep == SweepParameter::Phi;
  if (uses_ab && cfg.kind != GridKind::Annulus)
    throw std::invalid_argument("config: Aharonov-Bohm gauge requires an annulus domain");
  if (cfg.bc == BcFamily::Chiral && cfg.kind == GridKind::Rectangle)
    throw std::invalid_argument("config: chiral boundary conditions require a polar domain");
  if (cfg.sweep == SweepParameter::Alpha && cfg.bc != BcFamily::Robin)
    throw std::invalid_argument("config: alpha sweep requires Robin boundary conditions");
  if (cfg.sweep != SweepParameter::None && cfg.sweep_values.empty())
    throw std::invalid_argument("config: sweep requested without values");
  if (cfg.sweep == SweepParameter::Phi)
    for (std::size_t i = 1; i < cfg.sweep_values.size(); ++i)
      if (cfg.sweep_values[i] <= cfg.sweep_values[i - 1])
        throw std::invalid_argument("config: sweep values must be strictly increasing");
  if (!cfg.compare.empty()) {
    if (cfg.compare != "landau" && cfg.compare != "symmetric" && cfg.compare != "none")
      throw std::invalid_argument("config: gauge compare must be landau|symmetric|none");
  }
  if (cfg.k < 1) throw std::invalid_argument("config: solver k must be >= 1");
  if (!(cfg.tol > 0)) throw std::invalid_argument("config: solver tol must be positive");

  // normalized echo
  std::ostringstream echo;
  for (const auto& [id, vl] : seen) echo << id << " = " << vl.first << "\n";
  cfg.echo = echo.str();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Grid2D ExperimentConfig::build_grid() const { return build_grid_at_resolution(1, 1); }

Grid2D ExperimentConfig::build_grid_at_resolution(int num, int den) const {
  auto scale = [&](int n) { return std::max(4, n * num / den); };
  switch (kind) {
    case GridKind::Rectangle: return build_rectangle(a, b, scale(nx), scale(ny));
    case GridKind::Disk: return build_disk(r, scale(nr), std::max(8, ntheta * num / den));
    default: return build_annulus(r_in, r_out, scale(nr), std::max(8, ntheta * num / den));
  }
}

PotentialSpec ExperimentConfig::build_gauge() const {
  if (gauge == "none") return PotentialSpec::zero();
  if (gauge == "landau") return PotentialSpec::landau(field_b);
  if (gauge == "symmetric") return PotentialSpec::symmetric(field_b);
  if (gauge == "ab") return PotentialSpec::aharonov_bohm(phi);
  PotentialSpec s = PotentialSpec::landau(field_b);
  s.add(PotentialSpec::aharonov_bohm(phi));
  return s;
}

PotentialSpec ExperimentConfig::build_compare_gauge() const {
  if (compare == "landau") return PotentialSpec::landau(field_b);
  if (compare == "symmetric") return PotentialSpec::symmetric(field_b);
  return PotentialSpec::zero();
}

AlphaFn ExperimentConfig::build_alpha(double perimeter) const {
  const std::string& ex = alpha_expr;
  if (ex.rfind("cos:", 0) == 0) {
    const double amp = std::stod(ex.substr(4));
    return [amp, perimeter](double s) { return amp * std::cos(2 * M_PI * s / perimeter); };
  }
  if (ex.rfind("sin:", 0) == 0) {
    const double amp = std::stod(ex.substr(4));
    return [amp, perimeter](double s) { return amp * std::sin(2 * M_PI * s / perimeter); };
  }
  const double v = std::stod(ex);
  return [v](double) { return v; };
}

}  // namespace magbill
