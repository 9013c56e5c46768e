#include "magbill/gauge.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>

namespace magbill {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double grad_chi0(const PotentialTerm& t, double x, double y, double& ax, double& ay) {
  ax = t.amp * t.kx * std::cos(t.kx * x + t.px) * std::sin(t.ky * y + t.py);
  ay = t.amp * t.ky * std::sin(t.kx * x + t.px) * std::cos(t.ky * y + t.py);
  return 0;
}

double chi0(const PotentialTerm& t, double x, double y) {
  return t.amp * std::sin(t.kx * x + t.px) * std::sin(t.ky * y + t.py);
}

}  // namespace

double PhysicalParams::flux_quantum() const { return kTwoPi * hbar / e; }

void PhysicalParams::validate() const {
  if (!(hbar > 0) || !(e > 0) || !(m > 0))
    throw std::invalid_argument("physical parameters must be strictly positive");
}

PotentialSpec PotentialSpec::landau(double b) {
  PotentialSpec s;
  PotentialTerm t;
  t.kind = PotentialTerm::Kind::Landau;
  t.b = b;
  s.terms.push_back(t);
  return s;
}

PotentialSpec PotentialSpec::symmetric(double b) {
  PotentialSpec s;
  PotentialTerm t;
  t.kind = PotentialTerm::Kind::Symmetric;
  t.b = b;
  s.terms.push_back(t);
  return s;
}

PotentialSpec PotentialSpec::aharonov_bohm(double flux) {
  PotentialSpec s;
  PotentialTerm t;
  t.kind = PotentialTerm::Kind::AharonovBohm;
  t.flux = flux;
  s.terms.push_back(t);
  return s;
}

PotentialSpec PotentialSpec::gradient(double amp, double kx, double ky, double px, double py) {
  PotentialSpec s;
  PotentialTerm t;
  t.kind = PotentialTerm::Kind::Gradient;
  t.amp = amp;
  t.kx = kx;
  t.ky = ky;
  t.px = px;
  t.py = py;
  s.terms.push_back(t);
  return s;
}

PotentialSpec& PotentialSpec::add(const PotentialSpec& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  return *this;
}

bool PotentialSpec::has_ab() const {
  for (const auto& t : terms)
    if (t.kind == PotentialTerm::Kind::AharonovBohm && t.flux != 0) return true;
  return false;
}

std::string PotentialSpec::describe() const {
  if (terms.empty()) return "zero";
  std::string s;
  char buf[96];
  for (const auto& t : terms) {
    if (!s.empty()) s += "+";
    switch (t.kind) {
      case PotentialTerm::Kind::Landau:
        std::snprintf(buf, sizeof buf, "landau(B=%g)", t.b);
        break;
      case PotentialTerm::Kind::Symmetric:
        std::snprintf(buf, sizeof buf, "symmetric(B=%g)", t.b);
        break;
      case PotentialTerm::Kind::AharonovBohm:
        std::snprintf(buf, sizeof buf, "ab(phi=%g)", t.flux);
        break;
      case PotentialTerm::Kind::Gradient:
        std::snprintf(buf, sizeof buf, "gradient(amp=%g,kx=%g,ky=%g)", t.amp, t.kx, t.ky);
        break;
    }
    s += buf;
  }
  return s;
}

void eval_potential(const PotentialSpec& spec, double x, double y, double& ax, double& ay) {
  ax = 0;
  ay = 0;
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case PotentialTerm::Kind::Landau:
        ay += t.b * x;
        break;
      case PotentialTerm::Kind::Symmetric:
        ax += -0.5 * t.b * y;
        ay += 0.5 * t.b * x;
        break;
      case PotentialTerm::Kind::AharonovBohm: {
        const double r2 = x * x + y * y;
        if (r2 < 1e-24) throw std::invalid_argument("Aharonov-Bohm potential evaluated at its singularity");
        const double c = t.flux / kTwoPi;
        ax += -c * y / r2;
        ay += c * x / r2;
        break;
      }
      case PotentialTerm::Kind::Gradient: {
        double gx, gy;
        grad_chi0(t, x, y, gx, gy);
        ax += gx;
        ay += gy;
        break;
      }
    }
  }
}

double curl(const PotentialSpec& spec, double x, double y) {
  double b = 0;
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case PotentialTerm::Kind::Landau:
      case PotentialTerm::Kind::Symmetric:
        b += t.b;
        break;
      case PotentialTerm::Kind::AharonovBohm: {
        const double r2 = x * x + y * y;
        if (r2 < 1e-24) throw std::invalid_argument("Aharonov-Bohm potential evaluated at its singularity");
        break;  // flat away from the flux line
      }
      case PotentialTerm::Kind::Gradient:
        break;  // pure gradient
    }
  }
  return b;
}

double curl_fd(const PotentialSpec& spec, double x, double y, double step) {
  double axp, ayp, axm, aym;
  eval_potential(spec, x + step, y, axp, ayp);
  eval_potential(spec, x - step, y, axm, aym);
  const double day_dx = (ayp - aym) / (2 * step);
  eval_potential(spec, x, y + step, axp, ayp);
  eval_potential(spec, x, y - step, axm, aym);
  const double dax_dy = (axp - axm) / (2 * step);
  return day_dx - dax_dy;
}

double potential_integral_straight(const PotentialSpec& spec, double ax, double ay, double bx,
                                   double by) {
  const double dx = bx - ax, dy = by - ay;
  const double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
  double s = 0;
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case PotentialTerm::Kind::Landau:
        s += t.b * mx * dy;
        break;
      case PotentialTerm::Kind::Symmetric:
        s += 0.5 * t.b * (mx * dy - my * dx);
        break;
      case PotentialTerm::Kind::AharonovBohm: {
        const double dth = std::remainder(std::atan2(by, bx) - std::atan2(ay, ax), kTwoPi);
        s += t.flux / kTwoPi * dth;
        break;
      }
      case PotentialTerm::Kind::Gradient:
        s += chi0(t, bx, by) - chi0(t, ax, ay);
        break;
    }
  }
  return s;
}

double potential_integral_arc(const PotentialSpec& spec, double r, double th_a, double th_b) {
  double s = 0;
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case PotentialTerm::Kind::Landau: {
        auto prim = [&](double th) { return 0.5 * t.b * r * r * (th + std::sin(th) * std::cos(th)); };
        s += prim(th_b) - prim(th_a);
        break;
      }
      case PotentialTerm::Kind::Symmetric:
        s += 0.5 * t.b * r * r * (th_b - th_a);
        break;
      case PotentialTerm::Kind::AharonovBohm:
        s += t.flux / kTwoPi * (th_b - th_a);
        break;
      case PotentialTerm::Kind::Gradient:
        s += chi0(t, r * std::cos(th_b), r * std::sin(th_b)) -
             chi0(t, r * std::cos(th_a), r * std::sin(th_a));
        break;
    }
  }
  return s;
}

LinkField link_phases(const Grid2D& grid, const BoundaryChart& chart, const PotentialSpec& spec,
                      const PhysicalParams& params) {
  params.validate();
  if (spec.has_ab() && grid.kind != GridKind::Annulus)
    throw std::invalid_argument("Aharonov-Bohm potential requires an annulus grid");

  LinkField lf;
  lf.grid = &grid;
  const double scale = params.e / params.hbar;
  const int ne = static_cast<int>(grid.edges.size());
  lf.phase.resize(ne);
  lf.u.resize(ne);
  for (int i = 0; i < ne; ++i) {
    const Edge& e = grid.edges[i];
    const double integral = e.arc ? potential_integral_arc(spec, e.arc_r, e.arc_th_a, e.arc_th_b)
                                  : potential_integral_straight(spec, grid.x[e.a], grid.y[e.a],
                                                                grid.x[e.b], grid.y[e.b]);
    lf.phase[i] = scale * integral;
    lf.u[i] = std::polar(1.0, lf.phase[i]);
  }

  if (grid.polar()) {
    const int nc = chart.size();
    lf.half_in.resize(nc);
    lf.half_out.resize(nc);
    lf.chart_tan.resize(nc);
    lf.u_half_in.resize(nc);
    lf.u_half_out.resize(nc);
    lf.u_chart_tan.resize(nc);
    for (int k = 0; k < nc; ++k) {
      const ChartNode& cn = chart.nodes[k];
      lf.half_in[k] = scale * potential_integral_straight(spec, grid.x[cn.adj], grid.y[cn.adj],
                                                          cn.x, cn.y);
      lf.half_out[k] = scale * potential_integral_straight(spec, cn.x, cn.y, grid.x[cn.ghost],
                                                           grid.y[cn.ghost]);
      lf.u_half_in[k] = std::polar(1.0, lf.half_in[k]);
      lf.u_half_out[k] = std::polar(1.0, lf.half_out[k]);
    }
    // the full radial boundary edge must split exactly into its two halves
    for (int k = 0; k < nc; ++k) {
      const ChartNode& cn = chart.nodes[k];
      auto [e, sgn] = grid.find_edge(cn.adj, cn.ghost);
      lf.phase[e] = sgn * (lf.half_in[k] + lf.half_out[k]);
      lf.u[e] = std::polar(1.0, lf.phase[e]);
    }
    for (int k = 0; k < nc; ++k) {
      const ChartNode& a = chart.nodes[k];
      const ChartNode& b = chart.nodes[chart.next(k)];
      const double r = std::hypot(a.x, a.y);
      double tha = std::atan2(a.y, a.x), thb = std::atan2(b.y, b.x);
      // shortest signed sweep from a to b along the circle
      thb = tha + std::remainder(thb - tha, kTwoPi);
      lf.chart_tan[k] = scale * potential_integral_arc(spec, r, tha, thb);
      lf.u_chart_tan[k] = std::polar(1.0, lf.chart_tan[k]);
    }
  }
  return lf;
}

Holonomy loop_holonomy(const LinkField& links, const std::vector<int>& cycle) {
  if (cycle.size() < 3) throw std::invalid_argument("holonomy loop needs at least 3 nodes");
  const Grid2D& grid = *links.grid;
  double total = 0;
  const int n = static_cast<int>(cycle.size());
  for (int i = 0; i < n; ++i) {
    const int a = cycle[i], b = cycle[(i + 1) % n];
    auto [e, sgn] = grid.find_edge(a, b);
    (void)sgn;
    total += links.dir_phase(e, a);
  }
  Holonomy h;
  h.total = total;
  h.principal = std::remainder(total, kTwoPi);
  if (h.principal <= -kPi) h.principal += kTwoPi;
  h.winding = static_cast<int>(std::lround((total - h.principal) / kTwoPi));
  return h;
}

namespace {

// circulation of A around a centered circle of radius rho (counterclockwise)
double circulation(const PotentialSpec& spec, double rho) {
  double c = 0;
  for (const auto& t : spec.terms) {
    switch (t.kind) {
      case PotentialTerm::Kind::Landau:
      case PotentialTerm::Kind::Symmetric:
        c += t.b * kPi * rho * rho;
        break;
      case PotentialTerm::Kind::AharonovBohm:
        c += t.flux;
        break;
      case PotentialTerm::Kind::Gradient:
        break;  // single-valued potential, zero circulation
    }
  }
  return c;
}

}  // namespace

GaugeEquivalence is_gauge_equivalent(const PotentialSpec& a, const PotentialSpec& a2,
                                     const Grid2D& grid, const PhysicalParams& params) {
  params.validate();
  GaugeEquivalence res;
  const double tol = 1e-8;
  double worst = 0;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    if (grid.cls[i] != NodeClass::Interior) continue;
    worst = std::max(worst, std::abs(curl(a, grid.x[i], grid.y[i]) - curl(a2, grid.x[i], grid.y[i])));
  }
  if (worst > tol) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "magnetic fields differ inside the domain (max |dB| = %.3e)",
                  worst);
    res.diagnostic = buf;
    return res;
  }
  if (grid.kind == GridKind::Annulus) {
    const double rho = 0.5 * (grid.r_in + grid.r_out);
    const double diff = (params.e / params.hbar) * (circulation(a2, rho) - circulation(a, rho));
    const double n_real = diff / kTwoPi;
    const long n = std::lround(n_real);
    if (std::abs(diff - kTwoPi * n) > tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "hole holonomies differ by %.6g flux quanta (not an integer)", n_real);
      res.diagnostic = buf;
      return res;
    }
    res.quanta.push_back(static_cast<int>(n));
  }
  res.equivalent = true;
  res.diagnostic = "gauge equivalent";
  return res;
}

GaugeFunction gauge_function(const PotentialSpec& a, const PotentialSpec& a2, const Grid2D& grid,
                             const BoundaryChart& chart, int basepoint,
                             const PhysicalParams& params) {
  GaugeEquivalence eq = is_gauge_equivalent(a, a2, grid, params);
  if (!eq.equivalent)
    throw std::invalid_argument("gauge_function: potentials are not gauge equivalent: " +
                                eq.diagnostic);
  if (basepoint < 0 || basepoint >= grid.n_nodes())
    throw std::invalid_argument("gauge_function: basepoint out of range");

  PotentialSpec diff = a;  // integrates A - A2
  for (auto t : a2.terms) {
    switch (t.kind) {
      case PotentialTerm::Kind::Landau:
      case PotentialTerm::Kind::Symmetric:
        t.b = -t.b;
        break;
      case PotentialTerm::Kind::AharonovBohm:
        t.flux = -t.flux;
        break;
      case PotentialTerm::Kind::Gradient:
        t.amp = -t.amp;
        break;
    }
    diff.terms.push_back(t);
  }

  GaugeFunction gf;
  gf.grid = &grid;
  gf.chart = &chart;
  gf.params = params;
  gf.basepoint = basepoint;
  const int n = grid.n_nodes();
  gf.chi.assign(n, 0.0);
  gf.unitary.assign(n, cplx{1, 0});
  gf.gx.resize(n);
  gf.gy.resize(n);

  auto edge_int = [&](const Edge& e) {
    return e.arc ? potential_integral_arc(diff, e.arc_r, e.arc_th_a, e.arc_th_b)
                 : potential_integral_straight(diff, grid.x[e.a], grid.y[e.a], grid.x[e.b],
                                               grid.y[e.b]);
  };

  // breadth-first spanning tree from the basepoint
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  seen[basepoint] = 1;
  q.push(basepoint);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const auto& [nb, e] : grid.adj[v]) {
      if (seen[nb]) continue;
      seen[nb] = 1;
      const double de = edge_int(grid.edges[e]);
      gf.chi[nb] = gf.chi[v] + (grid.edges[e].a == v ? de : -de);
      q.push(nb);
    }
  }

  const double scale = params.e / params.hbar;
  for (int i = 0; i < n; ++i) {
    gf.unitary[i] = std::polar(1.0, -scale * gf.chi[i]);
    double ax1, ay1, ax2, ay2;
    eval_potential(a, grid.x[i], grid.y[i], ax1, ay1);
    eval_potential(a2, grid.x[i], grid.y[i], ax2, ay2);
    gf.gx[i] = ax1 - ax2;
    gf.gy[i] = ay1 - ay2;
  }

  // held-out edges: chi differences must match edge integrals modulo the flux
  // quantum (exactly zero on simply connected grids)
  double worst = 0;
  for (const Edge& e : grid.edges) {
    const double defect = gf.chi[e.b] - gf.chi[e.a] - edge_int(e);
    worst = std::max(worst, std::abs(std::remainder(scale * defect, kTwoPi)));
  }
  if (worst > 1e-8)
    throw std::runtime_error("gauge_function: path dependence detected on held-out loops");

  if (grid.polar()) {
    const int nc = chart.size();
    gf.chi_chart.resize(nc);
    gf.unitary_chart.resize(nc);
    for (int k = 0; k < nc; ++k) {
      const ChartNode& cn = chart.nodes[k];
      const double de = potential_integral_straight(diff, grid.x[cn.adj], grid.y[cn.adj], cn.x,
                                                    cn.y);
      gf.chi_chart[k] = gf.chi[cn.adj] + de;
      gf.unitary_chart[k] = std::polar(1.0, -scale * gf.chi_chart[k]);
    }
  } else {
    const int nc = chart.size();
    gf.chi_chart.resize(nc);
    gf.unitary_chart.resize(nc);
    for (int k = 0; k < nc; ++k) {
      gf.chi_chart[k] = gf.chi[chart.nodes[k].adj];
      gf.unitary_chart[k] = gf.unitary[chart.nodes[k].adj];
    }
  }
  return gf;
}

std::vector<cplx> apply_gauge(const std::vector<cplx>& state, const GaugeFunction& chi) {
  if (static_cast<int>(state.size()) != chi.grid->n_nodes())
    throw std::invalid_argument("apply_gauge: state dimension mismatch");
  std::vector<cplx> out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) out[i] = chi.action(static_cast<int>(i)) * state[i];
  return out;
}

LinkField transform_links(const LinkField& links, const GaugeFunction& chi) {
  if (links.grid != chi.grid) throw std::invalid_argument("transform_links: grid mismatch");
  const Grid2D& grid = *links.grid;
  const double scale = chi.params.e / chi.params.hbar;
  LinkField out = links;
  for (std::size_t i = 0; i < grid.edges.size(); ++i) {
    const Edge& e = grid.edges[i];
    out.phase[i] = links.phase[i] - scale * (chi.chi[e.b] - chi.chi[e.a]);
    out.u[i] = chi.unitary[e.b] * links.u[i] * std::conj(chi.unitary[e.a]);
  }
  const BoundaryChart* chart = chi.chart;
  if (grid.polar() && chart) {
    for (int k = 0; k < chart->size(); ++k) {
      const ChartNode& cn = chart->nodes[k];
      out.half_in[k] = links.half_in[k] - scale * (chi.chi_chart[k] - chi.chi[cn.adj]);
      out.u_half_in[k] = chi.unitary_chart[k] * links.u_half_in[k] * std::conj(chi.unitary[cn.adj]);
      out.half_out[k] = links.half_out[k] - scale * (chi.chi[cn.ghost] - chi.chi_chart[k]);
      out.u_half_out[k] =
          chi.unitary[cn.ghost] * links.u_half_out[k] * std::conj(chi.unitary_chart[k]);
      const int kn = chart->next(k);
      out.chart_tan[k] = links.chart_tan[k] - scale * (chi.chi_chart[kn] - chi.chi_chart[k]);
      out.u_chart_tan[k] =
          chi.unitary_chart[kn] * links.u_chart_tan[k] * std::conj(chi.unitary_chart[k]);
    }
  }
  return out;
}

}  // namespace magbill
