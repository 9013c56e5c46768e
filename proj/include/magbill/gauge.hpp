#pragma once

// Vector potentials, Peierls link phases, gauge equivalence and gauge
// transformations. Link phases are exact line integrals for every built-in
// potential family (the midpoint rule is already exact for the linear Landau
// and symmetric gauges; Aharonov-Bohm and gradient terms integrate in closed
// form), which keeps holonomy bookkeeping and gauge identities at machine
// precision.

#include <complex>
#include <string>
#include <vector>

#include "magbill/geometry.hpp"

namespace magbill {

using cplx = std::complex<double>;

struct PhysicalParams {
  double hbar = 1.0;
  double e = 1.0;
  double m = 1.0;
  double flux_quantum() const;  // 2 pi hbar / e
  void validate() const;
};

struct PotentialTerm {
  enum class Kind { Landau, Symmetric, AharonovBohm, Gradient };
  Kind kind = Kind::Landau;
  double b = 0;     // Landau / Symmetric field strength
  double flux = 0;  // AharonovBohm flux through the hole
  // Gradient term: A = grad chi0 with chi0 = amp * sin(kx x + px) * sin(ky y + py)
  double amp = 0, kx = 0, ky = 0, px = 0, py = 0;
};

struct PotentialSpec {
  std::vector<PotentialTerm> terms;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec landau(double b);
  static PotentialSpec symmetric(double b);
  static PotentialSpec aharonov_bohm(double flux);
  static PotentialSpec gradient(double amp, double kx, double ky, double px = 0, double py = 0);
  PotentialSpec& add(const PotentialSpec& other);

  bool has_ab() const;
  std::string describe() const;
};

// A(x, y); throws at the Aharonov-Bohm singularity.
void eval_potential(const PotentialSpec& spec, double x, double y, double& ax, double& ay);
// B(x, y), analytic for all built-in families.
double curl(const PotentialSpec& spec, double x, double y);
// centered finite-difference cross-check of curl()
double curl_fd(const PotentialSpec& spec, double x, double y, double step);
// exact directed line integral of A along a straight segment / coordinate arc
double potential_integral_straight(const PotentialSpec& spec, double ax, double ay, double bx,
                                   double by);
double potential_integral_arc(const PotentialSpec& spec, double r, double th_a, double th_b);

struct LinkField {
  const Grid2D* grid = nullptr;
  // directed a->b phases, theta = (e/hbar) * int A.dl, and the unit links
  std::vector<double> phase;
  std::vector<cplx> u;
  // polar boundary plumbing: half edges adj->chart and chart->ghost, plus the
  // tangential chart links chart_k -> chart_{k+1 (cyclic within component)}
  std::vector<double> half_in, half_out, chart_tan;
  std::vector<cplx> u_half_in, u_half_out, u_chart_tan;

  // transport factor multiplying the neighbour value in the row of `at`;
  // the reverse transport is the inverse (equal to the conjugate only on
  // unit-modulus links, so corrupted moduli surface as Hermiticity defects)
  cplx hop(int edge, int at) const {
    return grid->edges[edge].a == at ? u[edge] : 1.0 / u[edge];
  }
  double dir_phase(int edge, int from) const {
    return grid->edges[edge].a == from ? phase[edge] : -phase[edge];
  }
};

LinkField link_phases(const Grid2D& grid, const BoundaryChart& chart, const PotentialSpec& spec,
                      const PhysicalParams& params);

struct Holonomy {
  double total = 0;      // raw sum of signed edge phases
  double principal = 0;  // total reduced to (-pi, pi]
  int winding = 0;       // total = principal + 2 pi winding
};

Holonomy loop_holonomy(const LinkField& links, const std::vector<int>& cycle);

struct GaugeEquivalence {
  bool equivalent = false;
  std::vector<int> quanta;  // flux quanta added per hole (A -> A2)
  std::string diagnostic;
};

GaugeEquivalence is_gauge_equivalent(const PotentialSpec& a, const PotentialSpec& a2,
                                     const Grid2D& grid, const PhysicalParams& params);

// Gauge function chi with A2 = A - grad chi. chi is anchored at the basepoint
// and integrated along a spanning tree; `unitary` holds exp(-i e chi / hbar)
// per node (single-valued even when chi itself is multivalued). States and
// boundary operators transform with the adjoint factor exp(+i e chi / hbar),
// exposed as action().
struct GaugeFunction {
  const Grid2D* grid = nullptr;
  const BoundaryChart* chart = nullptr;
  PhysicalParams params;
  int basepoint = 0;
  std::vector<double> chi;       // per node (tree-integrated branch)
  std::vector<cplx> unitary;     // exp(-i e chi / hbar)
  std::vector<double> gx, gy;    // grad chi = A - A2 sampled at nodes
  std::vector<double> chi_chart;
  std::vector<cplx> unitary_chart;

  cplx action(int node) const { return std::conj(unitary[node]); }
  cplx action_chart(int k) const { return std::conj(unitary_chart[k]); }
};

GaugeFunction gauge_function(const PotentialSpec& a, const PotentialSpec& a2, const Grid2D& grid,
                             const BoundaryChart& chart, int basepoint,
                             const PhysicalParams& params);

// pointwise multiplication of a bulk state by the gauge action factor
std::vector<cplx> apply_gauge(const std::vector<cplx>& state, const GaugeFunction& chi);

LinkField transform_links(const LinkField& links, const GaugeFunction& chi);

}  // namespace magbill
