#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "magbill/hamiltonian.hpp"

using namespace magbill;

namespace {
const PhysicalParams kUnit{};

std::vector<cplx> random_state(const Grid2D& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<cplx> v(g.n_nodes());
  for (auto& z : v) z = cplx{gauss(rng), gauss(rng)};
  return v;
}

std::vector<cplx> smooth_state(const Grid2D& g, double kx, double ky, double p) {
  std::vector<cplx> v(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i)
    v[i] = std::exp(cplx{0, kx * g.x[i] + p}) * std::cos(ky * g.y[i]) +
           cplx{0.3, 0.1} * std::sin(kx * g.y[i]);
  return v;
}

struct Setup {
  Grid2D grid;
  BoundaryChart chart;
  LinkField links;
};

Setup make(const Grid2D& g, const PotentialSpec& spec) {
  Setup s;
  s.grid = g;
  s.chart = boundary_chart(s.grid);
  s.links = link_phases(s.grid, s.chart, spec, kUnit);
  return s;
}

}  // namespace

TEST_CASE("assembly is W-Hermitian for every family across gauges") {
  std::vector<PotentialSpec> gauges = {PotentialSpec::zero(), PotentialSpec::landau(2.0),
                                       PotentialSpec::symmetric(2.0)};
  {
    PotentialSpec mixed = PotentialSpec::landau(2.0);
    mixed.add(PotentialSpec::gradient(0.3, 2.0, 1.0));
    gauges.push_back(mixed);
  }

  for (const auto& spec : gauges) {
    // rectangle: Dirichlet / Neumann / Robin
    {
      const Grid2D g = build_rectangle(1.0, 1.3, 10, 12);
      const BoundaryChart ch = boundary_chart(g);
      const LinkField links = link_phases(g, ch, spec, kUnit);
      for (BcFamily fam : {BcFamily::Dirichlet, BcFamily::Neumann, BcFamily::Robin}) {
        const BoundaryCondition bc = fam == BcFamily::Robin ? make_bc(fam, ch, -0.7)
                                                            : make_bc(fam, ch);
        const Hamiltonian ham = assemble(g, ch, links, bc, kUnit);
        CHECK(hermiticity_defect(ham) <= 1e-12);
      }
    }
    // disk: all four families
    {
      const Grid2D g = build_disk(1, 10, 20);
      const BoundaryChart ch = boundary_chart(g);
      const LinkField links = link_phases(g, ch, spec, kUnit);
      for (BcFamily fam :
           {BcFamily::Dirichlet, BcFamily::Neumann, BcFamily::Robin, BcFamily::Chiral}) {
        const BoundaryCondition bc = fam == BcFamily::Robin || fam == BcFamily::Chiral
                                         ? make_bc(fam, ch, 0.9, 0.3)
                                         : make_bc(fam, ch);
        const Hamiltonian ham = assemble(g, ch, links, bc, kUnit);
        CHECK(hermiticity_defect(ham) <= 1e-12);
      }
    }
  }

  // annulus with an AB line and mixed per-component families
  {
    const Grid2D g = build_annulus(0.5, 1, 8, 16);
    const BoundaryChart ch = boundary_chart(g);
    PotentialSpec spec = PotentialSpec::aharonov_bohm(2.7);
    spec.add(PotentialSpec::symmetric(1.0));
    const LinkField links = link_phases(g, ch, spec, kUnit);
    const std::vector<BoundaryCondition> bcs = {make_bc(BcFamily::Chiral, ch, 0.4, 0.2),
                                                make_bc(BcFamily::Dirichlet, ch)};
    const Hamiltonian ham = assemble(g, ch, links, bcs, kUnit);
    CHECK(hermiticity_defect(ham) <= 1e-12);
  }
}

TEST_CASE("interior rows have five-point sparsity") {
  const Grid2D g = build_rectangle(1, 1, 8, 8);
  const BoundaryChart ch = boundary_chart(g);
  const LinkField links = link_phases(g, ch, PotentialSpec::landau(1), kUnit);
  const Hamiltonian ham = assemble(g, ch, links, make_bc(BcFamily::Dirichlet, ch), kUnit);
  for (int r = 0; r < ham.dim(); ++r) {
    int offdiag = 0;
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(ham.h, r); it; ++it)
      if (it.col() != r) ++offdiag;
    CHECK(offdiag <= 5);
  }
}

TEST_CASE("chiral assembly is rejected on rectangles") {
  const Grid2D g = build_rectangle(1, 1, 8, 8);
  const BoundaryChart ch = boundary_chart(g);
  const LinkField links = link_phases(g, ch, PotentialSpec::zero(), kUnit);
  CHECK_THROWS_AS(assemble(g, ch, links, make_bc(BcFamily::Chiral, ch, 0.0, 0.1), kUnit),
                  std::invalid_argument);
}

TEST_CASE("corrupted links are rejected, and break Hermiticity when forced") {
  const Grid2D g = build_disk(1, 8, 16);
  const BoundaryChart ch = boundary_chart(g);
  LinkField links = link_phases(g, ch, PotentialSpec::symmetric(1), kUnit);
  // corrupt an azimuthal link between two retained nodes
  int victim = -1;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (g.edges[e].arc && g.cls[g.edges[e].a] == NodeClass::Interior &&
        g.cls[g.edges[e].b] == NodeClass::Interior)
      victim = static_cast<int>(e);
  links.u[victim] *= 2.0;  // modulus 2
  const BoundaryCondition bc = make_bc(BcFamily::Dirichlet, ch);
  CHECK_THROWS_AS(assemble(g, ch, links, bc, kUnit), std::invalid_argument);
  const Hamiltonian forced = detail::assemble_unchecked(g, ch, links, {bc}, kUnit, false, false);
  CHECK(hermiticity_defect(forced) > 1e-3);
}

TEST_CASE("lattice gauge covariance of the assembled Hamiltonian is exact") {
  struct Case {
    Grid2D grid;
    PotentialSpec a, a2;
    BcFamily fam;
  };
  std::vector<Case> cases;
  cases.push_back({build_rectangle(1, 1, 12, 12), PotentialSpec::landau(1.5),
                   PotentialSpec::symmetric(1.5), BcFamily::Robin});
  {
    PotentialSpec pert = PotentialSpec::symmetric(0.8);
    pert.add(PotentialSpec::gradient(0.4, 2.0, 3.0, 0.3, 0.2));
    cases.push_back({build_disk(1, 10, 20), PotentialSpec::symmetric(0.8), pert, BcFamily::Chiral});
  }
  cases.push_back({build_annulus(0.5, 1, 8, 16), PotentialSpec::aharonov_bohm(1.0),
                   PotentialSpec::aharonov_bohm(1.0 + kUnit.flux_quantum()), BcFamily::Neumann});

  for (const auto& c : cases) {
    const BoundaryChart ch = boundary_chart(c.grid);
    const BoundaryCondition bc = c.fam == BcFamily::Robin || c.fam == BcFamily::Chiral
                                     ? make_bc(c.fam, ch, 0.6, 0.2)
                                     : make_bc(c.fam, ch);
    const LinkField l1 = link_phases(c.grid, ch, c.a, kUnit);
    const LinkField l2 = link_phases(c.grid, ch, c.a2, kUnit);
    const GaugeFunction gf = gauge_function(c.a, c.a2, c.grid, ch, 0, kUnit);

    const Hamiltonian h1 = assemble(c.grid, ch, l1, bc, kUnit);
    const Hamiltonian h2 = assemble(c.grid, ch, l2, bc, kUnit);
    const Hamiltonian ht = assemble(c.grid, ch, transform_links(l1, gf), bc, kUnit);

    // similarity transform of h1 by the diagonal gauge action
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> sim = h1.h;
    for (int r = 0; r < sim.outerSize(); ++r)
      for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(sim, r); it; ++it)
        it.valueRef() = gf.action(h1.dof_to_node[r]) * it.value() *
                        std::conj(gf.action(h1.dof_to_node[it.col()]));

    double scale = 0;
    for (int r = 0; r < h1.h.outerSize(); ++r)
      for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(h1.h, r); it; ++it)
        scale = std::max(scale, std::abs(it.value()));

    auto maxdiff = [](const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& x,
                      const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& y) {
      Eigen::SparseMatrix<cplx, Eigen::RowMajor> d = x - y;
      double m = 0;
      for (int r = 0; r < d.outerSize(); ++r)
        for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(d, r); it; ++it)
          m = std::max(m, std::abs(it.value()));
      return m;
    };
    CHECK(maxdiff(h2.h, sim) / scale <= 1e-13);
    CHECK(maxdiff(ht.h, sim) / scale <= 1e-13);
    CHECK(maxdiff(ht.h, h2.h) / scale <= 1e-13);
  }
}

TEST_CASE("boundary form: antisymmetry and Dirichlet kernel") {
  const Grid2D g = build_disk(1, 10, 20);
  const BoundaryChart ch = boundary_chart(g);
  const LinkField links = link_phases(g, ch, PotentialSpec::symmetric(1), kUnit);

  const auto psi = random_state(g, 5);
  const auto phi = random_state(g, 6);
  const cplx a = boundary_form_line(g, ch, links, kUnit, psi, phi);
  const cplx b = boundary_form_line(g, ch, links, kUnit, phi, psi);
  CHECK(std::abs(a + std::conj(b)) < 1e-12 * (1.0 + std::abs(a)));

  // states with vanishing trace have vanishing boundary form
  const Hamiltonian ham = assemble(g, ch, links, make_bc(BcFamily::Dirichlet, ch), kUnit);
  Eigen::VectorXcd dofs = Eigen::VectorXcd::Random(ham.dim());
  const auto bulk = ham.extend(dofs);
  const BoundaryVector tr = trace(g, ch, links, bulk);
  CHECK(tr.v.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(boundary_form_line(g, ch, links, kUnit, bulk, bulk)) < 1e-10);
}

TEST_CASE("bulk and line boundary forms agree at second order") {
  auto defect = [](const Grid2D& g) {
    const BoundaryChart ch = boundary_chart(g);
    const LinkField links = link_phases(g, ch, PotentialSpec::symmetric(0.7), kUnit);
    const auto psi = smooth_state(g, 1.7, 0.9, 0.2);
    const auto phi = smooth_state(g, 0.8, 2.1, 1.1);
    return std::abs(boundary_form_bulk(g, ch, links, kUnit, psi, phi) -
                    boundary_form_line(g, ch, links, kUnit, psi, phi));
  };
  const double r1 = defect(build_rectangle(1, 1, 16, 16)) / defect(build_rectangle(1, 1, 32, 32));
  CHECK(r1 > 3.2);
  CHECK(r1 < 5.0);
  // on polar grids the finite-volume sum telescopes exactly onto the chart
  // quadrature, so the two evaluations coincide to rounding
  CHECK(defect(build_disk(1, 12, 24)) < 1e-12);
  CHECK(defect(build_annulus(0.5, 1, 8, 16)) < 1e-12);
}

TEST_CASE("probability current") {
  const PhysicalParams p = kUnit;
  // real state with zero potential carries no current
  {
    const Setup s = make(build_rectangle(1, 1, 12, 12), PotentialSpec::zero());
    std::vector<cplx> psi(s.grid.n_nodes());
    for (int i = 0; i < s.grid.n_nodes(); ++i)
      psi[i] = std::cos(2 * s.grid.x[i]) * std::sin(s.grid.y[i]) + 0.3;
    const CurrentField j = current(s.grid, s.links, p, psi, psi);
    for (int i = 0; i < s.grid.n_nodes(); ++i) {
      CHECK(std::abs(j.j1[i]) < 1e-13);
      CHECK(std::abs(j.j2[i]) < 1e-13);
    }
  }
  // plane wave: j_x = -i k sin(k dx)/(k dx), purely imaginary
  {
    const double k = 2.0;
    const Setup s = make(build_rectangle(1, 1, 24, 24), PotentialSpec::zero());
    std::vector<cplx> psi(s.grid.n_nodes());
    for (int i = 0; i < s.grid.n_nodes(); ++i) psi[i] = std::exp(cplx{0, k * s.grid.x[i]});
    const CurrentField j = current(s.grid, s.links, p, psi, psi);
    const int mid = s.grid.rect_index(12, 12);
    CHECK(std::abs(j.j1[mid].real()) < 1e-14);
    CHECK(j.j1[mid].imag() == doctest::Approx(-k).epsilon(0.01));
    CHECK(std::abs(j.j1[mid] - cplx{0, -k}) < 0.02 * k * k * k * s.grid.dx * s.grid.dx * 10);
  }
  // exact gauge invariance
  {
    const Grid2D g = build_disk(1, 8, 16);
    const BoundaryChart ch = boundary_chart(g);
    const PotentialSpec a = PotentialSpec::symmetric(1.2);
    PotentialSpec a2 = a;
    a2.add(PotentialSpec::gradient(0.5, 1.0, 2.0));
    const LinkField links = link_phases(g, ch, a, p);
    const GaugeFunction gf = gauge_function(a, a2, g, ch, 0, p);
    const auto psi = random_state(g, 8);
    const auto phi = random_state(g, 9);
    const CurrentField j1 = current(g, links, p, psi, phi);
    const CurrentField j2 =
        current(g, transform_links(links, gf), p, apply_gauge(psi, gf), apply_gauge(phi, gf));
    for (int i = 0; i < g.n_nodes(); ++i) {
      CHECK(std::abs(j1.j1[i] - j2.j1[i]) < 1e-12);
      CHECK(std::abs(j1.j2[i] - j2.j2[i]) < 1e-12);
    }
  }
}

TEST_CASE("boundary form is gauge invariant on random states") {
  for (const Grid2D& g : {build_rectangle(1, 1, 10, 10), build_disk(1, 8, 16)}) {
    const BoundaryChart ch = boundary_chart(g);
    const PotentialSpec a = PotentialSpec::landau(0.9);
    PotentialSpec a2 = PotentialSpec::symmetric(0.9);
    a2.add(PotentialSpec::gradient(0.25, 2.0, 2.0));
    const LinkField links = link_phases(g, ch, a, kUnit);
    const GaugeFunction gf = gauge_function(a, a2, g, ch, 0, kUnit);
    const LinkField tl = transform_links(links, gf);
    for (int t = 0; t < 20; ++t) {
      const auto psi = random_state(g, 100 + t);
      const auto phi = random_state(g, 200 + t);
      const cplx l1 = boundary_form_line(g, ch, links, kUnit, psi, phi);
      const cplx l2 =
          boundary_form_line(g, ch, tl, kUnit, apply_gauge(psi, gf), apply_gauge(phi, gf));
      CHECK(std::abs(l1 - l2) < 1e-12 * (1.0 + std::abs(l1)));
    }
  }
}

TEST_CASE("matrix dump uses the documented ordering") {
  const Grid2D g = build_rectangle(1, 1, 5, 5);
  const BoundaryChart ch = boundary_chart(g);
  const LinkField links = link_phases(g, ch, PotentialSpec::zero(), kUnit);
  const Hamiltonian ham = assemble(g, ch, links, make_bc(BcFamily::Robin, ch, 1.0), kUnit);
  // interior nodes first (node-index order), then the chart-ordered boundary
  const int n_int = 16;
  for (int d = 0; d < ham.dim(); ++d) {
    if (d < n_int)
      CHECK(g.cls[ham.dof_to_node[d]] == NodeClass::Interior);
    else
      CHECK(ham.dof_to_node[d] == ch.nodes[d - n_int].adj);
  }
  std::ostringstream m, w;
  ham.dump_matrix(m, w);
  const std::string ms = m.str(), ws = w.str();
  CHECK(ms.substr(0, 2) == "0,");
  CHECK(std::count(ws.begin(), ws.end(), '\n') == ham.dim());
}
