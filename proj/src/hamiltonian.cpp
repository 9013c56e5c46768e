#include "magbill/hamiltonian.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace magbill {

namespace {

double stencil_weight(const Grid2D& g, int node, const Edge& e) {
  if (g.kind == GridKind::Rectangle)
    return (std::abs(e.tx) > 0.5) ? 1.0 / (g.dx * g.dx) : 1.0 / (g.dy * g.dy);
  if (e.arc) return 1.0 / (e.arc_r * e.arc_r * g.dtheta * g.dtheta);
  const double face_r = std::hypot(e.mx, e.my);
  const double r_node = std::hypot(g.x[node], g.y[node]);
  return face_r / (r_node * g.dr * g.dr);
}

void validate_links(const LinkField& links) {
  auto check = [](const std::vector<cplx>& u, const std::vector<double>& ph) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (std::abs(std::abs(u[i]) - 1.0) > 1e-12)
        throw std::invalid_argument("link field invariant violated: |u| != 1");
      if (std::abs(u[i] - std::polar(1.0, ph[i])) > 1e-9)
        throw std::invalid_argument("link field phase/value mismatch");
    }
  };
  check(links.u, links.phase);
  check(links.u_half_in, links.half_in);
  check(links.u_half_out, links.half_out);
  check(links.u_chart_tan, links.chart_tan);
}

// ghost closure matrix C with g = C a (transported ghost and last-ring values
// at the chart points), from the boundary relation Psidot = M Psi with
// M = diag(alpha) + i beta Dhat. C = (I - X)^(-1) (I + X), X = (dr/2) M,
// is Hermitian whenever M is, which keeps the assembled matrix W-Hermitian.
Eigen::MatrixXcd ghost_closure(const BoundaryCondition& bc, const BoundaryChart& chart,
                               const LinkField& links, int comp, double dr) {
  const int b0 = chart.comp_begin[comp];
  const int nc = chart.comp_size(comp);
  if (bc.family == BcFamily::Dirichlet) return -Eigen::MatrixXcd::Identity(nc, nc);
  if (bc.family == BcFamily::Neumann) return Eigen::MatrixXcd::Identity(nc, nc);
  if (bc.family == BcFamily::Robin) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(nc, nc);
    for (int k = 0; k < nc; ++k) {
      const double a = bc.alpha[b0 + k];
      const double den = 1.0 - 0.5 * dr * a;
      if (std::abs(den) < 1e-12)
        throw std::runtime_error("Robin closure resonates with the grid spacing");
      c(k, k) = (1.0 + 0.5 * dr * a) / den;
    }
    return c;
  }
  // chiral
  const cplx iu{0, 1};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(nc, nc);
  for (int k = 0; k < nc; ++k) {
    const int gk = b0 + k;
    const int gnext = chart.next(gk), gprev = chart.prev(gk);
    const double ds2 = 2.0 * chart.nodes[gk].ds;
    m(k, gnext - b0) += iu * bc.beta * std::polar(1.0, links.chart_tan[gk]) / ds2;
    m(k, gprev - b0) -= iu * bc.beta * std::polar(1.0, -links.chart_tan[gprev]) / ds2;
    m(k, k) += bc.alpha[gk];
  }
  Eigen::MatrixXcd x = 0.5 * dr * m;
  Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(nc, nc) - x;
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Identity(nc, nc) + x;
  Eigen::MatrixXcd c;
  Eigen::LLT<Eigen::MatrixXcd> llt(lhs);
  if (llt.info() == Eigen::Success) {
    c = llt.solve(rhs);
  } else {
    c = Eigen::PartialPivLU<Eigen::MatrixXcd>(lhs).solve(rhs);
  }
  const double asym = (c - c.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) throw std::runtime_error("chiral ghost closure lost Hermiticity");
  return c;
}

}  // namespace

std::vector<cplx> Hamiltonian::extend(const Eigen::VectorXcd& dofs) const {
  if (dofs.size() != dim()) throw std::invalid_argument("extend: dof dimension mismatch");
  std::vector<cplx> bulk(grid->n_nodes(), cplx{0, 0});
  for (int d = 0; d < dim(); ++d) bulk[dof_to_node[d]] = dofs[d];
  for (const auto& rule : eliminated) {
    cplx v{0, 0};
    for (const auto& [d, cf] : rule.terms) v += cf * dofs[d];
    bulk[rule.node] = v;
  }
  return bulk;
}

Eigen::VectorXcd Hamiltonian::restrict_bulk(const std::vector<cplx>& bulk) const {
  if (static_cast<int>(bulk.size()) != grid->n_nodes())
    throw std::invalid_argument("restrict_bulk: dimension mismatch");
  Eigen::VectorXcd v(dim());
  for (int d = 0; d < dim(); ++d) v[d] = bulk[dof_to_node[d]];
  return v;
}

void Hamiltonian::dump_matrix(std::ostream& os, std::ostream& weights) const {
  char buf[160];
  for (int r = 0; r < h.outerSize(); ++r)
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(h, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", static_cast<int>(it.row()),
                    static_cast<int>(it.col()), it.value().real(), it.value().imag());
      os << buf;
    }
  for (int d = 0; d < dim(); ++d) {
    std::snprintf(buf, sizeof buf, "%.17g\n", w[d]);
    weights << buf;
  }
}

Hamiltonian assemble(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                     const BoundaryCondition& bc, const PhysicalParams& params) {
  return assemble(grid, chart, links, std::vector<BoundaryCondition>(chart.n_components(), bc),
                  params);
}

Hamiltonian assemble(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                     const std::vector<BoundaryCondition>& bcs, const PhysicalParams& params) {
  return detail::assemble_unchecked(grid, chart, links, bcs, params, true, true);
}

namespace detail {

Hamiltonian assemble_unchecked(const Grid2D& grid, const BoundaryChart& chart,
                               const LinkField& links, const std::vector<BoundaryCondition>& bcs,
                               const PhysicalParams& params, bool validate, bool defect_check) {
  params.validate();
  if (links.grid != &grid) throw std::invalid_argument("assemble: link field built for another grid");
  if (static_cast<int>(bcs.size()) != chart.n_components())
    throw std::invalid_argument("assemble: one boundary condition per component required");
  if (validate) validate_links(links);

  const bool rect = (grid.kind == GridKind::Rectangle);
  for (const auto& bc : bcs)
    if (rect && bc.family == BcFamily::Chiral)
      throw std::invalid_argument("chiral boundary conditions are supported on polar grids only");

  Hamiltonian ham;
  ham.grid = &grid;
  ham.chart = &chart;
  ham.params = params;
  ham.family = bcs[0].family;
  ham.grid_hash = grid.content_hash();

  const bool drop_boundary = rect && bcs[0].family == BcFamily::Dirichlet;

  // dof order: interior nodes by node index, then retained boundary nodes in
  // chart order
  ham.node_to_dof.assign(grid.n_nodes(), -1);
  for (int i = 0; i < grid.n_nodes(); ++i)
    if (grid.cls[i] == NodeClass::Interior) {
      ham.node_to_dof[i] = static_cast<int>(ham.dof_to_node.size());
      ham.dof_to_node.push_back(i);
    }
  if (!drop_boundary) {
    for (int k = 0; k < chart.size(); ++k) {
      const int n = chart.nodes[k].adj;
      if (ham.node_to_dof[n] >= 0) continue;  // polar charts touch each ring node once
      ham.node_to_dof[n] = static_cast<int>(ham.dof_to_node.size());
      ham.dof_to_node.push_back(n);
    }
  } else {
    for (int k = 0; k < chart.size(); ++k) {
      Hamiltonian::EliminatedRule r;
      r.node = chart.nodes[k].adj;
      ham.eliminated.push_back(r);  // trace forced to zero
    }
  }

  const int dim = static_cast<int>(ham.dof_to_node.size());
  ham.w.resize(dim);
  for (int d = 0; d < dim; ++d) ham.w[d] = grid.weight[ham.dof_to_node[d]];

  const double c = params.hbar * params.hbar / (2.0 * params.m);
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * 6);

  // chart lookup for rectangle boundary rows
  std::unordered_map<int, int> node_chart;
  if (rect)
    for (int k = 0; k < chart.size(); ++k) node_chart[chart.nodes[k].adj] = k;

  for (int d = 0; d < dim; ++d) {
    const int i = ham.dof_to_node[d];
    double diag = 0;

    for (const auto& [nb, e] : grid.adj[i]) {
      const double wij = stencil_weight(grid, i, grid.edges[e]);
      diag += c * wij;
      const int nd = ham.node_to_dof[nb];
      if (nd >= 0) {
        trip.emplace_back(d, nd, -c * wij * links.hop(e, i));
      } else if (grid.cls[nb] == NodeClass::Ghost) {
        // replaced by the ghost closure below
      }
      // eliminated Dirichlet boundary value: nothing to add
    }

    if (rect && grid.cls[i] == NodeClass::Boundary) {
      // fold the ghost layer through the Robin/Neumann relation, one missing
      // lattice direction at a time
      const int ii = i % (grid.nx + 1), jj = i / (grid.nx + 1);
      const int k = node_chart.at(i);
      const double alpha = bcs[0].alpha.empty() ? 0.0 : bcs[0].alpha[k];
      const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& dir : dirs) {
        const int oi = ii + dir[0], oj = jj + dir[1];
        if (oi >= 0 && oi <= grid.nx && oj >= 0 && oj <= grid.ny) continue;  // real neighbor
        const double h = dir[0] != 0 ? grid.dx : grid.dy;
        const double wn = 1.0 / (h * h);
        const int in_node = grid.rect_index(ii - dir[0], jj - dir[1]);
        auto [e_in, sgn] = grid.find_edge(i, in_node);
        (void)sgn;
        diag += c * wn * (1.0 - 2.0 * h * alpha);
        trip.emplace_back(d, ham.node_to_dof[in_node], -c * wn * links.hop(e_in, i));
      }
    }

    trip.emplace_back(d, d, cplx{diag, 0});
  }

  if (grid.polar()) {
    for (int comp = 0; comp < chart.n_components(); ++comp) {
      const Eigen::MatrixXcd cmat = ghost_closure(bcs[comp], chart, links, comp, grid.dr);
      const int b0 = chart.comp_begin[comp];
      const int nc = chart.comp_size(comp);
      // face weight of the radial boundary edge, equal for all chart nodes
      const ChartNode& c0 = chart.nodes[b0];
      const double face_r = std::hypot(c0.x, c0.y);
      const double r_ring = std::hypot(grid.x[c0.adj], grid.y[c0.adj]);
      const double wout = face_r / (r_ring * grid.dr * grid.dr);

      std::vector<cplx> t(nc);
      for (int k = 0; k < nc; ++k) t[k] = std::polar(1.0, -links.half_in[b0 + k]);

      for (int k = 0; k < nc; ++k) {
        const int row = ham.node_to_dof[chart.nodes[b0 + k].adj];
        Hamiltonian::EliminatedRule rule;
        rule.node = chart.nodes[b0 + k].ghost;
        const cplx back = std::polar(1.0, -links.half_out[b0 + k]);
        for (int l = 0; l < nc; ++l) {
          const cplx clk = cmat(k, l);
          if (clk == cplx{0, 0}) continue;
          const int col = ham.node_to_dof[chart.nodes[b0 + l].adj];
          trip.emplace_back(row, col, -c * wout * std::conj(t[k]) * clk * t[l]);
          rule.terms.emplace_back(col, back * clk * t[l]);
        }
        ham.eliminated.push_back(rule);
      }
    }
  }

  ham.h.resize(dim, dim);
  ham.h.setFromTriplets(trip.begin(), trip.end());
  ham.h.makeCompressed();

  if (defect_check) {
    const double defect = hermiticity_defect(ham);
    if (defect > 1e-10) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "assembly Hermiticity defect %.3e exceeds 1e-10", defect);
      throw std::runtime_error(buf);
    }
  }
  return ham;
}

}  // namespace detail

double hermiticity_defect(const Hamiltonian& ham) {
  using Sp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
  Sp wh = ham.h;
  for (int r = 0; r < wh.outerSize(); ++r)
    for (Sp::InnerIterator it(wh, r); it; ++it) it.valueRef() *= ham.w[r];
  Sp diff = wh - Sp(wh.adjoint());
  double defect = 0;
  for (int r = 0; r < diff.outerSize(); ++r)
    for (Sp::InnerIterator it(diff, r); it; ++it) defect = std::max(defect, std::abs(it.value()));
  return defect;
}

cplx boundary_form_line(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                        const PhysicalParams& params, const std::vector<cplx>& psi,
                        const std::vector<cplx>& phi) {
  const double c = params.hbar * params.hbar / (2.0 * params.m);
  cplx sum{0, 0};
  if (grid.kind == GridKind::Rectangle) {
    // integrate segment by segment; the normal jumps at corners, so each
    // corner contributes once per adjacent edge with that edge's normal
    struct Seg {
      int i0, j0, di, dj, count, nxv, nyv;
    };
    const Seg segs[4] = {{0, 0, 1, 0, grid.nx + 1, 0, -1},
                         {grid.nx, 0, 0, 1, grid.ny + 1, 1, 0},
                         {0, grid.ny, 1, 0, grid.nx + 1, 0, 1},
                         {0, 0, 0, 1, grid.ny + 1, -1, 0}};
    for (const auto& sg : segs) {
      const double h = sg.di != 0 ? grid.dx : grid.dy;
      for (int t = 0; t < sg.count; ++t) {
        const int node = grid.rect_index(sg.i0 + t * sg.di, sg.j0 + t * sg.dj);
        const double ds = (t == 0 || t == sg.count - 1) ? 0.5 * h : h;
        const cplx tp = psi[node], tf = phi[node];
        const cplx dp = detail::rect_outward_derivative(grid, links, node, sg.nxv, sg.nyv, psi);
        const cplx df = detail::rect_outward_derivative(grid, links, node, sg.nxv, sg.nyv, phi);
        sum += ds * (std::conj(tp) * df - std::conj(dp) * tf);
      }
    }
    return -c * sum;
  }
  const BoundaryVector tp = trace(grid, chart, links, psi);
  const BoundaryVector tf = trace(grid, chart, links, phi);
  const BoundaryVector dp = covariant_normal_derivative(grid, chart, links, psi);
  const BoundaryVector df = covariant_normal_derivative(grid, chart, links, phi);
  for (int k = 0; k < chart.size(); ++k)
    sum += chart.nodes[k].ds * (std::conj(tp.v[k]) * df.v[k] - std::conj(dp.v[k]) * tf.v[k]);
  return -c * sum;
}

namespace {

// unconstrained operator rows on every real node; rectangle boundary rows use
// one-sided covariant second differences so the quadrature covers the full
// domain at second order
std::vector<cplx> apply_unconstrained(const Grid2D& grid, const LinkField& links,
                                      const PhysicalParams& params, const std::vector<cplx>& f) {
  const double c = params.hbar * params.hbar / (2.0 * params.m);
  std::vector<cplx> out(grid.n_nodes(), cplx{0, 0});
  if (grid.polar()) {
    for (int i = 0; i < grid.n_nodes(); ++i) {
      if (grid.cls[i] == NodeClass::Ghost) continue;
      cplx acc{0, 0};
      for (const auto& [nb, e] : grid.adj[i]) {
        const double wij = stencil_weight(grid, i, grid.edges[e]);
        acc += c * wij * (f[i] - links.hop(e, i) * f[nb]);
      }
      out[i] = acc;
    }
    return out;
  }
  for (int j = 0; j <= grid.ny; ++j) {
    for (int i = 0; i <= grid.nx; ++i) {
      const int n = grid.rect_index(i, j);
      cplx acc{0, 0};
      const int dirs[2][2] = {{1, 0}, {0, 1}};
      for (const auto& dir : dirs) {
        const double h = dir[0] != 0 ? grid.dx : grid.dy;
        const int fi = i + dir[0], fj = j + dir[1];
        const int bi = i - dir[0], bj = j - dir[1];
        const bool fwd_ok = fi >= 0 && fi <= grid.nx && fj >= 0 && fj <= grid.ny;
        const bool bwd_ok = bi >= 0 && bi <= grid.nx && bj >= 0 && bj <= grid.ny;
        if (fwd_ok && bwd_ok) {
          const int nf = grid.rect_index(fi, fj), nb2 = grid.rect_index(bi, bj);
          auto [ef, sf] = grid.find_edge(n, nf);
          auto [eb, sb] = grid.find_edge(n, nb2);
          (void)sf;
          (void)sb;
          acc += c / (h * h) *
                 (2.0 * f[n] - links.hop(ef, n) * f[nf] - links.hop(eb, n) * f[nb2]);
        } else {
          // one-sided: f''(0) ~ (2 f0 - 5 f1 + 4 f2 - f3) / h^2 on transported samples
          const int si = fwd_ok ? dir[0] : -dir[0];
          const int sj = fwd_ok ? dir[1] : -dir[1];
          cplx fs[4];
          fs[0] = f[n];
          double phase_acc = 0;
          int prev = n;
          for (int t = 1; t <= 3; ++t) {
            const int nn = grid.rect_index(i + si * t, j + sj * t);
            auto [e, sgn] = grid.find_edge(prev, nn);
            (void)sgn;
            phase_acc += links.dir_phase(e, prev);
            fs[t] = std::polar(1.0, phase_acc) * f[nn];
            prev = nn;
          }
          acc += -c / (h * h) * (2.0 * fs[0] - 5.0 * fs[1] + 4.0 * fs[2] - fs[3]);
        }
      }
      out[n] = acc;
    }
  }
  return out;
}

}  // namespace

cplx boundary_form_bulk(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                        const PhysicalParams& params, const std::vector<cplx>& psi,
                        const std::vector<cplx>& phi) {
  (void)chart;
  if (static_cast<int>(psi.size()) != grid.n_nodes() ||
      static_cast<int>(phi.size()) != grid.n_nodes())
    throw std::invalid_argument("boundary_form_bulk: dimension mismatch");
  const std::vector<cplx> hphi = apply_unconstrained(grid, links, params, phi);
  const std::vector<cplx> hpsi = apply_unconstrained(grid, links, params, psi);
  cplx sum{0, 0};
  for (int i = 0; i < grid.n_nodes(); ++i) {
    if (grid.cls[i] == NodeClass::Ghost) continue;
    sum += grid.weight[i] * (std::conj(psi[i]) * hphi[i] - std::conj(hpsi[i]) * phi[i]);
  }
  return sum;
}

CurrentField current(const Grid2D& grid, const LinkField& links, const PhysicalParams& params,
                     const std::vector<cplx>& psi, const std::vector<cplx>& phi) {
  if (static_cast<int>(psi.size()) != grid.n_nodes() ||
      static_cast<int>(phi.size()) != grid.n_nodes())
    throw std::invalid_argument("current: dimension mismatch");
  const double c = params.hbar * params.hbar / (2.0 * params.m);
  CurrentField cf;
  cf.grid = &grid;
  cf.j1.assign(grid.n_nodes(), cplx{0, 0});
  cf.j2.assign(grid.n_nodes(), cplx{0, 0});

  auto covariant_diff = [&](const std::vector<cplx>& f, int node, int fwd, int bwd,
                            double spacing) {
    auto [ef, sf] = grid.find_edge(node, fwd);
    auto [eb, sb] = grid.find_edge(node, bwd);
    (void)sf;
    (void)sb;
    return (links.hop(ef, node) * f[fwd] - links.hop(eb, node) * f[bwd]) / (2.0 * spacing);
  };

  if (grid.kind == GridKind::Rectangle) {
    for (int j = 1; j < grid.ny; ++j)
      for (int i = 1; i < grid.nx; ++i) {
        const int n = grid.rect_index(i, j);
        const cplx dxphi = covariant_diff(phi, n, grid.rect_index(i + 1, j), grid.rect_index(i - 1, j), grid.dx);
        const cplx dxpsi = covariant_diff(psi, n, grid.rect_index(i + 1, j), grid.rect_index(i - 1, j), grid.dx);
        const cplx dyphi = covariant_diff(phi, n, grid.rect_index(i, j + 1), grid.rect_index(i, j - 1), grid.dy);
        const cplx dypsi = covariant_diff(psi, n, grid.rect_index(i, j + 1), grid.rect_index(i, j - 1), grid.dy);
        cf.j1[n] = -c * (std::conj(psi[n]) * dxphi - std::conj(dxpsi) * phi[n]);
        cf.j2[n] = -c * (std::conj(psi[n]) * dyphi - std::conj(dypsi) * phi[n]);
      }
    return cf;
  }

  const bool annulus = grid.kind == GridKind::Annulus;
  for (int ring = 0; ring < grid.nr; ++ring) {
    const double r = grid.r_in + (ring + 0.5) * grid.dr;
    for (int k = 0; k < grid.ntheta; ++k) {
      const int n = grid.polar_index(ring, k);
      // radial: centered over the two radial neighbours (ghosts included)
      int up = -1, dn = -1;
      if (ring + 1 < grid.nr) up = grid.polar_index(ring + 1, k);
      else up = grid.ghost_outer(k);
      if (ring > 0) dn = grid.polar_index(ring - 1, k);
      else if (annulus) dn = grid.ghost_inner(k);
      if (dn >= 0) {
        const cplx drphi = covariant_diff(phi, n, up, dn, grid.dr);
        const cplx drpsi = covariant_diff(psi, n, up, dn, grid.dr);
        cf.j1[n] = -c * (std::conj(psi[n]) * drphi - std::conj(drpsi) * phi[n]);
      }
      const int kf = grid.polar_index(ring, (k + 1) % grid.ntheta);
      const int kb = grid.polar_index(ring, (k + grid.ntheta - 1) % grid.ntheta);
      const cplx dtphi = covariant_diff(phi, n, kf, kb, r * grid.dtheta);
      const cplx dtpsi = covariant_diff(psi, n, kf, kb, r * grid.dtheta);
      cf.j2[n] = -c * (std::conj(psi[n]) * dtphi - std::conj(dtpsi) * phi[n]);
    }
  }
  return cf;
}

}  // namespace magbill
