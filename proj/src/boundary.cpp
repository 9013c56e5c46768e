#include "magbill/boundary.hpp"

#include <cmath>
#include <stdexcept>

namespace magbill {

const char* bc_name(BcFamily f) {
  switch (f) {
    case BcFamily::Dirichlet: return "dirichlet";
    case BcFamily::Neumann: return "neumann";
    case BcFamily::Robin: return "robin";
    default: return "chiral";
  }
}

BoundaryCondition make_bc(BcFamily family, const BoundaryChart& chart, const AlphaFn& alpha,
                          double beta) {
  BoundaryCondition bc;
  bc.family = family;
  if (family == BcFamily::Robin || family == BcFamily::Chiral) {
    if (!alpha) throw std::invalid_argument("make_bc: alpha required for Robin/chiral");
    bc.alpha.resize(chart.size());
    for (int k = 0; k < chart.size(); ++k) {
      bc.alpha[k] = alpha(chart.nodes[k].s);
      if (!std::isfinite(bc.alpha[k])) throw std::invalid_argument("make_bc: alpha not finite");
    }
  }
  if (family == BcFamily::Chiral) {
    if (!std::isfinite(beta)) throw std::invalid_argument("make_bc: beta not finite");
    bc.beta = beta;
  }
  return bc;
}

BoundaryCondition make_bc(BcFamily family, const BoundaryChart& chart, double alpha, double beta) {
  return make_bc(
      family, chart, [alpha](double) { return alpha; }, beta);
}

namespace {

// neighbor of a rectangle node `steps` lattice sites along (di, dj)
int rect_step(const Grid2D& g, int node, int di, int dj, int steps) {
  const int i = node % (g.nx + 1), j = node / (g.nx + 1);
  const int ii = i + di * steps, jj = j + dj * steps;
  if (ii < 0 || ii > g.nx || jj < 0 || jj > g.ny)
    throw std::runtime_error("rectangle stencil leaves the grid");
  return g.rect_index(ii, jj);
}

}  // namespace

namespace detail {

cplx rect_outward_derivative(const Grid2D& grid, const LinkField& links, int node, int nx, int ny,
                             const std::vector<cplx>& state) {
  // f'(b) = (3 f0 - 4 f1 + f2) / (2h) on samples transported along the inward
  // lattice line
  const int di = -nx, dj = -ny;
  const double h = (di != 0) ? grid.dx : grid.dy;
  const int p1 = rect_step(grid, node, di, dj, 1);
  const int p2 = rect_step(grid, node, di, dj, 2);
  auto [e1, s1] = grid.find_edge(node, p1);
  auto [e2, s2] = grid.find_edge(p1, p2);
  (void)s1;
  (void)s2;
  const double th1 = links.dir_phase(e1, node);
  const double th2 = th1 + links.dir_phase(e2, p1);
  const cplx f1 = std::polar(1.0, th1) * state[p1];
  const cplx f2 = std::polar(1.0, th2) * state[p2];
  return (3.0 * state[node] - 4.0 * f1 + f2) / (2.0 * h);
}

}  // namespace detail

BoundaryVector trace(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                     const std::vector<cplx>& state) {
  if (static_cast<int>(state.size()) != grid.n_nodes())
    throw std::invalid_argument("trace: state dimension mismatch");
  BoundaryVector out;
  out.chart = &chart;
  out.v.resize(chart.size());
  for (int k = 0; k < chart.size(); ++k) {
    const ChartNode& cn = chart.nodes[k];
    if (grid.kind == GridKind::Rectangle) {
      out.v[k] = state[cn.adj];
    } else {
      const cplx a = std::polar(1.0, -links.half_in[k]) * state[cn.adj];
      const cplx g = std::polar(1.0, +links.half_out[k]) * state[cn.ghost];
      out.v[k] = 0.5 * (a + g);
    }
  }
  return out;
}

BoundaryVector covariant_normal_derivative(const Grid2D& grid, const BoundaryChart& chart,
                                           const LinkField& links,
                                           const std::vector<cplx>& state) {
  if (static_cast<int>(state.size()) != grid.n_nodes())
    throw std::invalid_argument("covariant_normal_derivative: state dimension mismatch");
  BoundaryVector out;
  out.chart = &chart;
  out.v.resize(chart.size());
  for (int k = 0; k < chart.size(); ++k) {
    const ChartNode& cn = chart.nodes[k];
    if (grid.kind == GridKind::Rectangle) {
      out.v[k] = detail::rect_outward_derivative(grid, links, cn.adj,
                                                 static_cast<int>(std::lround(cn.nx)),
                                                 static_cast<int>(std::lround(cn.ny)), state);
    } else {
      const cplx a = std::polar(1.0, -links.half_in[k]) * state[cn.adj];
      const cplx g = std::polar(1.0, +links.half_out[k]) * state[cn.ghost];
      out.v[k] = (g - a) / grid.dr;
    }
  }
  return out;
}

Eigen::MatrixXd tangential_difference(const BoundaryChart& chart) {
  const int n = chart.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double c = 1.0 / (2.0 * chart.nodes[k].ds);
    d(k, chart.next(k)) += c;
    d(k, chart.prev(k)) -= c;
  }
  return d;
}

BulkToBoundaryOp bc_operators(const BoundaryCondition& bc, const BoundaryChart& chart,
                              const PotentialSpec& spec, const PhysicalParams& params) {
  params.validate();
  const int n = chart.size();
  BulkToBoundaryOp op;
  op.wds.resize(n);
  for (int k = 0; k < n; ++k) op.wds[k] = chart.nodes[k].ds;
  op.t1 = Eigen::MatrixXcd::Zero(n, n);
  op.t2 = Eigen::MatrixXcd::Zero(n, n);
  op.provenance = std::string(bc_name(bc.family)) + " / " + spec.describe();

  switch (bc.family) {
    case BcFamily::Dirichlet:
      op.t1 = Eigen::MatrixXcd::Identity(n, n);
      break;
    case BcFamily::Neumann:
      op.t2 = Eigen::MatrixXcd::Identity(n, n);
      break;
    case BcFamily::Robin:
      for (int k = 0; k < n; ++k) op.t1(k, k) = bc.alpha[k];
      op.t2 = Eigen::MatrixXcd::Identity(n, n);
      break;
    case BcFamily::Chiral: {
      const Eigen::MatrixXd ds = tangential_difference(chart);
      const cplx iu{0, 1};
      op.t1 = iu * bc.beta * ds;
      for (int k = 0; k < n; ++k) {
        const ChartNode& cn = chart.nodes[k];
        double ax, ay;
        eval_potential(spec, cn.x, cn.y, ax, ay);
        const double ta = cn.tx * ax + cn.ty * ay;
        op.t1(k, k) += bc.alpha[k] - bc.beta * (params.e / params.hbar) * ta;
      }
      op.t2 = Eigen::MatrixXcd::Identity(n, n);
      break;
    }
  }

  // T1 must be Hermitian in the ds-weighted boundary metric
  double defect = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      defect = std::max(defect,
                        std::abs(op.wds[i] * op.t1(i, j) - std::conj(op.wds[j] * op.t1(j, i))));
  if (defect > 1e-10)
    throw std::runtime_error("bc_operators: boundary operator lost Hermiticity");
  return op;
}

double bc_residual(const BulkToBoundaryOp& op, const BoundaryVector& psi,
                   const BoundaryVector& psidot) {
  if (psi.v.size() != op.t1.rows() || psidot.v.size() != op.t1.rows())
    throw std::invalid_argument("bc_residual: dimension mismatch");
  return (op.t1 * psi.v - op.t2 * psidot.v).cwiseAbs().maxCoeff();
}

BulkToBoundaryOp transform_bc(const BulkToBoundaryOp& op, const GaugeFunction& chi,
                              const BoundaryChart& chart) {
  if (chart.size() != op.t1.rows() ||
      static_cast<int>(chi.unitary_chart.size()) != chart.size())
    throw std::invalid_argument("transform_bc: dimension mismatch");
  const int n = chart.size();
  Eigen::VectorXcd u(n);
  for (int k = 0; k < n; ++k) u[k] = chi.action_chart(k);
  BulkToBoundaryOp out = op;
  out.t1 = u.asDiagonal() * op.t1 * u.asDiagonal().toDenseMatrix().adjoint();
  out.t2 = u.asDiagonal() * op.t2 * u.asDiagonal().toDenseMatrix().adjoint();
  out.provenance = op.provenance + " (gauge transformed)";
  return out;
}

}  // namespace magbill
