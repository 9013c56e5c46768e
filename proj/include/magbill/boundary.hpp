#pragma once

// Boundary traces, the covariant normal derivative and the bulk-to-boundary
// machinery: B = T1 gamma - T2 nu. Upper-case vectors live on the chart.

#include <Eigen/Dense>
#include <functional>

#include "magbill/gauge.hpp"
#include "magbill/geometry.hpp"

namespace magbill {

struct BoundaryVector {
  const BoundaryChart* chart = nullptr;
  Eigen::VectorXcd v;
};

enum class BcFamily { Dirichlet, Neumann, Robin, Chiral };

const char* bc_name(BcFamily f);

struct BoundaryCondition {
  BcFamily family = BcFamily::Dirichlet;
  std::vector<double> alpha;  // sampled at chart nodes (Robin / Chiral)
  double beta = 0;            // Chiral
};

using AlphaFn = std::function<double(double s)>;

BoundaryCondition make_bc(BcFamily family, const BoundaryChart& chart,
                          const AlphaFn& alpha = nullptr, double beta = 0);
BoundaryCondition make_bc(BcFamily family, const BoundaryChart& chart, double alpha,
                          double beta = 0);

struct BulkToBoundaryOp {
  Eigen::MatrixXcd t1, t2;
  Eigen::VectorXd wds;  // chart quadrature weights; T1 is Hermitian in this metric
  std::string provenance;
};

// gamma: restriction of a bulk state to the chart (midpoint extrapolation
// between last ring and ghost ring on polar grids)
BoundaryVector trace(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                     const std::vector<cplx>& state);

// nu_A: outward covariant normal derivative on the chart, built from
// link-transported samples (second order; one-sided on rectangles,
// ghost-centered on polar grids)
BoundaryVector covariant_normal_derivative(const Grid2D& grid, const BoundaryChart& chart,
                                           const LinkField& links, const std::vector<cplx>& state);

BulkToBoundaryOp bc_operators(const BoundaryCondition& bc, const BoundaryChart& chart,
                              const PotentialSpec& spec, const PhysicalParams& params);

// max-norm of T1 Psi - T2 Psidot
double bc_residual(const BulkToBoundaryOp& op, const BoundaryVector& psi,
                   const BoundaryVector& psidot);

BulkToBoundaryOp transform_bc(const BulkToBoundaryOp& op, const GaugeFunction& chi,
                              const BoundaryChart& chart);

// periodic centered difference along each closed component (real antisymmetric
// for uniform arclength steps)
Eigen::MatrixXd tangential_difference(const BoundaryChart& chart);

namespace detail {
// one-sided covariant derivative at a rectangle boundary node along the
// outward lattice direction (nx, ny); used with both corner normals by the
// boundary-form quadrature
cplx rect_outward_derivative(const Grid2D& grid, const LinkField& links, int node, int nx, int ny,
                             const std::vector<cplx>& state);
}  // namespace detail

}  // namespace magbill
