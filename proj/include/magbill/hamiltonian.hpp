#pragma once

// Discrete magnetic Hamiltonian H = -(hbar^2/2m) lap_A restricted to the
// kernel of a boundary condition. Interior rows are the covariant five-point
// stencil; boundary conditions enter by exact elimination of the eliminated
// layer (Dirichlet trace on rectangles, ghost ring on polar grids), which
// keeps the matrix Hermitian in the cell-area metric W and makes lattice
// gauge covariance an exact identity.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <string>

#include "magbill/boundary.hpp"
#include "magbill/gauge.hpp"
#include "magbill/geometry.hpp"

namespace magbill {

struct Hamiltonian {
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> h;  // retained degrees of freedom
  Eigen::VectorXd w;                             // metric weight per dof
  std::vector<int> dof_to_node;
  std::vector<int> node_to_dof;  // -1 for eliminated nodes

  // reconstruction of eliminated node values from retained dofs
  struct EliminatedRule {
    int node = -1;
    std::vector<std::pair<int, cplx>> terms;  // (dof, coefficient)
  };
  std::vector<EliminatedRule> eliminated;

  const Grid2D* grid = nullptr;
  const BoundaryChart* chart = nullptr;
  PhysicalParams params;
  BcFamily family = BcFamily::Dirichlet;
  std::uint64_t grid_hash = 0;
  std::string gauge_desc;

  int dim() const { return static_cast<int>(h.rows()); }
  // bulk vector (all grid nodes) from retained dofs
  std::vector<cplx> extend(const Eigen::VectorXcd& dofs) const;
  // restriction of a bulk vector to retained dofs
  Eigen::VectorXcd restrict_bulk(const std::vector<cplx>& bulk) const;
  // coordinate dump `row,col,re,im` plus the weight vector
  void dump_matrix(std::ostream& os, std::ostream& weights) const;
};

// One boundary condition applied to every component.
Hamiltonian assemble(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                     const BoundaryCondition& bc, const PhysicalParams& params);
// Per-component boundary conditions (size = number of chart components).
Hamiltonian assemble(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                     const std::vector<BoundaryCondition>& bcs, const PhysicalParams& params);

// ||W H - (W H)^dagger||_max
double hermiticity_defect(const Hamiltonian& ham);

// boundary form as the chart line integral of the current flux
cplx boundary_form_line(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                        const PhysicalParams& params, const std::vector<cplx>& psi,
                        const std::vector<cplx>& phi);
// dual bulk evaluation <psi, H phi> - <H psi, phi> with the unconstrained
// operator (no boundary condition imposed)
cplx boundary_form_bulk(const Grid2D& grid, const BoundaryChart& chart, const LinkField& links,
                        const PhysicalParams& params, const std::vector<cplx>& psi,
                        const std::vector<cplx>& phi);

// sesquilinear probability current, componentwise in the grid frame
// (x/y on rectangles, r/theta on polar grids); zero where the centered
// stencil is unavailable
struct CurrentField {
  const Grid2D* grid = nullptr;
  std::vector<cplx> j1, j2;
};

CurrentField current(const Grid2D& grid, const LinkField& links, const PhysicalParams& params,
                     const std::vector<cplx>& psi, const std::vector<cplx>& phi);

namespace detail {
// assembly without link validation; exists so tests can probe how corrupted
// links break Hermiticity
Hamiltonian assemble_unchecked(const Grid2D& grid, const BoundaryChart& chart,
                               const LinkField& links, const std::vector<BoundaryCondition>& bcs,
                               const PhysicalParams& params, bool validate, bool defect_check);
}  // namespace detail

}  // namespace magbill
