#pragma once

// Low-lying spectra of assembled Hamiltonians and the physics experiments
// built on them. The eigenproblem is solved after the similarity transform
// W^(1/2) H W^(-1/2), which is explicitly Hermitian; the iterative path is a
// shift-inverted block Lanczos with full reorthogonalization.

#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <vector>

#include "magbill/hamiltonian.hpp"

namespace magbill {

enum class SolveMethod { Dense, Iterative };

struct Spectrum {
  std::vector<double> values;     // ascending
  std::vector<double> residuals;  // ||S v - lambda v|| per pair
  Eigen::MatrixXcd vectors;       // dof-space columns, W-orthonormal (may be empty)
  std::string method;
  int iterations = 0;
  double tol = 0;
  // smallest residual representable for this matrix in double precision;
  // convergence targets max(tol * max(1, |lambda|), residual_floor)
  double residual_floor = 0;
};

struct EigsOptions {
  SolveMethod method = SolveMethod::Iterative;
  double tol = 1e-9;
  std::uint64_t seed = 12345;
  bool want_vectors = false;
  int block = 4;
  int max_basis = 240;
  int max_restarts = 3;
};

// k smallest eigenpairs of a Hermitian sparse matrix (defined by its values;
// only tiny asymmetry from roundoff is tolerated)
Spectrum eigs_hermitian(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& s, int k,
                        const EigsOptions& opt);

Spectrum eigs_lowest(const Hamiltonian& ham, int k, const EigsOptions& opt = {});

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<Spectrum> spectra;
};

struct LandauReport {
  double b = 0, radius = 0;
  double lambda1 = 0;
  double expected = 0;  // hbar omega_c / 2
  double rel_dev = 0;
  int degeneracy = 0;           // eigenvalues within 2% of expected
  double margin_above = 0;      // lambda1 - expected
  double gauge_crosscheck = 0;  // max |lambda(Landau) - lambda(Symmetric)|
};

// Dirichlet disk in a uniform field; requires the bulk-dominated regime
// l_B <= R/8 (B = 0 degenerates to the field-free disk and skips the check).
LandauReport landau_check(double b, double radius, int nr, int ntheta, int k,
                          const PhysicalParams& params, const EigsOptions& opt = {});

SweepResult flux_sweep(const Grid2D& grid, const BoundaryChart& chart,
                       const BoundaryCondition& bc, const PhysicalParams& params,
                       const std::vector<double>& flux_values, int k, const EigsOptions& opt = {});

struct FluxPeriodicity {
  double quantum_diff = 0;      // max level shift between phi and phi + flux quantum
  double half_quantum_diff = 0; // max level shift between phi and phi + half quantum
};

FluxPeriodicity flux_periodicity_check(const Grid2D& grid, const BoundaryChart& chart,
                                       const BoundaryCondition& bc, const PhysicalParams& params,
                                       double phi0, int k, const EigsOptions& opt = {});

struct RobinSweep {
  SweepResult sweep;
  bool lambda1_nonincreasing = true;
  double worst_increase = 0;  // largest upward step of lambda1 along increasing alpha
  bool alpha0_matches_neumann = true;
};

RobinSweep robin_sweep(const Grid2D& grid, const BoundaryChart& chart,
                       const std::vector<double>& alphas, const PotentialSpec& spec,
                       const PhysicalParams& params, int k, const EigsOptions& opt = {});

struct ConvergenceRow {
  double h = 0;  // representative mesh width
  std::vector<double> lambdas;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;       // h descending by factor 2
  std::vector<double> richardson_order;   // per eigenvalue index
  std::vector<bool> monotone;             // error sequence monotonicity flag
};

// Richardson slopes from successive triples; rows must halve h geometrically.
ConvergenceTable convergence_table(const std::vector<ConvergenceRow>& rows);

}  // namespace magbill
