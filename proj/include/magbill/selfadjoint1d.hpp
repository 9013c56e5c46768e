#pragma once

// Self-adjoint boundary conditions for the 1D magnetic Schroedinger operator
// on a segment: the unitary parametrization T1 = i(I+U), T2 = I-U at the
// two-point boundary, its Cayley transform, interval spectra and the
// gauge-away construction on the simply connected interval.

#include <Eigen/Dense>
#include <functional>

#include "magbill/spectral.hpp"

namespace magbill {

struct UnitaryBC {
  Eigen::Matrix2cd u;
  Eigen::Matrix2cd t1() const { return cplx{0, 1} * (Eigen::Matrix2cd::Identity() + u); }
  Eigen::Matrix2cd t2() const { return Eigen::Matrix2cd::Identity() - u; }
};

struct CayleyOperator {
  Eigen::Matrix2cd l;  // Hermitian, nu psi = L gamma psi
};

// validates unitarity to 1e-12
UnitaryBC bc_from_unitary(const Eigen::Matrix2cd& u);
// L = i(I+U)(I-U)^(-1); requires 1 not in spec(U)
CayleyOperator cayley(const UnitaryBC& bc);
// U = (L + iI)^(-1) (L - iI); requires L Hermitian
UnitaryBC inverse_cayley(const CayleyOperator& op);

using Potential1D = std::function<double(double)>;

// cell-centered segment with one ghost on each side
struct Interval1D {
  double length = 0;
  int n = 0;
  double h = 0;
  PhysicalParams params;
  // directed phases: bulk edges x_i -> x_{i+1}; half edges around the
  // endpoints, oriented from the inside out
  std::vector<double> edge;                 // n-1 entries
  double in0 = 0, out0 = 0;                 // x_0 -> end0, end0 -> ghost0
  double inl = 0, outl = 0;                 // x_{n-1} -> endL, endL -> ghostL
};

Interval1D make_interval(const Potential1D& a, double length, int n,
                         const PhysicalParams& params);

// boundary data of a bulk vector arranged as [x_0 .. x_{n-1}, ghost0, ghostL]
struct EndpointData {
  Eigen::Vector2cd trace;   // (Psi(0), Psi(L))
  Eigen::Vector2cd normal;  // outward covariant derivatives
};
EndpointData endpoint_data(const Interval1D& grid, const std::vector<cplx>& state);

Spectrum interval_spectrum(const UnitaryBC& bc, const Potential1D& a, double length, int n, int k,
                           const PhysicalParams& params, const EigsOptions& opt = {});
Spectrum interval_spectrum(const CayleyOperator& op, const Potential1D& a, double length, int n,
                           int k, const PhysicalParams& params, const EigsOptions& opt = {});

// assembled matrix, exposed for Hermiticity checks
Eigen::SparseMatrix<cplx, Eigen::RowMajor> interval_matrix(const UnitaryBC& bc,
                                                           const Potential1D& a, double length,
                                                           int n, const PhysicalParams& params);

struct GaugeFunction1D {
  double length = 0;
  int n = 0;
  PhysicalParams params;
  std::vector<double> chi_node;  // per cell node, chi(0) = 0 anchor
  double chi_end0 = 0, chi_endl = 0;
  double chi_ghost0 = 0, chi_ghostl = 0;
};

// chi(x) = int_0^x A, accumulated with the same midpoint sums as the link
// phases so that gauging away is exact on the lattice
GaugeFunction1D gauge_away_1d(const Potential1D& a, double length, int n,
                              const PhysicalParams& params);

// U -> u U u^dagger with u the gauge action factor at the two endpoints
UnitaryBC transform_bc_1d(const UnitaryBC& bc, const GaugeFunction1D& chi);

// boundary form at the two endpoint normals (counting measure on the boundary)
cplx boundary_form_1d(const Interval1D& grid, const std::vector<cplx>& psi,
                      const std::vector<cplx>& phi);

}  // namespace magbill
