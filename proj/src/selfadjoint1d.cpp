#include "magbill/selfadjoint1d.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace magbill {

namespace {

void check_unitary(const Eigen::Matrix2cd& u) {
  const double defect = (u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
  if (defect > 1e-12) throw std::invalid_argument("boundary parameter is not unitary");
}

// orthonormal eigenbasis of a (numerically) normal matrix via complex Schur
void normal_eigs(const Eigen::Matrix2cd& u, Eigen::Matrix2cd& q, Eigen::Vector2cd& ev) {
  Eigen::ComplexSchur<Eigen::Matrix2cd> schur(u);
  const Eigen::Matrix2cd t = schur.matrixT();
  if (std::abs(t(0, 1)) > 1e-9)
    throw std::runtime_error("boundary unitary is too far from normal");
  q = schur.matrixU();
  ev << t(0, 0), t(1, 1);
}

}  // namespace

UnitaryBC bc_from_unitary(const Eigen::Matrix2cd& u) {
  check_unitary(u);
  return UnitaryBC{u};
}

CayleyOperator cayley(const UnitaryBC& bc) {
  const Eigen::Matrix2cd a = Eigen::Matrix2cd::Identity() - bc.u;
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(a);
  if (svd.singularValues().minCoeff() <= 1e-10)
    throw std::invalid_argument("Cayley transform undefined: 1 is an eigenvalue of U");
  CayleyOperator op;
  op.l = cplx{0, 1} * (Eigen::Matrix2cd::Identity() + bc.u) * a.inverse();
  return op;
}

UnitaryBC inverse_cayley(const CayleyOperator& op) {
  const double defect = (op.l - op.l.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw std::invalid_argument("inverse Cayley requires a Hermitian operator");
  const Eigen::Matrix2cd li = op.l + cplx{0, 1} * Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd u = li.inverse() * (op.l - cplx{0, 1} * Eigen::Matrix2cd::Identity());
  return bc_from_unitary(u);
}

Interval1D make_interval(const Potential1D& a, double length, int n,
                         const PhysicalParams& params) {
  params.validate();
  if (length <= 0 || n < 100) throw std::invalid_argument("interval requires length > 0, n >= 100");
  Interval1D g;
  g.length = length;
  g.n = n;
  g.h = length / n;
  g.params = params;
  const double s = params.e / params.hbar;
  auto av = [&](double x) { return a ? a(x) : 0.0; };
  g.edge.resize(n - 1);
  for (int i = 0; i + 1 < n; ++i) g.edge[i] = s * av((i + 1) * g.h) * g.h;
  // half edges, inside -> out
  g.in0 = s * av(0.25 * g.h) * (-0.5 * g.h);           // x_0 -> 0
  g.out0 = s * av(-0.25 * g.h) * (-0.5 * g.h);         // 0 -> ghost0
  g.inl = s * av(length - 0.25 * g.h) * (0.5 * g.h);   // x_{n-1} -> L
  g.outl = s * av(length + 0.25 * g.h) * (0.5 * g.h);  // L -> ghostL
  return g;
}

EndpointData endpoint_data(const Interval1D& g, const std::vector<cplx>& state) {
  if (static_cast<int>(state.size()) != g.n + 2)
    throw std::invalid_argument("endpoint_data: state must hold n cells plus two ghosts");
  const cplx a0 = std::polar(1.0, -g.in0) * state[0];
  const cplx g0 = std::polar(1.0, +g.out0) * state[g.n];
  const cplx al = std::polar(1.0, -g.inl) * state[g.n - 1];
  const cplx gl = std::polar(1.0, +g.outl) * state[g.n + 1];
  EndpointData d;
  d.trace << 0.5 * (a0 + g0), 0.5 * (al + gl);
  d.normal << (g0 - a0) / g.h, (gl - al) / g.h;
  return d;
}

namespace {

Eigen::SparseMatrix<cplx, Eigen::RowMajor> assemble_1d(const UnitaryBC& bc, const Interval1D& g) {
  const int n = g.n;
  const double c = g.params.hbar * g.params.hbar / (2.0 * g.params.m);
  const double w = 1.0 / (g.h * g.h);

  // per-direction ghost closure in the eigenbasis of U
  Eigen::Matrix2cd q;
  Eigen::Vector2cd ev;
  normal_eigs(bc.u, q, ev);
  Eigen::Vector2d rho;
  for (int j = 0; j < 2; ++j) {
    if (std::abs(1.0 - ev[j]) < 1e-10) {
      rho[j] = -1.0;  // Dirichlet direction: trace eliminated
      continue;
    }
    const cplx lc = cplx{0, 1} * (1.0 + ev[j]) / (1.0 - ev[j]);
    if (std::abs(lc.imag()) > 1e-8 * std::max(1.0, std::abs(lc.real())))
      throw std::runtime_error("scalar Cayley datum is not real");
    const double l = lc.real();
    const double den = 1.0 - 0.5 * g.h * l;
    if (std::abs(den) < 1e-8)
      throw std::runtime_error("boundary condition resonates with the grid spacing");
    rho[j] = (1.0 + 0.5 * g.h * l) / den;
  }
  const Eigen::Matrix2cd emat = q * rho.cast<cplx>().asDiagonal() * q.adjoint();

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(3 * n + 4);
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, cplx{2.0 * c * w, 0});
    if (i + 1 < n) {
      trip.emplace_back(i, i + 1, -c * w * std::polar(1.0, g.edge[i]));
      trip.emplace_back(i + 1, i, -c * w * std::polar(1.0, -g.edge[i]));
    }
  }
  // eliminated ghosts: transported values a = (t0 psi_0, tl psi_{n-1}), g = E a
  const cplx t0 = std::polar(1.0, -g.in0);
  const cplx tl = std::polar(1.0, -g.inl);
  const cplx ts[2] = {t0, tl};
  const int nodes[2] = {0, n - 1};
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s)
      trip.emplace_back(nodes[r], nodes[s], -c * w * std::conj(ts[r]) * emat(r, s) * ts[s]);

  Eigen::SparseMatrix<cplx, Eigen::RowMajor> h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

}  // namespace

Eigen::SparseMatrix<cplx, Eigen::RowMajor> interval_matrix(const UnitaryBC& bc,
                                                           const Potential1D& a, double length,
                                                           int n, const PhysicalParams& params) {
  return assemble_1d(bc, make_interval(a, length, n, params));
}

Spectrum interval_spectrum(const UnitaryBC& bc, const Potential1D& a, double length, int n, int k,
                           const PhysicalParams& params, const EigsOptions& opt) {
  return eigs_hermitian(assemble_1d(bc, make_interval(a, length, n, params)), k, opt);
}

Spectrum interval_spectrum(const CayleyOperator& op, const Potential1D& a, double length, int n,
                           int k, const PhysicalParams& params, const EigsOptions& opt) {
  return interval_spectrum(inverse_cayley(op), a, length, n, k, params, opt);
}

GaugeFunction1D gauge_away_1d(const Potential1D& a, double length, int n,
                              const PhysicalParams& params) {
  params.validate();
  GaugeFunction1D gf;
  gf.length = length;
  gf.n = n;
  gf.params = params;
  const double h = length / n;
  auto av = [&](double x) { return a ? a(x) : 0.0; };
  gf.chi_node.resize(n);
  gf.chi_end0 = 0.0;
  gf.chi_ghost0 = -av(-0.25 * h) * 0.5 * h;
  gf.chi_node[0] = av(0.25 * h) * 0.5 * h;
  for (int i = 1; i < n; ++i) gf.chi_node[i] = gf.chi_node[i - 1] + av(i * h) * h;
  gf.chi_endl = gf.chi_node[n - 1] + av(length - 0.25 * h) * 0.5 * h;
  gf.chi_ghostl = gf.chi_endl + av(length + 0.25 * h) * 0.5 * h;
  return gf;
}

UnitaryBC transform_bc_1d(const UnitaryBC& bc, const GaugeFunction1D& chi) {
  const double s = chi.params.e / chi.params.hbar;
  Eigen::Vector2cd u;
  u << std::polar(1.0, s * chi.chi_end0), std::polar(1.0, s * chi.chi_endl);
  const Eigen::Matrix2cd ut = u.asDiagonal() * bc.u * u.asDiagonal().toDenseMatrix().adjoint();
  return bc_from_unitary(ut);
}

cplx boundary_form_1d(const Interval1D& g, const std::vector<cplx>& psi,
                      const std::vector<cplx>& phi) {
  const EndpointData dp = endpoint_data(g, psi);
  const EndpointData df = endpoint_data(g, phi);
  const double c = g.params.hbar * g.params.hbar / (2.0 * g.params.m);
  cplx sum{0, 0};
  for (int r = 0; r < 2; ++r)
    sum += std::conj(dp.trace[r]) * df.normal[r] - std::conj(dp.normal[r]) * df.trace[r];
  return -c * sum;
}

}  // namespace magbill
