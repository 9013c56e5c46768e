#include "magbill/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "magbill/kernels/kernels.hpp"

namespace magbill {

namespace {

struct Csr {
  std::size_t rows = 0;
  std::vector<std::int64_t> rowptr;
  std::vector<std::int32_t> col;
  std::vector<cplx> val;

  explicit Csr(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& s) {
    rows = s.rows();
    rowptr.assign(s.outerIndexPtr(), s.outerIndexPtr() + s.rows() + 1);
    col.assign(s.innerIndexPtr(), s.innerIndexPtr() + s.nonZeros());
    val.assign(s.valuePtr(), s.valuePtr() + s.nonZeros());
  }
  void apply(const cplx* x, cplx* y) const {
    kernels::spmv_csr(rows, rowptr.data(), col.data(), val.data(), x, y);
  }
};

double gershgorin_min(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& s) {
  double lo = 0;
  bool first = true;
  for (int r = 0; r < s.outerSize(); ++r) {
    double diag = 0, off = 0;
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(s, r); it; ++it) {
      if (it.col() == r)
        diag = it.value().real();
      else
        off += std::abs(it.value());
    }
    const double b = diag - off;
    lo = first ? b : std::min(lo, b);
    first = false;
  }
  return lo;
}

double inf_norm(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& s) {
  double n = 0;
  for (int r = 0; r < s.outerSize(); ++r) {
    double row = 0;
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(s, r); it; ++it)
      row += std::abs(it.value());
    n = std::max(n, row);
  }
  return n;
}

Spectrum dense_solve(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& s, int k,
                     const EigsOptions& opt) {
  const int n = static_cast<int>(s.rows());
  if (n > 20000) throw std::invalid_argument("dense eigensolver capped at dimension 20000");
  Eigen::MatrixXcd dense(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  Spectrum sp;
  sp.method = "dense";
  sp.tol = opt.tol;
  sp.residual_floor = 4.0 * std::numeric_limits<double>::epsilon() * inf_norm(s);
  sp.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  Csr csr(s);
  std::vector<cplx> tmp(n);
  sp.residuals.resize(k);
  if (opt.want_vectors) sp.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    csr.apply(v.data(), tmp.data());
    kernels::axpy(cplx{-sp.values[i], 0}, v.data(), tmp.data(), n);
    sp.residuals[i] = std::sqrt(kernels::nrm2sq(tmp.data(), n));
    if (opt.want_vectors) sp.vectors.col(i) = v;
  }
  return sp;
}

}  // namespace

Spectrum eigs_hermitian(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& s, int k,
                        const EigsOptions& opt) {
  const int n = static_cast<int>(s.rows());
  if (k < 1 || k > n) throw std::invalid_argument("eigs: k out of range");
  // block expansion needs headroom; tiny problems go straight to the dense path
  if (opt.method == SolveMethod::Dense || n <= std::max(128, 8 * opt.block))
    return dense_solve(s, k, opt);

  const Csr csr(s);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int b = std::max(1, opt.block);
  const int maxm = std::min(n, std::max(opt.max_basis, 4 * b + 2 * k));

  // rounding limits how small ||S x - lambda x|| can get for this matrix
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * inf_norm(s);

  double sigma = gershgorin_min(s) - 1.0;
  Eigen::MatrixXcd best_vecs;  // seeds the next restart
  std::vector<double> best_res;
  double best_lambda_min = 0;
  int total_iters = 0;

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    // factor the shifted matrix (positive definite by the Gershgorin bound)
    Eigen::SparseMatrix<cplx> shifted(s);
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= cplx{sigma, 0};
    shifted.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<cplx>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("shift-invert factorization failed");

    Eigen::MatrixXcd q(n, maxm);
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(maxm + b, maxm);

    // start block: previous Ritz vectors (thick restart) padded with noise
    Eigen::MatrixXcd v(n, b);
    for (int j = 0; j < b; ++j) {
      if (j < best_vecs.cols())
        v.col(j) = best_vecs.col(j);
      else
        for (int i = 0; i < n; ++i) v(i, j) = cplx{gauss(rng), gauss(rng)};
    }
    {
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(v);
      v = qr.householderQ() * Eigen::MatrixXcd::Identity(n, b);
    }
    q.leftCols(b) = v;
    int m = b;

    while (true) {
      ++total_iters;
      const int c0 = m - b;  // current block columns
      Eigen::MatrixXcd z = ldlt.solve(q.middleCols(c0, b));
      // full reorthogonalization, two passes
      Eigen::MatrixXcd coeff = Eigen::MatrixXcd::Zero(m, b);
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::MatrixXcd cc = q.leftCols(m).adjoint() * z;
        z -= q.leftCols(m) * cc;
        coeff += cc;
      }
      t.block(0, c0, m, b) = coeff;

      // Ritz extraction on the square part
      Eigen::MatrixXcd tm = t.topLeftCorner(m, m);
      tm = 0.5 * (tm + tm.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(tm);
      // largest mu of the inverse operator -> smallest lambda
      const int avail = std::min(k, m);
      std::vector<int> pick(avail);
      for (int i = 0; i < avail; ++i) pick[i] = m - 1 - i;  // eigenvalues ascend

      std::vector<double> lam(avail), res(avail);
      Eigen::MatrixXcd xs(n, avail);
      std::vector<cplx> tmp(n);
      bool all_ok = (avail == k);
      for (int i = 0; i < avail; ++i) {
        const double mu = es.eigenvalues()[pick[i]];
        lam[i] = sigma + 1.0 / mu;
        xs.col(i) = q.leftCols(m) * es.eigenvectors().col(pick[i]);
        csr.apply(xs.col(i).data(), tmp.data());
        kernels::axpy(cplx{-lam[i], 0}, xs.col(i).data(), tmp.data(), n);
        res[i] = std::sqrt(kernels::nrm2sq(tmp.data(), n));
        if (res[i] > std::max(opt.tol * std::max(1.0, std::abs(lam[i])), floor)) all_ok = false;
      }
      // keep the best answer seen so far
      if (!lam.empty() && (best_res.empty() || res[0] < best_res[0])) {
        best_res = res;
        best_vecs = xs;
        best_lambda_min = lam[0];
      }

      if (all_ok) {
        // sort ascending (they already are, smallest first)
        Spectrum sp;
        sp.method = "iterative";
        sp.tol = opt.tol;
        sp.residual_floor = floor;
        sp.iterations = total_iters;
        sp.values = lam;
        sp.residuals = res;
        if (opt.want_vectors) sp.vectors = xs;
        return sp;
      }

      if (m + b > maxm) break;  // restart with a tighter shift

      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
      Eigen::MatrixXcd r = qr.matrixQR().topRows(b).triangularView<Eigen::Upper>();
      Eigen::MatrixXcd vn = qr.householderQ() * Eigen::MatrixXcd::Identity(n, b);
      // guard against block breakdown
      for (int j = 0; j < b; ++j) {
        if (std::abs(r(j, j)) < 1e-13) {
          for (int i = 0; i < n; ++i) vn(i, j) = cplx{gauss(rng), gauss(rng)};
          Eigen::MatrixXcd cc = q.leftCols(m).adjoint() * vn.col(j);
          vn.col(j) -= q.leftCols(m) * cc;
          vn.col(j).normalize();
        }
      }
      t.block(m, c0, b, b) = r;
      q.middleCols(m, b) = vn;
      m += b;
    }

    sigma = best_lambda_min - 1.0;
  }

  std::string msg = "eigensolver did not converge; best residuals:";
  char buf[40];
  for (double r : best_res) {
    std::snprintf(buf, sizeof buf, " %.3e", r);
    msg += buf;
  }
  throw std::runtime_error(msg);
}

Spectrum eigs_lowest(const Hamiltonian& ham, int k, const EigsOptions& opt) {
  const int n = ham.dim();
  Eigen::VectorXd sq(n), isq(n);
  for (int i = 0; i < n; ++i) {
    sq[i] = std::sqrt(ham.w[i]);
    isq[i] = 1.0 / sq[i];
  }
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> s = ham.h;
  for (int r = 0; r < s.outerSize(); ++r)
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(s, r); it; ++it)
      it.valueRef() *= sq[r] * isq[it.col()];
  Spectrum sp = eigs_hermitian(s, k, opt);
  if (opt.want_vectors)
    for (int c = 0; c < sp.vectors.cols(); ++c)
      sp.vectors.col(c) = isq.asDiagonal() * sp.vectors.col(c);
  return sp;
}

LandauReport landau_check(double b, double radius, int nr, int ntheta, int k,
                          const PhysicalParams& params, const EigsOptions& opt) {
  params.validate();
  LandauReport rep;
  rep.b = b;
  rep.radius = radius;
  if (b > 0) {
    const double lb = std::sqrt(params.hbar / (params.e * b));
    if (lb > radius / 8.0)
      throw std::invalid_argument("landau_check: magnetic length exceeds R/8 (not bulk dominated)");
    rep.expected = params.hbar * params.e * b / (2.0 * params.m);
  }
  const Grid2D grid = build_disk(radius, nr, ntheta);
  const BoundaryChart chart = boundary_chart(grid);
  const BoundaryCondition bc = make_bc(BcFamily::Dirichlet, chart);

  const LinkField links_sym = link_phases(grid, chart, PotentialSpec::symmetric(b), params);
  const Hamiltonian h_sym = assemble(grid, chart, links_sym, bc, params);
  const Spectrum sp = eigs_lowest(h_sym, k, opt);
  rep.lambda1 = sp.values[0];
  if (b > 0) {
    rep.rel_dev = std::abs(rep.lambda1 - rep.expected) / rep.expected;
    rep.margin_above = rep.lambda1 - rep.expected;
    for (double v : sp.values)
      if (std::abs(v - rep.expected) <= 0.02 * rep.expected) ++rep.degeneracy;
  }

  const LinkField links_lan = link_phases(grid, chart, PotentialSpec::landau(b), params);
  const Hamiltonian h_lan = assemble(grid, chart, links_lan, bc, params);
  const Spectrum sp2 = eigs_lowest(h_lan, k, opt);
  for (int i = 0; i < k; ++i)
    rep.gauge_crosscheck = std::max(rep.gauge_crosscheck, std::abs(sp.values[i] - sp2.values[i]));
  return rep;
}

SweepResult flux_sweep(const Grid2D& grid, const BoundaryChart& chart,
                       const BoundaryCondition& bc, const PhysicalParams& params,
                       const std::vector<double>& flux_values, int k, const EigsOptions& opt) {
  if (grid.kind != GridKind::Annulus)
    throw std::invalid_argument("flux_sweep requires an annulus grid");
  for (std::size_t i = 1; i < flux_values.size(); ++i)
    if (!(flux_values[i] > flux_values[i - 1]))
      throw std::invalid_argument("sweep values must be strictly increasing");
  SweepResult out;
  out.parameter = "phi";
  out.values = flux_values;
  for (double phi : flux_values) {
    const LinkField links = link_phases(grid, chart, PotentialSpec::aharonov_bohm(phi), params);
    out.spectra.push_back(eigs_lowest(assemble(grid, chart, links, bc, params), k, opt));
  }
  return out;
}

FluxPeriodicity flux_periodicity_check(const Grid2D& grid, const BoundaryChart& chart,
                                       const BoundaryCondition& bc, const PhysicalParams& params,
                                       double phi0, int k, const EigsOptions& opt) {
  auto solve_at = [&](double phi) {
    const LinkField links = link_phases(grid, chart, PotentialSpec::aharonov_bohm(phi), params);
    return eigs_lowest(assemble(grid, chart, links, bc, params), k, opt);
  };
  const double q = params.flux_quantum();
  const Spectrum s0 = solve_at(phi0);
  const Spectrum s1 = solve_at(phi0 + q);
  const Spectrum sh = solve_at(phi0 + 0.5 * q);
  FluxPeriodicity fp;
  for (int i = 0; i < k; ++i) {
    fp.quantum_diff = std::max(fp.quantum_diff, std::abs(s0.values[i] - s1.values[i]));
    fp.half_quantum_diff = std::max(fp.half_quantum_diff, std::abs(s0.values[i] - sh.values[i]));
  }
  return fp;
}

RobinSweep robin_sweep(const Grid2D& grid, const BoundaryChart& chart,
                       const std::vector<double>& alphas, const PotentialSpec& spec,
                       const PhysicalParams& params, int k, const EigsOptions& opt) {
  RobinSweep out;
  out.sweep.parameter = "alpha";
  out.sweep.values = alphas;
  const LinkField links = link_phases(grid, chart, spec, params);
  double prev_lambda1 = 0;
  bool have_prev = false;
  for (double a : alphas) {
    const BoundaryCondition bc = make_bc(BcFamily::Robin, chart, a);
    const Hamiltonian ham = assemble(grid, chart, links, bc, params);
    if (a == 0.0) {
      // alpha = 0 must coincide with the Neumann assembly entry for entry
      const Hamiltonian hn =
          assemble(grid, chart, links, make_bc(BcFamily::Neumann, chart), params);
      const Eigen::SparseMatrix<cplx, Eigen::RowMajor> diff = ham.h - hn.h;
      double d = 0;
      for (int r = 0; r < diff.outerSize(); ++r)
        for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(diff, r); it; ++it)
          d = std::max(d, std::abs(it.value()));
      if (d != 0.0) out.alpha0_matches_neumann = false;
    }
    const Spectrum sp = eigs_lowest(ham, k, opt);
    if (have_prev && sp.values[0] > prev_lambda1) {
      out.worst_increase = std::max(out.worst_increase, sp.values[0] - prev_lambda1);
      if (out.worst_increase > 1e-10) out.lambda1_nonincreasing = false;
    }
    prev_lambda1 = sp.values[0];
    have_prev = true;
    out.sweep.spectra.push_back(sp);
  }
  return out;
}

ConvergenceTable convergence_table(const std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 3) throw std::invalid_argument("convergence_table needs >= 3 resolutions");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i - 1].h / rows[i].h;
    if (std::abs(ratio - 2.0) > 1e-9)
      throw std::invalid_argument("resolutions must halve h geometrically");
  }
  ConvergenceTable tab;
  tab.rows = rows;
  const std::size_t nk = rows[0].lambdas.size();
  for (std::size_t j = 0; j < nk; ++j) {
    // Richardson slope from the last triple
    const std::size_t n = rows.size();
    const double d1 = rows[n - 3].lambdas[j] - rows[n - 2].lambdas[j];
    const double d2 = rows[n - 2].lambdas[j] - rows[n - 1].lambdas[j];
    tab.richardson_order.push_back(std::log2(std::abs(d1 / d2)));
    bool mono = true;
    for (std::size_t i = 2; i < n; ++i) {
      const double e1 = std::abs(rows[i - 2].lambdas[j] - rows[i - 1].lambdas[j]);
      const double e2 = std::abs(rows[i - 1].lambdas[j] - rows[i].lambdas[j]);
      if (e2 > e1) mono = false;
    }
    tab.monotone.push_back(mono);
  }
  return tab;
}

}  // namespace magbill
