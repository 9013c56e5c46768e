#include <doctest.h>

#include <cmath>
#include <random>

#include "magbill/boundary.hpp"

using namespace magbill;

namespace {
constexpr double kPi = 3.14159265358979323846;
const PhysicalParams kUnit{};

std::vector<cplx> sample(const Grid2D& g, const std::function<cplx(double, double)>& f) {
  std::vector<cplx> v(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) v[i] = f(g.x[i], g.y[i]);
  return v;
}

// four-node ring chart with unit spacing, used for the hand-checked chiral T1
BoundaryChart tiny_ring() {
  static Grid2D dummy;
  BoundaryChart ch;
  ch.grid = &dummy;
  for (int k = 0; k < 4; ++k) {
    ChartNode n;
    n.s = k;
    n.ds = 1.0;
    const double th = 0.5 * kPi * k;
    n.x = std::cos(th);
    n.y = std::sin(th);
    n.nx = std::cos(th);
    n.ny = std::sin(th);
    n.tx = -n.ny;
    n.ty = n.nx;
    n.comp = 0;
    ch.nodes.push_back(n);
  }
  ch.comp_begin = {0, 4};
  return ch;
}
}  // namespace

TEST_CASE("trace on rectangle and polar grids") {
  const Grid2D sq = build_rectangle(1, 1, 8, 8);
  const BoundaryChart chs = boundary_chart(sq);
  const LinkField l0 = link_phases(sq, chs, PotentialSpec::zero(), kUnit);

  const auto ones = sample(sq, [](double, double) { return cplx{1, 0}; });
  const BoundaryVector t1 = trace(sq, chs, l0, ones);
  for (int k = 0; k < chs.size(); ++k) CHECK(std::abs(t1.v[k] - cplx{1, 0}) < 1e-14);

  const auto fx = sample(sq, [](double x, double) { return cplx{x, 0}; });
  const BoundaryVector t2 = trace(sq, chs, l0, fx);
  for (int k = 0; k < chs.size(); ++k)
    if (std::abs(chs.nodes[k].x - 1.0) < 1e-14 && chs.nodes[k].ny == 0)
      CHECK(std::abs(t2.v[k] - cplx{1, 0}) < 1e-14);

  // psi = r^2 on the disk: midpoint extrapolation reaches 1 at second order
  auto disk_err = [](int nr) {
    const Grid2D dk = build_disk(1, nr, 2 * nr);
    const BoundaryChart chd = boundary_chart(dk);
    const LinkField ld = link_phases(dk, chd, PotentialSpec::zero(), kUnit);
    const auto r2 = sample(dk, [](double x, double y) { return cplx{x * x + y * y, 0}; });
    const BoundaryVector tr = trace(dk, chd, ld, r2);
    double worst = 0;
    for (int k = 0; k < chd.size(); ++k) worst = std::max(worst, std::abs(tr.v[k] - cplx{1, 0}));
    return worst;
  };
  const double e8 = disk_err(8), e16 = disk_err(16);
  CHECK(e8 / e16 > 3.0);
  CHECK(e8 / e16 < 5.0);
}

TEST_CASE("covariant normal derivative") {
  const Grid2D sq = build_rectangle(1, 1, 16, 16);
  const BoundaryChart chs = boundary_chart(sq);
  const LinkField l0 = link_phases(sq, chs, PotentialSpec::zero(), kUnit);

  // psi = x is differentiated exactly by the one-sided stencil
  const auto fx = sample(sq, [](double x, double) { return cplx{x, 0}; });
  const BoundaryVector d1 = covariant_normal_derivative(sq, chs, l0, fx);
  for (int k = 0; k < chs.size(); ++k) {
    if (chs.nodes[k].nx == 1 && chs.nodes[k].ny == 0)
      CHECK(std::abs(d1.v[k] - cplx{1, 0}) < 1e-12);
    if (chs.nodes[k].nx == -1) CHECK(std::abs(d1.v[k] + cplx{1, 0}) < 1e-12);
  }
  const auto ones = sample(sq, [](double, double) { return cplx{1, 0}; });
  const BoundaryVector d0 = covariant_normal_derivative(sq, chs, l0, ones);
  for (int k = 0; k < chs.size(); ++k) CHECK(std::abs(d0.v[k]) < 1e-12);

  // symmetric gauge on the disk: n.A = 0, so the covariant derivative of r^2
  // reduces to the plain radial derivative 2r = 2 (exact for the ghost-centered
  // difference of a quadratic)
  {
    const Grid2D dk = build_disk(1, 8, 16);
    const BoundaryChart chd = boundary_chart(dk);
    const LinkField lb = link_phases(dk, chd, PotentialSpec::symmetric(1.0), kUnit);
    const auto r2 = sample(dk, [](double x, double y) { return cplx{x * x + y * y, 0}; });
    const BoundaryVector dv = covariant_normal_derivative(dk, chd, lb, r2);
    for (int k = 0; k < chd.size(); ++k) CHECK(std::abs(dv.v[k] - cplx{2, 0}) < 1e-12);
  }
  // a non-polynomial radial profile converges at second order
  auto disk_err = [](int nr) {
    const Grid2D dk = build_disk(1, nr, 2 * nr);
    const BoundaryChart chd = boundary_chart(dk);
    const LinkField lb = link_phases(dk, chd, PotentialSpec::symmetric(1.0), kUnit);
    const auto f = sample(dk, [](double x, double y) { return cplx{std::cos(2 * std::hypot(x, y)), 0}; });
    const BoundaryVector dv = covariant_normal_derivative(dk, chd, lb, f);
    const double exact = -2 * std::sin(2.0);
    double worst = 0;
    for (int k = 0; k < chd.size(); ++k) worst = std::max(worst, std::abs(dv.v[k] - cplx{exact, 0}));
    return worst;
  };
  const double e8 = disk_err(8), e16 = disk_err(16);
  CHECK(e8 < 0.05);
  CHECK(e8 / e16 > 3.0);
  CHECK(e8 / e16 < 5.0);
}

TEST_CASE("make_bc validation and limit families") {
  const BoundaryChart ch = boundary_chart(build_disk(1, 6, 12));
  const PotentialSpec a0 = PotentialSpec::zero();

  // Robin with alpha = 0 produces the Neumann operator pair
  const BulkToBoundaryOp robin0 = bc_operators(make_bc(BcFamily::Robin, ch, 0.0), ch, a0, kUnit);
  const BulkToBoundaryOp neu = bc_operators(make_bc(BcFamily::Neumann, ch), ch, a0, kUnit);
  CHECK((robin0.t1 - neu.t1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((robin0.t2 - neu.t2).cwiseAbs().maxCoeff() == 0.0);

  // chiral with beta = 0 reduces to Robin
  const BulkToBoundaryOp chi0 =
      bc_operators(make_bc(BcFamily::Chiral, ch, 0.7, 0.0), ch, a0, kUnit);
  const BulkToBoundaryOp rob = bc_operators(make_bc(BcFamily::Robin, ch, 0.7), ch, a0, kUnit);
  CHECK((chi0.t1 - rob.t1).cwiseAbs().maxCoeff() < 1e-15);

  // position dependent alpha sampled at chart nodes
  const double per = ch.perimeter(0);
  const BoundaryCondition bc = make_bc(
      BcFamily::Robin, ch, [per](double s) { return std::cos(2 * kPi * s / per); }, 0.0);
  for (int k = 0; k < ch.size(); ++k)
    CHECK(bc.alpha[k] == doctest::Approx(std::cos(2 * kPi * ch.nodes[k].s / per)));

  CHECK_THROWS_AS(make_bc(BcFamily::Robin, ch), std::invalid_argument);
  CHECK_THROWS_AS(make_bc(BcFamily::Chiral, ch, 1.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("bc_operators: Dirichlet, Robin, hand-checked chiral ring") {
  const BoundaryChart ch = boundary_chart(build_disk(1, 6, 12));
  const PotentialSpec a0 = PotentialSpec::zero();

  const BulkToBoundaryOp dir = bc_operators(make_bc(BcFamily::Dirichlet, ch), ch, a0, kUnit);
  CHECK((dir.t1 - Eigen::MatrixXcd::Identity(ch.size(), ch.size())).cwiseAbs().maxCoeff() == 0.0);
  CHECK(dir.t2.cwiseAbs().maxCoeff() == 0.0);

  const BulkToBoundaryOp rob = bc_operators(make_bc(BcFamily::Robin, ch, 2.0), ch, a0, kUnit);
  CHECK((rob.t1 - 2.0 * Eigen::MatrixXcd::Identity(ch.size(), ch.size())).cwiseAbs().maxCoeff() ==
        0.0);

  // 4-node ring, unit spacing, alpha = 0, beta = 1: T1 = i D_s, first row
  // (0, i/2, 0, -i/2), exactly Hermitian
  const BoundaryChart ring = tiny_ring();
  const BulkToBoundaryOp chi =
      bc_operators(make_bc(BcFamily::Chiral, ring, 0.0, 1.0), ring, a0, kUnit);
  CHECK(std::abs(chi.t1(0, 1) - cplx{0, 0.5}) < 1e-15);
  CHECK(std::abs(chi.t1(0, 3) - cplx{0, -0.5}) < 1e-15);
  CHECK(std::abs(chi.t1(0, 0)) < 1e-15);
  CHECK(std::abs(chi.t1(0, 2)) < 1e-15);
  CHECK((chi.t1 - chi.t1.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bc_residual") {
  const BoundaryChart ch = boundary_chart(build_disk(1, 6, 12));
  const PotentialSpec a0 = PotentialSpec::zero();
  const int n = ch.size();
  BoundaryVector zero{&ch, Eigen::VectorXcd::Zero(n)};
  BoundaryVector ones{&ch, Eigen::VectorXcd::Ones(n)};

  const BulkToBoundaryOp dir = bc_operators(make_bc(BcFamily::Dirichlet, ch), ch, a0, kUnit);
  CHECK(bc_residual(dir, zero, ones) == 0.0);
  const BulkToBoundaryOp neu = bc_operators(make_bc(BcFamily::Neumann, ch), ch, a0, kUnit);
  CHECK(bc_residual(neu, ones, zero) == 0.0);
  const BulkToBoundaryOp rob = bc_operators(make_bc(BcFamily::Robin, ch, 1.0), ch, a0, kUnit);
  CHECK(bc_residual(rob, ones, ones) == 0.0);
  CHECK(bc_residual(rob, ones, zero) == doctest::Approx(1.0));
}

TEST_CASE("transform_bc: diagonal families invariant, chiral conjugates") {
  const Grid2D dk = build_disk(1, 12, 32);
  const BoundaryChart ch = boundary_chart(dk);
  const PotentialSpec a = PotentialSpec::symmetric(1.0);
  PotentialSpec a2 = a;
  a2.add(PotentialSpec::gradient(-0.4, 2.0, 1.0));
  const GaugeFunction gf = gauge_function(a, a2, dk, ch, 0, kUnit);

  const BulkToBoundaryOp rob = bc_operators(make_bc(BcFamily::Robin, ch, 1.3), ch, a, kUnit);
  const BulkToBoundaryOp robt = transform_bc(rob, gf, ch);
  CHECK((robt.t1 - rob.t1).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((robt.t2 - rob.t2).cwiseAbs().maxCoeff() < 1e-14);

  // constant chi leaves every family unchanged
  const GaugeFunction id = gauge_function(a, a, dk, ch, 0, kUnit);
  const BulkToBoundaryOp chi =
      bc_operators(make_bc(BcFamily::Chiral, ch, 0.5, 0.3), ch, a, kUnit);
  const BulkToBoundaryOp chit = transform_bc(chi, id, ch);
  CHECK((chit.t1 - chi.t1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("chiral transform against a rebuilt operator") {
  // u T1(A) u^dagger approaches T1(A - grad chi) at second order. The two
  // matrices place the tangential gauge correction differently (off-diagonal
  // phases versus the diagonal t.A term), so the comparison is on their action
  // on smooth boundary data.
  auto defect = [](int ntheta) {
    const Grid2D dk = build_disk(1, 8, ntheta);
    const BoundaryChart ch = boundary_chart(dk);
    const PotentialSpec a = PotentialSpec::symmetric(0.8);
    PotentialSpec a2 = a;
    a2.add(PotentialSpec::gradient(-0.3, 2.0, 1.5));
    const GaugeFunction gf = gauge_function(a, a2, dk, ch, 0, kUnit);
    const BoundaryCondition bc = make_bc(BcFamily::Chiral, ch, 0.4, 0.6);
    const BulkToBoundaryOp t_conj = transform_bc(bc_operators(bc, ch, a, kUnit), gf, ch);
    const BulkToBoundaryOp t_rebuilt = bc_operators(bc, ch, a2, kUnit);
    Eigen::VectorXcd probe(ch.size());
    for (int k = 0; k < ch.size(); ++k) {
      const double s = ch.nodes[k].s;
      probe[k] = std::exp(cplx{0, 2 * s}) + 0.5 * std::cos(3 * s);
    }
    return ((t_conj.t1 - t_rebuilt.t1) * probe).cwiseAbs().maxCoeff();
  };
  const double e32 = defect(32), e64 = defect(64);
  CHECK(e32 / e64 > 3.0);
  CHECK(e32 / e64 < 5.2);
}

TEST_CASE("gauge covariance of the covariant normal derivative is exact") {
  for (const Grid2D& g : {build_rectangle(1, 1, 12, 12), build_disk(1, 8, 24)}) {
    const BoundaryChart ch = boundary_chart(g);
    const PotentialSpec a = PotentialSpec::landau(1.1);
    PotentialSpec a2 = PotentialSpec::symmetric(1.1);
    a2.add(PotentialSpec::gradient(0.2, 1.0, 2.0));
    const LinkField links = link_phases(g, ch, a, kUnit);
    const GaugeFunction gf = gauge_function(a, a2, g, ch, 0, kUnit);
    const LinkField tl = transform_links(links, gf);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    std::vector<cplx> psi(g.n_nodes());
    for (auto& z : psi) z = cplx{gauss(rng), gauss(rng)};
    const auto psi2 = apply_gauge(psi, gf);

    const BoundaryVector lhs = covariant_normal_derivative(g, ch, tl, psi2);
    const BoundaryVector rhs = covariant_normal_derivative(g, ch, links, psi);
    for (int k = 0; k < ch.size(); ++k)
      CHECK(std::abs(lhs.v[k] - gf.action_chart(k) * rhs.v[k]) < 1e-10);
  }
}

TEST_CASE("bulk-to-boundary covariance chain for every family") {
  const Grid2D g = build_disk(1, 10, 24);
  const BoundaryChart ch = boundary_chart(g);
  const PotentialSpec a = PotentialSpec::symmetric(0.9);
  PotentialSpec a2 = a;
  a2.add(PotentialSpec::gradient(0.35, 2.0, 1.0, 0.2, 0.9));
  const LinkField links = link_phases(g, ch, a, kUnit);
  const GaugeFunction gf = gauge_function(a, a2, g, ch, 0, kUnit);
  const LinkField tl = transform_links(links, gf);

  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  std::vector<cplx> psi(g.n_nodes());
  for (auto& z : psi) z = cplx{gauss(rng), gauss(rng)};
  const auto psi2 = apply_gauge(psi, gf);

  for (BcFamily fam : {BcFamily::Dirichlet, BcFamily::Neumann, BcFamily::Robin, BcFamily::Chiral}) {
    const BoundaryCondition bc = fam == BcFamily::Dirichlet || fam == BcFamily::Neumann
                                     ? make_bc(fam, ch)
                                     : make_bc(fam, ch, 0.8, 0.25);
    const BulkToBoundaryOp op = bc_operators(bc, ch, a, kUnit);
    const BulkToBoundaryOp opt = transform_bc(op, gf, ch);

    const Eigen::VectorXcd b1 = op.t1 * trace(g, ch, links, psi).v -
                                op.t2 * covariant_normal_derivative(g, ch, links, psi).v;
    const Eigen::VectorXcd b2 = opt.t1 * trace(g, ch, tl, psi2).v -
                                opt.t2 * covariant_normal_derivative(g, ch, tl, psi2).v;
    for (int k = 0; k < ch.size(); ++k)
      CHECK(std::abs(b2[k] - gf.action_chart(k) * b1[k]) < 1e-10);

    // kernel membership certificates match on both sides
    const BoundaryVector tr = trace(g, ch, links, psi);
    const BoundaryVector nu = covariant_normal_derivative(g, ch, links, psi);
    const BoundaryVector tr2 = trace(g, ch, tl, psi2);
    const BoundaryVector nu2 = covariant_normal_derivative(g, ch, tl, psi2);
    CHECK(bc_residual(op, tr, nu) == doctest::Approx(bc_residual(opt, tr2, nu2)).epsilon(1e-9));
  }
}

TEST_CASE("boundary operators are Hermitian in the chart metric for every family") {
  const Grid2D g = build_annulus(0.5, 1, 8, 16);
  const BoundaryChart ch = boundary_chart(g);
  const PotentialSpec a = PotentialSpec::symmetric(2.0);
  for (BcFamily fam : {BcFamily::Dirichlet, BcFamily::Neumann, BcFamily::Robin, BcFamily::Chiral}) {
    const BoundaryCondition bc = fam == BcFamily::Dirichlet || fam == BcFamily::Neumann
                                     ? make_bc(fam, ch)
                                     : make_bc(fam, ch, -0.4, 0.15);
    const BulkToBoundaryOp op = bc_operators(bc, ch, a, kUnit);
    double defect = 0;
    for (int i = 0; i < ch.size(); ++i)
      for (int j = 0; j < ch.size(); ++j)
        defect = std::max(defect, std::abs(op.wds[i] * op.t1(i, j) -
                                           std::conj(op.wds[j] * op.t1(j, i))));
    CHECK(defect < 1e-12);
    // T2 is the identity or zero
    const double t2dev =
        std::min((op.t2 - Eigen::MatrixXcd::Identity(ch.size(), ch.size())).cwiseAbs().maxCoeff(),
                 op.t2.cwiseAbs().maxCoeff());
    CHECK(t2dev == 0.0);
  }
}
