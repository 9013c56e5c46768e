#include "magbill/geometry.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace magbill {

namespace {

constexpr double kPi = 3.14159265358979323846;

void add_edge_straight(Grid2D& g, int a, int b) {
  Edge e;
  e.a = a;
  e.b = b;
  const double dx = g.x[b] - g.x[a], dy = g.y[b] - g.y[a];
  e.len = std::hypot(dx, dy);
  e.mx = 0.5 * (g.x[a] + g.x[b]);
  e.my = 0.5 * (g.y[a] + g.y[b]);
  e.tx = dx / e.len;
  e.ty = dy / e.len;
  g.edges.push_back(e);
}

// azimuthal edge along the circle of radius r, from angle tha to thb
void add_edge_arc(Grid2D& g, int a, int b, double r, double tha, double thb) {
  Edge e;
  e.a = a;
  e.b = b;
  e.arc = true;
  e.arc_r = r;
  e.arc_th_a = tha;
  e.arc_th_b = thb;
  e.len = r * std::abs(thb - tha);
  const double thm = 0.5 * (tha + thb);
  e.mx = r * std::cos(thm);
  e.my = r * std::sin(thm);
  const double sgn = (thb > tha) ? 1.0 : -1.0;
  e.tx = -sgn * std::sin(thm);
  e.ty = sgn * std::cos(thm);
  g.edges.push_back(e);
}

void build_adjacency(Grid2D& g) {
  g.adj.assign(g.n_nodes(), {});
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    g.adj[g.edges[e].a].push_back({g.edges[e].b, e});
    g.adj[g.edges[e].b].push_back({g.edges[e].a, e});
  }
}

Grid2D build_polar(GridKind kind, double r_in, double r_out, int nr, int ntheta) {
  Grid2D g;
  g.kind = kind;
  g.r_in = r_in;
  g.r_out = r_out;
  g.nr = nr;
  g.ntheta = ntheta;
  g.dr = (r_out - r_in) / nr;
  g.dtheta = 2.0 * kPi / ntheta;

  const bool annulus = (kind == GridKind::Annulus);
  const int n_ghost_rings = annulus ? 2 : 1;
  const int total = (nr + n_ghost_rings) * ntheta;
  g.x.resize(total);
  g.y.resize(total);
  g.cls.resize(total);
  g.weight.resize(total);

  auto place_ring = [&](int base, double r, NodeClass c, double w) {
    for (int k = 0; k < ntheta; ++k) {
      const double th = k * g.dtheta;
      g.x[base + k] = r * std::cos(th);
      g.y[base + k] = r * std::sin(th);
      g.cls[base + k] = c;
      g.weight[base + k] = w;
    }
  };

  for (int j = 0; j < nr; ++j) {
    const double r = r_in + (j + 0.5) * g.dr;
    NodeClass c = NodeClass::Interior;
    if (j == nr - 1) c = NodeClass::Boundary;
    if (annulus && j == 0) c = NodeClass::Boundary;
    place_ring(j * ntheta, r, c, r * g.dr * g.dtheta);
  }
  place_ring(g.ghost_outer(0), r_out + 0.5 * g.dr, NodeClass::Ghost, 0.0);
  if (annulus) place_ring(g.ghost_inner(0), r_in - 0.5 * g.dr, NodeClass::Ghost, 0.0);

  // radial edges between real rings, then to the ghost rings
  for (int j = 0; j + 1 < nr; ++j)
    for (int k = 0; k < ntheta; ++k) add_edge_straight(g, g.polar_index(j, k), g.polar_index(j + 1, k));
  for (int k = 0; k < ntheta; ++k) add_edge_straight(g, g.polar_index(nr - 1, k), g.ghost_outer(k));
  if (annulus)
    for (int k = 0; k < ntheta; ++k) add_edge_straight(g, g.polar_index(0, k), g.ghost_inner(k));

  // azimuthal arcs on real rings
  for (int j = 0; j < nr; ++j) {
    const double r = r_in + (j + 0.5) * g.dr;
    for (int k = 0; k < ntheta; ++k) {
      const int k2 = (k + 1) % ntheta;
      add_edge_arc(g, g.polar_index(j, k), g.polar_index(j, k2), r, k * g.dtheta,
                   (k + 1) * g.dtheta);
    }
  }

  build_adjacency(g);
  return g;
}

}  // namespace

int Grid2D::n_real() const {
  int n = 0;
  for (auto c : cls)
    if (c != NodeClass::Ghost) ++n;
  return n;
}

std::pair<int, int> Grid2D::find_edge(int from, int to) const {
  for (const auto& [nb, e] : adj[from])
    if (nb == to) return {e, edges[e].a == from ? +1 : -1};
  throw std::invalid_argument("nodes are not edge-connected");
}

double Grid2D::area() const {
  if (kind == GridKind::Rectangle) return len_x * len_y;
  return kPi * (r_out * r_out - r_in * r_in);
}

std::uint64_t Grid2D::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const int k = static_cast<int>(kind);
  mix(&k, sizeof k);
  mix(&nx, sizeof nx);
  mix(&ny, sizeof ny);
  mix(&nr, sizeof nr);
  mix(&ntheta, sizeof ntheta);
  mix(x.data(), x.size() * sizeof(double));
  mix(y.data(), y.size() * sizeof(double));
  mix(weight.data(), weight.size() * sizeof(double));
  return h;
}

void Grid2D::dump(std::ostream& os) const {
  auto cname = [](NodeClass c) {
    switch (c) {
      case NodeClass::Interior: return "interior";
      case NodeClass::Boundary: return "boundary";
      default: return "ghost";
    }
  };
  char buf[160];
  for (int i = 0; i < n_nodes(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g\n", i, cname(cls[i]), x[i], y[i],
                  weight[i]);
    os << buf;
  }
}

Grid2D build_rectangle(double a, double b, int nx, int ny) {
  if (a <= 0 || b <= 0) throw std::invalid_argument("rectangle dimensions must be positive");
  if (nx < 4 || ny < 4) throw std::invalid_argument("rectangle resolution must be >= 4");

  Grid2D g;
  g.kind = GridKind::Rectangle;
  g.len_x = a;
  g.len_y = b;
  g.nx = nx;
  g.ny = ny;
  g.dx = a / nx;
  g.dy = b / ny;

  const int total = (nx + 1) * (ny + 1);
  g.x.resize(total);
  g.y.resize(total);
  g.cls.resize(total);
  g.weight.resize(total);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int n = g.rect_index(i, j);
      g.x[n] = i * g.dx;
      g.y[n] = j * g.dy;
      const bool bx = (i == 0 || i == nx), by = (j == 0 || j == ny);
      g.cls[n] = (bx || by) ? NodeClass::Boundary : NodeClass::Interior;
      const double wx = bx ? 0.5 * g.dx : g.dx;
      const double wy = by ? 0.5 * g.dy : g.dy;
      g.weight[n] = wx * wy;
    }
  }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) add_edge_straight(g, g.rect_index(i, j), g.rect_index(i + 1, j));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) add_edge_straight(g, g.rect_index(i, j), g.rect_index(i, j + 1));

  build_adjacency(g);
  return g;
}

Grid2D build_disk(double r, int nr, int ntheta) {
  if (r <= 0) throw std::invalid_argument("disk radius must be positive");
  if (nr < 4 || ntheta < 8) throw std::invalid_argument("disk resolution too small (nr>=4, ntheta>=8)");
  return build_polar(GridKind::Disk, 0.0, r, nr, ntheta);
}

Grid2D build_annulus(double r_in, double r_out, int nr, int ntheta) {
  if (r_in <= 0 || r_in >= r_out) throw std::invalid_argument("annulus requires 0 < r_in < r_out");
  if (nr < 4 || ntheta < 8)
    throw std::invalid_argument("annulus resolution too small (nr>=4, ntheta>=8)");
  return build_polar(GridKind::Annulus, r_in, r_out, nr, ntheta);
}

double BoundaryChart::perimeter(int c) const {
  double p = 0;
  for (int k = comp_begin[c]; k < comp_begin[c + 1]; ++k) p += nodes[k].ds;
  return p;
}

int BoundaryChart::next(int k) const {
  const int c = nodes[k].comp;
  return (k + 1 < comp_begin[c + 1]) ? k + 1 : comp_begin[c];
}

int BoundaryChart::prev(int k) const {
  const int c = nodes[k].comp;
  return (k - 1 >= comp_begin[c]) ? k - 1 : comp_begin[c + 1] - 1;
}

BoundaryChart boundary_chart(const Grid2D& grid) {
  BoundaryChart ch;
  ch.grid = &grid;

  if (grid.kind == GridKind::Rectangle) {
    // One component, counterclockwise from the origin corner. A corner is
    // owned by the edge segment that reaches it first in this traversal, and
    // takes that segment's normal.
    const int nx = grid.nx, ny = grid.ny;
    const double dx = grid.dx, dy = grid.dy;
    struct Seg {
      int i0, j0, di, dj, count;
      double nxv, nyv;
    };
    const Seg segs[4] = {
        {0, 0, 1, 0, nx + 1, 0, -1},       // bottom, owns (0,0) and (nx,0)
        {nx, 1, 0, 1, ny, 1, 0},           // right, owns (nx,ny)
        {nx - 1, ny, -1, 0, nx, 0, 1},     // top, owns (0,ny)
        {0, ny - 1, 0, -1, ny - 1, -1, 0}  // left
    };
    double s = 0;
    int prev_node = -1;
    for (const auto& sg : segs) {
      for (int t = 0; t < sg.count; ++t) {
        const int i = sg.i0 + t * sg.di, j = sg.j0 + t * sg.dj;
        ChartNode cn;
        cn.adj = grid.rect_index(i, j);
        cn.x = grid.x[cn.adj];
        cn.y = grid.y[cn.adj];
        cn.nx = sg.nxv;
        cn.ny = sg.nyv;
        cn.tx = -cn.ny;
        cn.ty = cn.nx;
        cn.comp = 0;
        if (prev_node >= 0)
          s += std::hypot(cn.x - grid.x[prev_node], cn.y - grid.y[prev_node]);
        cn.s = s;
        prev_node = cn.adj;
        ch.nodes.push_back(cn);
      }
    }
    // quadrature weight: half of each incident perimeter segment
    const int n = static_cast<int>(ch.nodes.size());
    for (int k = 0; k < n; ++k) {
      const ChartNode& a = ch.nodes[k];
      const ChartNode& b = ch.nodes[(k + 1) % n];
      const ChartNode& p = ch.nodes[(k + n - 1) % n];
      const double fwd = std::hypot(b.x - a.x, b.y - a.y);
      const double bwd = std::hypot(a.x - p.x, a.y - p.y);
      ch.nodes[k].ds = 0.5 * (fwd + bwd);
    }
    (void)dx;
    (void)dy;
    ch.comp_begin = {0, n};
    return ch;
  }

  const int nt = grid.ntheta;
  const double dth = grid.dtheta;

  // outer component: counterclockwise, anchored at theta = 0
  for (int k = 0; k < nt; ++k) {
    const double th = k * dth;
    ChartNode cn;
    cn.x = grid.r_out * std::cos(th);
    cn.y = grid.r_out * std::sin(th);
    cn.nx = std::cos(th);
    cn.ny = std::sin(th);
    cn.tx = -cn.ny;
    cn.ty = cn.nx;
    cn.s = grid.r_out * th;
    cn.ds = grid.r_out * dth;
    cn.adj = grid.polar_index(grid.nr - 1, k);
    cn.ghost = grid.ghost_outer(k);
    cn.comp = 0;
    ch.nodes.push_back(cn);
  }
  ch.comp_begin = {0, nt};

  if (grid.kind == GridKind::Annulus) {
    // inner component: outward normal points into the hole, so the chart runs
    // clockwise (decreasing theta), anchored at theta = 0
    for (int m = 0; m < nt; ++m) {
      const int k = (nt - m) % nt;
      const double th = k * dth;
      ChartNode cn;
      cn.x = grid.r_in * std::cos(th);
      cn.y = grid.r_in * std::sin(th);
      cn.nx = -std::cos(th);
      cn.ny = -std::sin(th);
      cn.tx = -cn.ny;
      cn.ty = cn.nx;
      cn.s = grid.r_in * m * dth;
      cn.ds = grid.r_in * dth;
      cn.adj = grid.polar_index(0, k);
      cn.ghost = grid.ghost_inner(k);
      cn.comp = 1;
      ch.nodes.push_back(cn);
    }
    ch.comp_begin.push_back(2 * nt);
  }
  return ch;
}

}  // namespace magbill
