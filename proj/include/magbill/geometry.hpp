#pragma once

// Discrete billiard domains with boundary charts. Rectangles carry explicit
// boundary nodes on the lattice; polar grids (disk, annulus) are cell-centered
// in r with one ghost ring past each physical boundary, so the boundary circle
// itself falls midway between the last real ring and the ghost ring.

#include <cstdint>
#include <ostream>
#include <vector>

namespace magbill {

enum class GridKind { Rectangle, Disk, Annulus };
enum class NodeClass { Interior, Boundary, Ghost };

// Undirected stencil edge; the stored orientation a->b fixes the sign
// convention for link phases. Azimuthal edges follow the coordinate arc.
struct Edge {
  int a = 0, b = 0;
  double len = 0;       // arc length
  double mx = 0, my = 0;  // midpoint (on the arc for azimuthal edges)
  double tx = 0, ty = 0;  // unit tangent a->b at the midpoint
  bool arc = false;       // true for azimuthal polar edges
  double arc_r = 0, arc_th_a = 0, arc_th_b = 0;  // arc data when arc == true
};

struct Grid2D {
  GridKind kind = GridKind::Rectangle;

  // shape parameters
  double len_x = 0, len_y = 0;  // rectangle
  double r_in = 0, r_out = 0;   // annulus; disk uses r_out only
  int nx = 0, ny = 0;           // rectangle resolution
  int nr = 0, ntheta = 0;       // polar resolution

  double dx = 0, dy = 0, dr = 0, dtheta = 0;

  std::vector<double> x, y;
  std::vector<NodeClass> cls;
  std::vector<double> weight;  // cell area; zero on ghost nodes
  std::vector<Edge> edges;

  // adjacency: per node, (neighbor, edge index)
  std::vector<std::vector<std::pair<int, int>>> adj;

  int n_nodes() const { return static_cast<int>(x.size()); }
  int n_real() const;  // interior + boundary

  bool polar() const { return kind != GridKind::Rectangle; }

  // node index helpers
  int rect_index(int i, int j) const { return j * (nx + 1) + i; }
  int polar_index(int ring, int k) const { return ring * ntheta + k; }
  int ghost_outer(int k) const { return nr * ntheta + k; }
  int ghost_inner(int k) const { return (nr + 1) * ntheta + k; }  // annulus only

  // edge index between two adjacent nodes, together with the phase sign
  // (+1 if the stored orientation runs from -> to). Throws if not adjacent.
  std::pair<int, int> find_edge(int from, int to) const;

  double area() const;
  std::uint64_t content_hash() const;
  void dump(std::ostream& os) const;  // index,class,x,y,weight
};

// One sample point of the boundary chart. Chart points coincide with grid
// boundary nodes on rectangles; on polar grids they sit on the boundary
// circle between `adj` (last real ring) and `ghost`.
struct ChartNode {
  double s = 0;             // arclength from the component anchor
  double x = 0, y = 0;
  double nx = 0, ny = 0;    // outward unit normal
  double tx = 0, ty = 0;    // unit tangent, +90 deg rotation of n
  double ds = 0;            // quadrature weight
  int adj = -1;             // owning grid node
  int ghost = -1;           // paired ghost node, -1 on rectangles
  int comp = 0;
};

struct BoundaryChart {
  const Grid2D* grid = nullptr;
  std::vector<ChartNode> nodes;   // components concatenated, each a closed cycle
  std::vector<int> comp_begin;    // size n_components()+1

  int size() const { return static_cast<int>(nodes.size()); }
  int n_components() const { return static_cast<int>(comp_begin.size()) - 1; }
  int comp_size(int c) const { return comp_begin[c + 1] - comp_begin[c]; }
  double perimeter(int c) const;
  // cyclic neighbors within the component of chart node k
  int next(int k) const;
  int prev(int k) const;
};

Grid2D build_rectangle(double a, double b, int nx, int ny);
Grid2D build_disk(double r, int nr, int ntheta);
Grid2D build_annulus(double r_in, double r_out, int nr, int ntheta);
BoundaryChart boundary_chart(const Grid2D& grid);

}  // namespace magbill
