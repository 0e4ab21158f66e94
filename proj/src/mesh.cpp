#include "varexp/mesh.hpp"

#include <cmath>

#include "varexp/errors.hpp"

namespace varexp {

Mesh Mesh::interval(double a, double b, int cells) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw DegenerateBox("interval requires finite bounds with b > a");
  if (cells < 2) throw DegenerateBox("at least 2 cells per axis required");
  Mesh m;
  m.dim_ = 1;
  m.lo_ = {a, 0.0};
  m.hi_ = {b, 0.0};
  m.cells_ = {cells, 1};
  m.h_ = {(b - a) / cells, 0.0};
  return m;
}

Mesh Mesh::rectangle(double ax, double bx, double ay, double by, int cells_x,
                     int cells_y) {
  if (!(bx > ax) || !(by > ay) || !std::isfinite(ax) || !std::isfinite(bx) ||
      !std::isfinite(ay) || !std::isfinite(by))
    throw DegenerateBox("rectangle requires finite bounds with positive sides");
  if (cells_x < 2 || cells_y < 2)
    throw DegenerateBox("at least 2 cells per axis required");
  Mesh m;
  m.dim_ = 2;
  m.lo_ = {ax, ay};
  m.hi_ = {bx, by};
  m.cells_ = {cells_x, cells_y};
  m.h_ = {(bx - ax) / cells_x, (by - ay) / cells_y};
  return m;
}

int Mesh::node_count() const {
  int n = cells_[0] + 1;
  if (dim_ == 2) n *= cells_[1] + 1;
  return n;
}

int Mesh::cell_count() const {
  return dim_ == 1 ? cells_[0] : cells_[0] * cells_[1];
}

double Mesh::cell_measure() const {
  return dim_ == 1 ? h_[0] : h_[0] * h_[1];
}

double Mesh::box_measure() const {
  double v = hi_[0] - lo_[0];
  if (dim_ == 2) v *= hi_[1] - lo_[1];
  return v;
}

Point Mesh::node(int i) const {
  const int nx = cells_[0] + 1;
  const int ix = i % nx;
  const int iy = i / nx;
  Point p{lo_[0] + ix * h_[0], 0.0};
  if (dim_ == 2) p[1] = lo_[1] + iy * h_[1];
  return p;
}

Point Mesh::cell_midpoint(int c) const {
  const int cx = c % cells_[0];
  const int cy = c / cells_[0];
  Point p{lo_[0] + (cx + 0.5) * h_[0], 0.0};
  if (dim_ == 2) p[1] = lo_[1] + (cy + 0.5) * h_[1];
  return p;
}

std::array<int, 4> Mesh::cell_corners(int c) const {
  if (dim_ == 1) return {c, c + 1, -1, -1};
  const int nx = cells_[0] + 1;
  const int cx = c % cells_[0];
  const int cy = c / cells_[0];
  const int base = cy * nx + cx;
  return {base, base + 1, base + nx, base + nx + 1};
}

bool Mesh::is_boundary(int i) const {
  const int nx = cells_[0] + 1;
  const int ix = i % nx;
  if (ix == 0 || ix == cells_[0]) return true;
  if (dim_ == 2) {
    const int iy = i / nx;
    if (iy == 0 || iy == cells_[1]) return true;
  }
  return false;
}

std::vector<int> Mesh::interior_nodes() const {
  std::vector<int> idx;
  idx.reserve(static_cast<size_t>(node_count()));
  for (int i = 0; i < node_count(); ++i)
    if (!is_boundary(i)) idx.push_back(i);
  return idx;
}

int Mesh::interior_count() const {
  int n = cells_[0] - 1;
  if (dim_ == 2) n *= cells_[1] - 1;
  return n;
}

bool Mesh::same_as(const Mesh& o) const {
  return dim_ == o.dim_ && lo_ == o.lo_ && hi_ == o.hi_ && cells_ == o.cells_;
}

CellVectorField gradient(const GridFunction& u) {
  const Mesh& m = u.mesh;
  CellVectorField g;
  g.mesh = m;
  g.values.assign(static_cast<size_t>(m.cell_count()), {0.0, 0.0});
  if (m.dim() == 1) {
    const double inv_h = 1.0 / m.spacing(0);
    for (int c = 0; c < m.cell_count(); ++c)
      g.values[static_cast<size_t>(c)][0] = (u[c + 1] - u[c]) * inv_h;
  } else {
    const double inv_hx = 1.0 / m.spacing(0);
    const double inv_hy = 1.0 / m.spacing(1);
    for (int c = 0; c < m.cell_count(); ++c) {
      const auto k = m.cell_corners(c);
      const double u00 = u[k[0]], u10 = u[k[1]], u01 = u[k[2]], u11 = u[k[3]];
      g.values[static_cast<size_t>(c)] = {
          0.5 * ((u10 - u00) + (u11 - u01)) * inv_hx,
          0.5 * ((u01 - u00) + (u11 - u10)) * inv_hy};
    }
  }
  return g;
}

double integrate(const Mesh& mesh, const std::vector<double>& cell_values) {
  double sum = 0.0;
  for (double v : cell_values) sum += v;
  return sum * mesh.cell_measure();
}

GridFunction enforce_zero_trace(const GridFunction& u) {
  GridFunction v = u;
  for (int i = 0; i < v.size(); ++i)
    if (v.mesh.is_boundary(i)) v[i] = 0.0;
  return v;
}

double cell_average(const GridFunction& u, int c) {
  const auto k = u.mesh.cell_corners(c);
  if (u.mesh.dim() == 1) return 0.5 * (u[k[0]] + u[k[1]]);
  return 0.25 * (u[k[0]] + u[k[1]] + u[k[2]] + u[k[3]]);
}

}  // namespace varexp
