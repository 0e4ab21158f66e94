#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace varexp {

using Point = std::array<double, 2>;

// Uniform tensor mesh on an interval (N = 1) or an axis-aligned rectangle
// (N = 2).  Nodes are ordered lexicographically (x fastest), cells likewise.
class Mesh {
 public:
  static Mesh interval(double a, double b, int cells);
  static Mesh rectangle(double ax, double bx, double ay, double by,
                        int cells_x, int cells_y);

  int dim() const { return dim_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return h_[axis]; }

  int nodes_per_axis(int axis) const { return cells_[axis] + 1; }
  int node_count() const;
  int cell_count() const;
  int corners_per_cell() const { return dim_ == 1 ? 2 : 4; }

  double cell_measure() const;   // h1 * ... * hN
  double box_measure() const;

  Point node(int i) const;
  Point cell_midpoint(int c) const;
  // Node indices of the corners of cell c (2 entries in 1-D, 4 in 2-D,
  // unused entries -1).  2-D order: (00, 10, 01, 11).
  std::array<int, 4> cell_corners(int c) const;

  bool is_boundary(int i) const;
  std::vector<int> interior_nodes() const;
  int interior_count() const;

  bool same_as(const Mesh& other) const;

 private:
  int dim_ = 1;
  std::array<double, 2> lo_{0.0, 0.0};
  std::array<double, 2> hi_{1.0, 0.0};
  std::array<int, 2> cells_{1, 1};
  std::array<double, 2> h_{1.0, 0.0};
};

// Real-valued field sampled at mesh nodes.
struct GridFunction {
  Mesh mesh;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Mesh& m, double fill = 0.0)
      : mesh(m), values(static_cast<size_t>(m.node_count()), fill) {}

  double& operator[](int i) { return values[static_cast<size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(values.size()); }
};

// Per-cell constant vector field (a discrete gradient).
struct CellVectorField {
  Mesh mesh;
  std::vector<std::array<double, 2>> values;  // unused components 0
};

CellVectorField gradient(const GridFunction& u);

// Midpoint-rule integral of a per-cell field.
double integrate(const Mesh& mesh, const std::vector<double>& cell_values);

GridFunction enforce_zero_trace(const GridFunction& u);

// Mean of the corner nodal values of cell c.
double cell_average(const GridFunction& u, int c);

}  // namespace varexp
