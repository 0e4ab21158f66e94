#include <cmath>

#include "doctest.h"
#include "varexp/errors.hpp"
#include "varexp/mesh.hpp"

using namespace varexp;

TEST_CASE("interval mesh layout") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  CHECK(m.node_count() == 5);
  CHECK(m.cell_count() == 4);
  const double xs[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(m.node(i)[0] == doctest::Approx(xs[i]));
  CHECK(m.is_boundary(0));
  CHECK(m.is_boundary(4));
  for (int i = 1; i < 4; ++i) CHECK_FALSE(m.is_boundary(i));
  CHECK(m.interior_count() == 3);
}

TEST_CASE("rectangle mesh counting") {
  const Mesh m = Mesh::rectangle(0.0, 1.0, 0.0, 2.0, 2, 4);
  CHECK(m.node_count() == 15);
  int boundary = 0;
  for (int i = 0; i < m.node_count(); ++i)
    if (m.is_boundary(i)) ++boundary;
  CHECK(boundary == 12);
  CHECK(m.cell_count() == 8);
  CHECK(m.cell_measure() == doctest::Approx(0.25));
}

TEST_CASE("degenerate boxes rejected") {
  CHECK_THROWS_AS(Mesh::interval(0.0, 0.0, 4), DegenerateBox);
  CHECK_THROWS_AS(Mesh::interval(1.0, 0.0, 4), DegenerateBox);
  CHECK_THROWS_AS(Mesh::interval(0.0, 1.0, 1), DegenerateBox);
  CHECK_THROWS_AS(Mesh::rectangle(0.0, 1.0, 0.0, 0.0, 2, 2), DegenerateBox);
}

TEST_CASE("gradient exact for linears") {
  const Mesh m = Mesh::interval(0.0, 1.0, 8);
  GridFunction u(m);
  for (int i = 0; i < u.size(); ++i) u[i] = m.node(i)[0];
  const CellVectorField g = gradient(u);
  for (const auto& v : g.values) CHECK(v[0] == doctest::Approx(1.0));

  GridFunction c(m, 3.0);
  const CellVectorField gc = gradient(c);
  for (const auto& v : gc.values) CHECK(v[0] == 0.0);
}

TEST_CASE("gradient forward difference value") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  GridFunction u(m);
  for (int i = 0; i < u.size(); ++i) u[i] = m.node(i)[0] * m.node(i)[0];
  const CellVectorField g = gradient(u);
  CHECK(g.values[0][0] == doctest::Approx(0.25));  // (0.0625 - 0)/0.25
}

TEST_CASE("2-D gradient exact for linears") {
  const Mesh m = Mesh::rectangle(0.0, 1.0, 0.0, 1.0, 4, 3);
  GridFunction u(m);
  for (int i = 0; i < u.size(); ++i)
    u[i] = 2.0 * m.node(i)[0] - 3.0 * m.node(i)[1];
  const CellVectorField g = gradient(u);
  for (const auto& v : g.values) {
    CHECK(v[0] == doctest::Approx(2.0));
    CHECK(v[1] == doctest::Approx(-3.0));
  }
}

TEST_CASE("integrate") {
  const Mesh m1 = Mesh::interval(0.0, 1.0, 4);
  CHECK(integrate(m1, std::vector<double>(4, 1.0)) == doctest::Approx(1.0));

  const Mesh m2 = Mesh::rectangle(0.0, 2.0, 0.0, 1.0, 4, 4);
  CHECK(integrate(m2, std::vector<double>(16, 3.0)) == doctest::Approx(6.0));

  std::vector<double> mid(4);
  for (int c = 0; c < 4; ++c) mid[static_cast<size_t>(c)] = m1.cell_midpoint(c)[0];
  CHECK(integrate(m1, mid) == doctest::Approx(0.5));
}

TEST_CASE("enforce_zero_trace idempotent") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  GridFunction u(m, 1.0);
  const GridFunction v = enforce_zero_trace(u);
  CHECK(v[0] == 0.0);
  CHECK(v[4] == 0.0);
  CHECK(v[2] == 1.0);
  const GridFunction w = enforce_zero_trace(v);
  for (int i = 0; i < w.size(); ++i) CHECK(w[i] == v[i]);
}

TEST_CASE("cell corners and averages") {
  const Mesh m = Mesh::rectangle(0.0, 1.0, 0.0, 1.0, 2, 2);
  const auto k = m.cell_corners(0);
  CHECK(k[0] == 0);
  CHECK(k[1] == 1);
  CHECK(k[2] == 3);
  CHECK(k[3] == 4);
  GridFunction u(m);
  for (int i = 0; i < u.size(); ++i) u[i] = static_cast<double>(i);
  CHECK(cell_average(u, 0) == doctest::Approx(2.0));
}

TEST_CASE("mesh identity") {
  const Mesh a = Mesh::interval(0.0, 1.0, 4);
  const Mesh b = Mesh::interval(0.0, 1.0, 4);
  const Mesh c = Mesh::interval(0.0, 1.0, 5);
  CHECK(a.same_as(b));
  CHECK_FALSE(a.same_as(c));
}
