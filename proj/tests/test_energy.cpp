#include <cmath>
#include <random>

#include "doctest.h"
#include "varexp/energy.hpp"
#include "varexp/errors.hpp"

using namespace varexp;

namespace {

Problem model_problem(const Mesh& m, double pv, double qv, double cv) {
  const ExponentField p = ExponentField::constant(pv, m);
  const ExponentField q = ExponentField::constant(qv, m);
  return Problem(m, OperatorKernel::px_laplacian(p),
                 Reaction::model(GridFunction(m, cv), q, std::max(cv, 1.0),
                                 qv, 1.0));
}

GridFunction random_zero_trace(const Mesh& m, std::mt19937_64& rng, double amp = 1.0) {
  GridFunction u(m);
  std::uniform_real_distribution<double> uni(-amp, amp);
  for (int i = 0; i < u.size(); ++i)
    if (!m.is_boundary(i)) u[i] = uni(rng);
  return u;
}

}  // namespace

TEST_CASE("energy closed forms") {
  const Mesh m = Mesh::interval(0.0, 1.0, 256);
  {
    const Problem prob = model_problem(m, 2.0, 4.0, 1.0);
    CHECK(energy(prob, GridFunction(m, 0.0)).total == 0.0);
  }
  {
    const Problem prob = model_problem(m, 2.0, 4.0, 0.0);  // f == 0
    GridFunction u(m);
    for (int i = 0; i < u.size(); ++i) {
      const double x = m.node(i)[0];
      u[i] = x * (1.0 - x);
    }
    CHECK(energy(prob, u).e0 == doctest::Approx(1.0 / 6.0).epsilon(1e-3));
    CHECK(energy(prob, u).j == 0.0);
  }
  {
    const Problem prob = model_problem(m, 2.0, 4.0, 1.0);
    GridFunction u(m);
    for (int i = 0; i < u.size(); ++i)
      u[i] = std::sin(3.14159265358979323846 * m.node(i)[0]);
    CHECK(energy(prob, u).j == doctest::Approx(3.0 / 32.0).epsilon(1e-3));
  }
}

TEST_CASE("directional derivative basics") {
  const Mesh m = Mesh::interval(0.0, 1.0, 32);
  const Problem prob = model_problem(m, 2.5, 4.0, 1.0);
  std::mt19937_64 rng(1);
  const GridFunction u = random_zero_trace(m, rng);

  CHECK(directional_derivative(prob, u, GridFunction(m, 0.0)) == 0.0);
  const GridFunction v = random_zero_trace(m, rng);
  CHECK(directional_derivative(prob, GridFunction(m, 0.0), v) == doctest::Approx(0.0));
}

TEST_CASE("directional derivative matches central differences") {
  std::mt19937_64 rng(2);
  for (int dim = 1; dim <= 2; ++dim) {
    const Mesh m = dim == 1 ? Mesh::interval(0.0, 1.0, 24)
                            : Mesh::rectangle(0.0, 1.0, 0.0, 1.0, 8, 7);
    const ExponentField p =
        ExponentField::from_expression(Expr::parse("2.2 + 0.4*x"), m);
    const ExponentField q = ExponentField::constant(4.0, m);
    for (auto maker : {&OperatorKernel::px_laplacian,
                       &OperatorKernel::weighted_px_laplacian,
                       &OperatorKernel::px_mean_curvature}) {
      const Problem prob(m, maker(p),
                         Reaction::model(GridFunction(m, 1.0), q, 1.0, 4.0, 1.0));
      for (int trial = 0; trial < 10; ++trial) {
        const GridFunction u = random_zero_trace(m, rng);
        const GridFunction v = random_zero_trace(m, rng);
        const double h = 1e-5;
        GridFunction up = u, um = u;
        for (int i = 0; i < u.size(); ++i) {
          up[i] += h * v[i];
          um[i] -= h * v[i];
        }
        const double fd =
            (energy(prob, up).total - energy(prob, um).total) / (2.0 * h);
        const double exact = directional_derivative(prob, u, v);
        CHECK(std::fabs(fd - exact) <= 1e-6 * (1.0 + std::fabs(exact)));
      }
    }
  }
}

TEST_CASE("assembled gradient equals per-node directional derivatives") {
  const Mesh m = Mesh::interval(0.0, 1.0, 8);  // 9 nodes
  const Problem prob = model_problem(m, 2.5, 4.0, 1.0);
  std::mt19937_64 rng(3);
  const GridFunction u = random_zero_trace(m, rng);
  const GridFunction g = gradient_vector(prob, u);
  for (int i = 0; i < m.node_count(); ++i) {
    if (m.is_boundary(i)) {
      CHECK(g[i] == 0.0);
      continue;
    }
    GridFunction hat(m, 0.0);
    hat[i] = 1.0;
    const double dd = directional_derivative(prob, u, hat);
    CHECK(std::fabs(g[i] - dd) <= 1e-12 * (1.0 + std::fabs(dd)));
  }
}

TEST_CASE("steepest descent step decreases energy") {
  const Mesh m = Mesh::interval(0.0, 1.0, 32);
  const Problem prob = model_problem(m, 2.0, 4.0, 1.0);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const GridFunction u = random_zero_trace(m, rng);
    const GridFunction g = gradient_vector(prob, u);
    if (gradient_norm(prob, g) < 1e-12) continue;
    GridFunction stepped = u;
    for (int i = 0; i < u.size(); ++i) stepped[i] -= 1e-4 * g[i];
    CHECK(energy(prob, stepped).total < energy(prob, u).total);
  }
}

TEST_CASE("gradient parts recompose") {
  const Mesh m = Mesh::interval(0.0, 1.0, 32);
  const Problem prob = model_problem(m, 2.5, 4.0, 1.0);
  std::mt19937_64 rng(5);
  const GridFunction u = random_zero_trace(m, rng);
  GridFunction ge, gj;
  gradient_parts(prob, u, ge, gj);
  const GridFunction g = gradient_vector(prob, u);
  for (int i = 0; i < g.size(); ++i)
    CHECK(g[i] == doctest::Approx(ge[i] - gj[i]).epsilon(1e-12));
}

TEST_CASE("monotone gap") {
  const Mesh m = Mesh::interval(0.0, 1.0, 32);
  const Problem prob = model_problem(m, 2.0, 4.0, 1.0);
  std::mt19937_64 rng(6);
  const GridFunction u = random_zero_trace(m, rng);

  CHECK(monotone_gap(prob, u, u) == 0.0);

  // p = 2: gap equals the Sobolev seminorm squared of u - v
  const GridFunction v = random_zero_trace(m, rng);
  GridFunction d(m);
  for (int i = 0; i < d.size(); ++i) d[i] = u[i] - v[i];
  const CellVectorField gd = gradient(d);
  double semi2 = 0.0;
  for (const auto& gv : gd.values) semi2 += gv[0] * gv[0];
  semi2 *= m.cell_measure();
  CHECK(monotone_gap(prob, u, v) == doctest::Approx(semi2).epsilon(1e-10));

  // strict positivity on random pairs across exponent ranges
  for (double pv : {1.6, 2.0, 3.1}) {
    const Problem pp = model_problem(m, pv, 4.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const GridFunction a = random_zero_trace(m, rng);
      const GridFunction b = random_zero_trace(m, rng);
      const double gap = monotone_gap(pp, a, b);
      CHECK(gap >= -1e-12);
    }
  }
}

TEST_CASE("energy even for odd reactions and e0 convex") {
  const Mesh m = Mesh::interval(0.0, 1.0, 32);
  const Problem prob = model_problem(m, 2.3, 4.0, 1.0);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const GridFunction u = random_zero_trace(m, rng);
    GridFunction neg = u;
    for (auto& v : neg.values) v = -v;
    CHECK(energy(prob, neg).total == energy(prob, u).total);

    const GridFunction v = random_zero_trace(m, rng);
    GridFunction mid(m);
    for (int i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (u[i] + v[i]);
    CHECK(energy(prob, mid).e0 <=
          0.5 * (energy(prob, u).e0 + energy(prob, v).e0) + 1e-12);
  }
}

TEST_CASE("hessian apply matches finite differences of the gradient") {
  const Mesh m = Mesh::interval(0.0, 1.0, 24);
  const Problem prob = model_problem(m, 2.5, 4.0, 1.0);
  std::mt19937_64 rng(8);
  const GridFunction u = random_zero_trace(m, rng);
  const GridFunction v = random_zero_trace(m, rng);
  const double h = 1e-6;
  GridFunction up = u, um = u;
  for (int i = 0; i < u.size(); ++i) {
    up[i] += h * v[i];
    um[i] -= h * v[i];
  }
  const GridFunction gp = gradient_vector(prob, up);
  const GridFunction gm = gradient_vector(prob, um);
  const GridFunction hv = hessian_apply(prob, u, v);
  for (int i = 0; i < u.size(); ++i) {
    const double fd = (gp[i] - gm[i]) / (2.0 * h);
    CHECK(std::fabs(hv[i] - fd) <= 1e-5 * (1.0 + std::fabs(fd)));
  }
}

TEST_CASE("ps diagnostics") {
  const Mesh m = Mesh::interval(0.0, 1.0, 16);
  const Problem prob = model_problem(m, 2.0, 4.0, 1.0);
  std::mt19937_64 rng(9);
  const GridFunction u = random_zero_trace(m, rng);

  std::vector<TraceEntry> constant_trace(3, TraceEntry{u, 1.0, 1e-12});
  const PsReport a = ps_diagnostics(prob, constant_trace);
  CHECK(a.bounded);
  CHECK(a.last_grad_norm == doctest::Approx(1e-12));
  for (double dm : a.diff_modulars) CHECK(dm == 0.0);

  std::vector<TraceEntry> diverging;
  for (int k = 1; k <= 6; ++k) {
    GridFunction w = u;
    for (auto& val : w.values) val *= std::pow(10.0, k);
    diverging.push_back({w, 0.0, 1.0});
  }
  CHECK_FALSE(ps_diagnostics(prob, diverging).bounded);
}

TEST_CASE("problem rejects mismatched meshes") {
  const Mesh m = Mesh::interval(0.0, 1.0, 16);
  const Mesh other = Mesh::interval(0.0, 1.0, 8);
  const ExponentField p = ExponentField::constant(2.0, m);
  const ExponentField q_other = ExponentField::constant(4.0, other);
  CHECK_THROWS_AS(
      Problem(m, OperatorKernel::px_laplacian(p),
              Reaction::model(GridFunction(other, 1.0), q_other, 1.0, 4.0, 1.0)),
      MeshMismatch);
}
