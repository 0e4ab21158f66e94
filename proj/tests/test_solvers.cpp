#include <cmath>
#include <random>

#include "doctest.h"
#include "varexp/errors.hpp"
#include "varexp/solvers.hpp"

using namespace varexp;

namespace {

constexpr double kPi = 3.14159265358979323846;

// -u'' = u^3 shooting-oracle values (RK4 + bisection, frozen):
// peak amplitude and energy of the 1-bump solution on (0,1).
constexpr double kBumpPeak = 3.7081493546;
constexpr double kBumpEnergy = 15.7560600108;

Problem model_problem(const Mesh& m, double pv, double qv, double cv = 1.0) {
  const ExponentField p = ExponentField::constant(pv, m);
  const ExponentField q = ExponentField::constant(qv, m);
  return Problem(m, OperatorKernel::px_laplacian(p),
                 Reaction::model(GridFunction(m, cv), q, std::max(cv, 1.0),
                                 qv, 1.0));
}

GridFunction sine_bump(const Mesh& m) {
  GridFunction u(m);
  for (int i = 0; i < u.size(); ++i) u[i] = std::sin(kPi * m.node(i)[0]);
  return enforce_zero_trace(u);
}

}  // namespace

TEST_CASE("mountain pass geometry on the model problem") {
  const Mesh m = Mesh::interval(0.0, 1.0, 64);
  const Problem prob = model_problem(m, 2.0, 4.0);
  const SolverConfig cfg = SolverConfig::defaults(m);
  const MPGeometry geom = verify_mp_geometry(prob, sine_bump(m), cfg);
  CHECK(geom.rho > 0.0);
  CHECK(geom.r > 0.0);
  CHECK(energy(prob, geom.e).total < 0.0);
  // closed-form zero of E(t phi): t = sqrt(8 pi^2 / 3) ~ 5.1302
  CHECK(geom.t_star >= 5.1302 * 0.99);
}

TEST_CASE("no valley when the reaction vanishes") {
  const Mesh m = Mesh::interval(0.0, 1.0, 32);
  const Problem prob = model_problem(m, 2.0, 4.0, 0.0);
  const SolverConfig cfg = SolverConfig::defaults(m);
  CHECK_THROWS_AS(verify_mp_geometry(prob, sine_bump(m), cfg), NoValley);
}

TEST_CASE("mountain pass solve reproduces the 1-bump solution") {
  const Mesh m = Mesh::interval(0.0, 1.0, 64);
  const Problem prob = model_problem(m, 2.0, 4.0);
  const SolverConfig cfg = SolverConfig::defaults(m);
  const MPGeometry geom = verify_mp_geometry(prob, sine_bump(m), cfg);
  const SolveReport rep = mountain_pass_solve(prob, geom, cfg);

  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.grad_norm <= cfg.grad_tol);
  CHECK(rep.energy.total >= geom.rho - 10.0 * cfg.grad_tol);
  double peak = 0.0;
  for (double v : rep.solution.values) peak = std::max(peak, std::fabs(v));
  CHECK(peak == doctest::Approx(kBumpPeak).epsilon(3e-3));
  CHECK(rep.energy.total == doctest::Approx(kBumpEnergy).epsilon(3e-3));
  CHECK(sign_changes(rep.solution) == 0);

  // weak-form residual check against random test fields
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction v(m);
    for (int i = 0; i < v.size(); ++i)
      if (!m.is_boundary(i)) v[i] = uni(rng);
    const double dd = directional_derivative(prob, rep.solution, v);
    CHECK(std::fabs(dd) <= cfg.grad_tol * sobolev0_norm(v, prob.p()) * 10.0);
  }
}

TEST_CASE("subspace ladder matches the sine basis") {
  const Mesh m = Mesh::interval(0.0, 1.0, 64);
  const Problem prob = model_problem(m, 2.0, 4.0);
  const SolverConfig cfg = SolverConfig::defaults(m);
  const SubspaceLadder ladder = build_subspace_ladder(prob, 3, cfg);
  REQUIRE(ladder.basis.size() == 3);

  const double h = m.spacing(0);
  for (int k = 1; k <= 3; ++k) {
    // discrete Dirichlet Laplacian eigenvalue (4/h^2) sin^2(k pi h / 2) / h...
    // our stiffness is (1/h) tridiag(-1,2,-1), so lambda = (4/h) sin^2(k pi h/2) / h
    const double expected = 4.0 / (h * h) * std::pow(std::sin(k * kPi * h / 2.0), 2);
    CHECK(ladder.eigenvalues[static_cast<size_t>(k - 1)] ==
          doctest::Approx(expected * h).epsilon(1e-10));

    // eigenvector shape: correlation with sin(k pi x) is +-1
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int i = 0; i < m.node_count(); ++i) {
      const double s = std::sin(k * kPi * m.node(i)[0]);
      const double b = ladder.basis[static_cast<size_t>(k - 1)][i];
      dot += s * b;
      na += s * s;
      nb += b * b;
    }
    CHECK(std::fabs(dot) / std::sqrt(na * nb) == doctest::Approx(1.0).epsilon(1e-10));
  }

  CHECK(ladder.alpha[0] >= ladder.alpha[2] - 1e-6);
  CHECK_THROWS_AS(build_subspace_ladder(prob, m.interior_count() + 1, cfg),
                  LadderTooLarge);
}

TEST_CASE("fountain search finds the n-bump family") {
  const Mesh m = Mesh::interval(0.0, 1.0, 64);
  const Problem prob = model_problem(m, 2.0, 4.0);
  SolverConfig cfg = SolverConfig::defaults(m);
  const SubspaceLadder ladder = build_subspace_ladder(prob, 4, cfg);
  const FountainResult res = fountain_search(prob, ladder, cfg);

  REQUIRE(res.solutions.size() >= 3);
  for (size_t k = 0; k + 1 < res.solutions.size(); ++k)
    CHECK(res.solutions[k].energy.total < res.solutions[k + 1].energy.total);
  for (size_t k = 0; k < 3; ++k) {
    CHECK(sign_changes(res.solutions[k].solution) == static_cast<int>(k));
    CHECK(res.solutions[k].grad_norm <= cfg.grad_tol);
    // n-bump scaling: E_n = n^4 E_1 for -u'' = u^3
    const double n = static_cast<double>(k + 1);
    CHECK(res.solutions[k].energy.total ==
          doctest::Approx(n * n * n * n * kBumpEnergy).epsilon(5e-2));
  }

  // odd symmetry: -u is a critical point at the same level
  GridFunction neg = res.solutions[0].solution;
  for (auto& v : neg.values) v = -v;
  CHECK(energy(prob, neg).total == res.solutions[0].energy.total);
  CHECK(gradient_norm(prob, gradient_vector(prob, neg)) <=
        res.solutions[0].grad_norm * (1.0 + 1e-12));
}

TEST_CASE("fountain search requires an odd reaction") {
  const Mesh m = Mesh::interval(0.0, 1.0, 32);
  const ExponentField p = ExponentField::constant(2.0, m);
  const ExponentField q = ExponentField::constant(4.0, m);
  const Reaction even = Reaction::custom(
      [](const Point&, double t) { return t * t; },
      [](const Point&, double t) { return t * t * t / 3.0; }, q, 1.0, 3.0, 1.0,
      /*odd=*/false);
  const Problem prob(m, OperatorKernel::px_laplacian(p), even);
  const SolverConfig cfg = SolverConfig::defaults(m);
  const SubspaceLadder ladder = build_subspace_ladder(prob, 2, cfg);
  CHECK_THROWS_AS(fountain_search(prob, ladder, cfg), OddnessRequired);
}

TEST_CASE("rayleigh quotient") {
  const Mesh m = Mesh::interval(0.0, 1.0, 256);
  const Problem validation = model_problem(m, 2.0, 2.0);  // F = u^2/2
  CHECK(rayleigh_quotient(validation, sine_bump(m)) ==
        doctest::Approx(kPi * kPi).epsilon(1e-3));

  // homogeneity for constant exponents: Q(tu) = t^{p-q} Q(u)
  const Problem pq = model_problem(m, 2.0, 4.0);
  GridFunction u = sine_bump(m);
  GridFunction u3 = u;
  for (auto& v : u3.values) v *= 3.0;
  CHECK(rayleigh_quotient(pq, u3) ==
        doctest::Approx(rayleigh_quotient(pq, u) / 9.0).epsilon(1e-12));

  CHECK_THROWS_AS(rayleigh_quotient(pq, GridFunction(m, 0.0)), ZeroDenominator);
}

TEST_CASE("lambda1 validation mode converges to pi^2") {
  const Mesh m = Mesh::interval(0.0, 1.0, 256);
  const Problem prob = model_problem(m, 2.0, 2.0);
  SolverConfig cfg = SolverConfig::defaults(m);
  cfg.scale_count = 7;  // validation quotient is scale-invariant
  const Lambda1Result res = lambda1_minimize(prob, cfg);
  CHECK(res.lambda1_est == doctest::Approx(kPi * kPi).epsilon(1e-2));
  CHECK_FALSE(res.degenerate);
  REQUIRE(res.minimizer.has_value());
  CHECK(res.lambda1_est <= rayleigh_quotient(prob, *res.minimizer) * (1.0 + 1e-9));
}

TEST_CASE("lambda1 degeneracy for constant exponents with q > p") {
  const Mesh m = Mesh::interval(0.0, 1.0, 64);
  const Problem prob = model_problem(m, 2.0, 4.0);
  SolverConfig cfg = SolverConfig::defaults(m);
  const Lambda1Result res = lambda1_minimize(prob, cfg);
  CHECK(res.degenerate);
  // quotient ~ t^{-2} along the sweep
  REQUIRE(res.sweep.size() >= 3);
  for (size_t i = 1; i < res.sweep.size(); ++i) {
    const double slope =
        (std::log(res.sweep[i].second) - std::log(res.sweep[i - 1].second)) /
        (std::log(res.sweep[i].first) - std::log(res.sweep[i - 1].first));
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.05));
  }
}

TEST_CASE("reaction scaling halves the quotient") {
  const Mesh m = Mesh::interval(0.0, 1.0, 64);
  const Problem prob = model_problem(m, 2.0, 2.0);
  const Problem doubled = with_reaction_scaled(prob, 2.0);
  const GridFunction u = sine_bump(m);
  CHECK(rayleigh_quotient(doubled, u) ==
        doctest::Approx(rayleigh_quotient(prob, u) / 2.0).epsilon(1e-12));
}

TEST_CASE("global minimization statuses") {
  const Mesh m = Mesh::interval(0.0, 1.0, 64);
  const SolverConfig cfg = SolverConfig::defaults(m);
  const Problem validation = model_problem(m, 2.0, 2.0);

  // lambda below lambda1 ~ pi^2: only the zero state
  const SolveReport lo = global_minimize_at_lambda(validation, 5.0, cfg);
  CHECK(lo.status == SolveStatus::DegenerateZero);

  // lambda = 1.5 pi^2: quadratic energy unbounded below
  const SolveReport hi = global_minimize_at_lambda(validation, 1.5 * kPi * kPi, cfg);
  CHECK(hi.status == SolveStatus::DivergedToMinusInfinity);

  // constant-exponent model: coercivity fails for every lambda > 0
  const Problem pq = model_problem(m, 2.0, 4.0);
  const SolveReport quart = global_minimize_at_lambda(pq, 1.0, cfg);
  CHECK(quart.status == SolveStatus::DivergedToMinusInfinity);
}

TEST_CASE("sign changes") {
  const Mesh m = Mesh::interval(0.0, 1.0, 10);
  GridFunction u(m, 0.0);
  CHECK(sign_changes(u) == 0);
  for (int i = 0; i < u.size(); ++i)
    u[i] = std::sin(3.0 * kPi * m.node(i)[0]);
  CHECK(sign_changes(u) == 2);
  for (int i = 0; i < u.size(); ++i) u[i] = i < 5 ? 1.0 : -1.0;
  CHECK(sign_changes(u) == 1);
}
