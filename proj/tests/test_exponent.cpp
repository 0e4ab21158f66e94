#include <cmath>
#include <limits>

#include "doctest.h"
#include "varexp/errors.hpp"
#include "varexp/exponent.hpp"

using namespace varexp;

TEST_CASE("constant field extrema") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  const ExponentField p = ExponentField::constant(2.0, m);
  CHECK(p.p_minus() == 2.0);
  CHECK(p.p_plus() == 2.0);
  for (int i = 0; i < m.node_count(); ++i) CHECK(p.at_node(i) == 2.0);
}

TEST_CASE("linear exponent attains extrema at endpoints") {
  const Mesh m = Mesh::interval(0.0, 1.0, 10);  // 11 nodes
  const ExponentField p = ExponentField::from_expression(Expr::parse("2 + x"), m);
  CHECK(p.p_minus() == doctest::Approx(2.0));
  CHECK(p.p_plus() == doctest::Approx(3.0));
}

TEST_CASE("values at most one rejected") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  CHECK_THROWS_AS(ExponentField::constant(0.5, m), AnyValueAtMostOne);
  CHECK_THROWS_AS(ExponentField::constant(1.0, m), AnyValueAtMostOne);
  CHECK_THROWS_AS(
      ExponentField::from_table({2, 2, 0.5, 2, 2}, m), AnyValueAtMostOne);
  CHECK_THROWS_AS(
      ExponentField::from_table(
          {2, 2, std::numeric_limits<double>::quiet_NaN(), 2, 2}, m),
      NonFinite);
}

TEST_CASE("critical exponent branches") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  const ExponentField p2 = ExponentField::constant(2.0, m);

  const CriticalExponentField inf1 = critical_exponent(p2, 1);
  for (double v : inf1.values) CHECK(std::isinf(v));

  const CriticalExponentField six = critical_exponent(p2, 3);
  for (double v : six.values) CHECK(v == doctest::Approx(6.0));

  const Mesh m10 = Mesh::interval(0.0, 1.0, 10);
  const ExponentField plin = ExponentField::from_expression(Expr::parse("2 + x"), m10);
  const CriticalExponentField ps = critical_exponent(plin, 4);
  for (int i = 0; i < m10.node_count(); ++i) {
    const double x = m10.node(i)[0];
    CHECK(ps.values[static_cast<size_t>(i)] ==
          doctest::Approx(4.0 * (2.0 + x) / (2.0 - x)));
  }
  CHECK(ps.values[0] == doctest::Approx(4.0));
}

TEST_CASE("log-Holder estimate") {
  const Mesh m = Mesh::interval(0.0, 1.0, 10);
  CHECK(log_holder_estimate(ExponentField::constant(2.0, m), m) == 0.0);

  // p = 2 + x: pairs at distance d contribute d*(-log d); on the 0.1 grid the
  // max over d in {0.1,...,0.5} is at d = 0.4
  const ExponentField p = ExponentField::from_expression(Expr::parse("2 + x"), m);
  CHECK(log_holder_estimate(p, m) == doctest::Approx(0.4 * -std::log(0.4)));
}

TEST_CASE("admissibility report") {
  const Mesh m = Mesh::interval(0.0, 1.0, 10);
  const ExponentField p2 = ExponentField::constant(2.0, m);
  const ExponentField q4 = ExponentField::constant(4.0, m);

  const AdmissibilityReport a = check_admissibility(p2, q4, 1);
  CHECK(a.c_plus_ok);
  CHECK(a.growth_gap_ok);
  CHECK(a.subcritical_ok);
  CHECK(a.a5_ok);
  CHECK(a.log_holder_estimate == 0.0);

  const ExponentField qvar =
      ExponentField::from_expression(Expr::parse("4 + 2*x"), m);
  CHECK_FALSE(check_admissibility(p2, qvar, 1).a5_ok);  // 2*(6-4) = 4 >= 2

  const ExponentField p3 = ExponentField::constant(3.0, m);
  const ExponentField q25 = ExponentField::constant(2.5, m);
  CHECK_FALSE(check_admissibility(p3, q25, 1).growth_gap_ok);

  const Mesh other = Mesh::interval(0.0, 1.0, 8);
  CHECK_THROWS_AS(
      check_admissibility(p2, ExponentField::constant(4.0, other), 1),
      MeshMismatch);
}

TEST_CASE("conjugate exponent") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  const ExponentField p = ExponentField::constant(3.0, m);
  const ExponentField pc = p.conjugate();
  for (int i = 0; i < m.node_count(); ++i)
    CHECK(pc.at_node(i) == doctest::Approx(1.5));
}

TEST_CASE("cell exponent is corner average") {
  const Mesh m = Mesh::interval(0.0, 1.0, 4);
  const ExponentField p =
      ExponentField::from_table({2.0, 2.0, 2.0, 3.0, 3.0}, m);
  CHECK(p.at_cell(2) == doctest::Approx(2.5));
}
