#pragma once

#include <vector>

#include "varexp/expr.hpp"
#include "varexp/mesh.hpp"

namespace varexp {

// Variable exponent p(.) sampled at mesh nodes.  Every value must exceed 1
// (membership in C+); extrema are maintained on construction and the data is
// immutable afterwards.
class ExponentField {
 public:
  static ExponentField from_expression(const Expr& spec, const Mesh& mesh);
  static ExponentField from_table(std::vector<double> values, const Mesh& mesh);
  static ExponentField constant(double value, const Mesh& mesh);

  const Mesh& mesh() const { return mesh_; }
  double at_node(int i) const { return nodal_[static_cast<size_t>(i)]; }
  // Exponent used for cell quadrature: mean of the cell corner values.
  double at_cell(int c) const { return cell_[static_cast<size_t>(c)]; }
  const std::vector<double>& nodal_values() const { return nodal_; }

  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }

  // Pointwise conjugate exponent p(x)/(p(x)-1).
  ExponentField conjugate() const;

 private:
  ExponentField(std::vector<double> nodal, const Mesh& mesh);
  Mesh mesh_;
  std::vector<double> nodal_;
  std::vector<double> cell_;
  double p_minus_ = 0.0;
  double p_plus_ = 0.0;
};

// Critical Sobolev exponent p*(x): Np(x)/(N-p(x)) where p(x) < N, +infinity
// where p(x) >= N (explicit sentinel, so subcritical checks are exact).
struct CriticalExponentField {
  std::vector<double> values;  // +inf entries are the sentinel
};

CriticalExponentField critical_exponent(const ExponentField& p, int N);

// Finite-sample log-Holder modulus: max over node pairs with
// 0 < |x-y| <= 1/2 of |p(x)-p(y)| * (-log|x-y|).  Diagnostic only.
double log_holder_estimate(const ExponentField& p, const Mesh& mesh);

struct AdmissibilityReport {
  bool c_plus_ok = false;
  bool growth_gap_ok = false;   // p+ < q-
  bool subcritical_ok = false;  // q(x) < p*(x) at every node
  bool a5_ok = false;           // 2 (q+ - q-) < p-
  double log_holder_estimate = 0.0;
};

AdmissibilityReport check_admissibility(const ExponentField& p,
                                        const ExponentField& q, int N);

}  // namespace varexp
