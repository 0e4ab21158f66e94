#pragma once

#include <vector>

#include "varexp/kernels.hpp"
#include "varexp/mesh.hpp"
#include "varexp/modular.hpp"

namespace varexp {

// The discrete variational problem: operator kernel, reaction, shared mesh.
struct Problem {
  Mesh mesh;
  OperatorKernel kernel;
  Reaction reaction;

  Problem(const Mesh& m, OperatorKernel k, Reaction r);

  const ExponentField& p() const { return kernel.p(); }
  const ExponentField& q() const { return reaction.q(); }
};

struct EnergyBreakdown {
  double e0 = 0.0;    // operator part I(u)
  double j = 0.0;     // reaction part J(u)
  double total = 0.0; // e0 - j
};

// E(u) = sum_cells Phi(x_c, |grad u|_c) meas - sum_cells F(x_c, u_c) meas,
// u_c the cell average of the nodal values.
EnergyBreakdown energy(const Problem& prob, const GridFunction& u);

// Exact derivative of the discrete energy in direction v.
double directional_derivative(const Problem& prob, const GridFunction& u,
                              const GridFunction& v);
// Operator part only (derivative of e0).
double e0_directional(const Problem& prob, const GridFunction& u,
                      const GridFunction& v);

// Assembled nodal gradient: g_i = dE/du_i for interior nodes, 0 on the
// boundary.  One sweep over cells, identical to per-node directional
// derivatives against nodal hats.
GridFunction gradient_vector(const Problem& prob, const GridFunction& u);

// Discrete L2 surrogate of the dual norm: ||g||_2 / sqrt(cell measure).
double gradient_norm(const Problem& prob, const GridFunction& g);

// Operator and reaction parts of the assembled gradient separately;
// gradient_vector(u) = g_e0 - g_j.
void gradient_parts(const Problem& prob, const GridFunction& u,
                    GridFunction& g_e0, GridFunction& g_j);

// (E0'(u) - E0'(v))(u - v); nonnegative by strict monotonicity.
double monotone_gap(const Problem& prob, const GridFunction& u,
                    const GridFunction& v);

// Exact second-derivative product (dE0' + dJ') applied to direction v; uses
// only A, dA/ds and the reaction slope.  Never assembled as a matrix.
GridFunction hessian_apply(const Problem& prob, const GridFunction& u,
                           const GridFunction& v);

struct TraceEntry {
  GridFunction u;
  double energy = 0.0;
  double grad_norm = 0.0;
};

struct PsReport {
  double sup_sobolev_norm = 0.0;
  double last_grad_norm = 0.0;
  // Modulars of successive gradient differences int |grad u_n - grad u_{n-1}|^p.
  std::vector<double> diff_modulars;
  bool bounded = true;
};

PsReport ps_diagnostics(const Problem& prob,
                        const std::vector<TraceEntry>& trace);

}  // namespace varexp
