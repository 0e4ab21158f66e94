#pragma once

#include <vector>

#include "varexp/exponent.hpp"
#include "varexp/mesh.hpp"

namespace varexp {

inline constexpr double kNormTol = 1e-10;      // modular residual at the norm
inline constexpr double kBoundaryTol = 1e-12;  // zero-trace check

struct NormResult {
  double value = 0.0;
  double modular_at_value = 0.0;  // rho(u/value), diagnostic
  int bisection_iterations = 0;
};

// p(x)-modular rho(u) = integral |u|^p(x) dx, midpoint rule with the
// exponent sampled per cell.
double modular(const GridFunction& u, const ExponentField& p);

// Modular of a per-cell scalar field (e.g. one component of a discrete
// gradient).
double modular_cells(const Mesh& mesh, const std::vector<double>& cell_values,
                     const ExponentField& p);

// Luxemburg norm: the unique mu > 0 with rho(u/mu) = 1, by bracketing and
// bisection on the strictly decreasing map mu -> rho(u/mu).  Returns 0 for
// u identically zero.
NormResult luxemburg_norm(const GridFunction& u, const ExponentField& p);
NormResult luxemburg_norm_cells(const Mesh& mesh,
                                const std::vector<double>& cell_values,
                                const ExponentField& p);

// Zero-trace Sobolev norm: sum over axes of the Luxemburg norm of the
// discrete partial derivative.  Throws NonzeroBoundary when boundary values
// exceed kBoundaryTol.
double sobolev0_norm(const GridFunction& u, const ExponentField& p);

struct PairingBound {
  double lhs = 0.0;  // |integral u v dx|
  double rhs = 0.0;  // (1/p- + 1/q-) |u|_p |v|_q with conjugate q
};

PairingBound holder_pairing_bound(const GridFunction& u, const GridFunction& v,
                                  const ExponentField& p);

}  // namespace varexp
