#include "varexp/modular.hpp"

#include <algorithm>
#include <cmath>

#include "varexp/errors.hpp"

namespace varexp {

namespace {

// Quadrature samples of |u| with their exponents; weight is the shared cell
// measure.
struct Samples {
  std::vector<double> abs_values;
  std::vector<double> exponents;
  double weight = 0.0;
};

Samples nodal_samples(const GridFunction& u, const ExponentField& p) {
  Samples s;
  const Mesh& m = u.mesh;
  s.weight = m.cell_measure();
  s.abs_values.resize(static_cast<size_t>(m.cell_count()));
  s.exponents.resize(static_cast<size_t>(m.cell_count()));
  for (int c = 0; c < m.cell_count(); ++c) {
    s.abs_values[static_cast<size_t>(c)] = std::fabs(cell_average(u, c));
    s.exponents[static_cast<size_t>(c)] = p.at_cell(c);
  }
  return s;
}

Samples cell_samples(const Mesh& m, const std::vector<double>& cell_values,
                     const ExponentField& p) {
  Samples s;
  s.weight = m.cell_measure();
  s.abs_values.resize(cell_values.size());
  s.exponents.resize(cell_values.size());
  for (size_t c = 0; c < cell_values.size(); ++c) {
    s.abs_values[c] = std::fabs(cell_values[c]);
    s.exponents[c] = p.at_cell(static_cast<int>(c));
  }
  return s;
}

double modular_of(const Samples& s, double mu) {
  double sum = 0.0;
  for (size_t i = 0; i < s.abs_values.size(); ++i) {
    const double a = s.abs_values[i];
    if (a == 0.0) continue;
    sum += std::pow(a / mu, s.exponents[i]);
  }
  return sum * s.weight;
}

NormResult luxemburg_from_samples(const Samples& s, const ExponentField& p) {
  NormResult r;
  const bool zero = std::all_of(s.abs_values.begin(), s.abs_values.end(),
                                [](double a) { return a == 0.0; });
  if (zero) return r;  // norm 0 by the infimum definition

  const double rho1 = modular_of(s, 1.0);
  double lo = 1.0, hi = 1.0;
  if (std::isfinite(rho1) && rho1 > 0.0) {
    const double e1 = std::pow(rho1, 1.0 / p.p_minus());
    const double e2 = std::pow(rho1, 1.0 / p.p_plus());
    lo = std::min(e1, e2);
    hi = std::max(e1, e2);
  }
  int expand = 0;
  constexpr int kExpandLimit = 1100;  // ~doubling across the double range
  while (!(modular_of(s, lo) >= 1.0)) {
    lo *= 0.5;
    if (++expand > kExpandLimit)
      throw BracketFailure("no lower bracket for the Luxemburg norm");
  }
  while (!(modular_of(s, hi) <= 1.0)) {
    hi *= 2.0;
    if (++expand > kExpandLimit)
      throw BracketFailure("no upper bracket for the Luxemburg norm");
  }

  double mu = 0.5 * (lo + hi);
  double rho = modular_of(s, mu);
  int it = 0;
  constexpr int kMaxIter = 500;
  while (std::fabs(rho - 1.0) > kNormTol && it < kMaxIter) {
    if (rho > 1.0)
      lo = mu;
    else
      hi = mu;
    mu = 0.5 * (lo + hi);
    rho = modular_of(s, mu);
    ++it;
  }
  r.value = mu;
  r.modular_at_value = rho;
  r.bisection_iterations = it;
  return r;
}

}  // namespace

double modular(const GridFunction& u, const ExponentField& p) {
  if (!u.mesh.same_as(p.mesh()))
    throw MeshMismatch("u and p live on different meshes");
  const Samples s = nodal_samples(u, p);
  return modular_of(s, 1.0);
}

double modular_cells(const Mesh& mesh, const std::vector<double>& cell_values,
                     const ExponentField& p) {
  if (static_cast<int>(cell_values.size()) != mesh.cell_count())
    throw MeshMismatch("cell field size does not match cell count");
  return modular_of(cell_samples(mesh, cell_values, p), 1.0);
}

NormResult luxemburg_norm(const GridFunction& u, const ExponentField& p) {
  if (!u.mesh.same_as(p.mesh()))
    throw MeshMismatch("u and p live on different meshes");
  return luxemburg_from_samples(nodal_samples(u, p), p);
}

NormResult luxemburg_norm_cells(const Mesh& mesh,
                                const std::vector<double>& cell_values,
                                const ExponentField& p) {
  return luxemburg_from_samples(cell_samples(mesh, cell_values, p), p);
}

double sobolev0_norm(const GridFunction& u, const ExponentField& p) {
  if (!u.mesh.same_as(p.mesh()))
    throw MeshMismatch("u and p live on different meshes");
  for (int i = 0; i < u.size(); ++i)
    if (u.mesh.is_boundary(i) && std::fabs(u[i]) > kBoundaryTol)
      throw NonzeroBoundary("sobolev0_norm requires zero boundary values");
  const CellVectorField g = gradient(u);
  double sum = 0.0;
  std::vector<double> comp(g.values.size());
  for (int axis = 0; axis < u.mesh.dim(); ++axis) {
    for (size_t c = 0; c < g.values.size(); ++c)
      comp[c] = g.values[c][static_cast<size_t>(axis)];
    sum += luxemburg_norm_cells(u.mesh, comp, p).value;
  }
  return sum;
}

PairingBound holder_pairing_bound(const GridFunction& u, const GridFunction& v,
                                  const ExponentField& p) {
  if (!u.mesh.same_as(v.mesh) || !u.mesh.same_as(p.mesh()))
    throw MeshMismatch("u, v and p must share a mesh");
  const Mesh& m = u.mesh;
  double pairing = 0.0;
  for (int c = 0; c < m.cell_count(); ++c)
    pairing += cell_average(u, c) * cell_average(v, c);
  pairing *= m.cell_measure();

  const ExponentField q = p.conjugate();
  PairingBound b;
  b.lhs = std::fabs(pairing);
  b.rhs = (1.0 / p.p_minus() + 1.0 / q.p_minus()) * luxemburg_norm(u, p).value *
          luxemburg_norm(v, q).value;
  return b;
}

}  // namespace varexp
