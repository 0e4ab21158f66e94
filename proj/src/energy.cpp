#include "varexp/energy.hpp"

#include <cmath>

#include "varexp/errors.hpp"

namespace varexp {

Problem::Problem(const Mesh& m, OperatorKernel k, Reaction r)
    : mesh(m), kernel(std::move(k)), reaction(std::move(r)) {
  if (!kernel.p().mesh().same_as(mesh) || !reaction.q().mesh().same_as(mesh))
    throw MeshMismatch("problem components must share the mesh");
}

namespace {

inline double vec_norm(const std::array<double, 2>& v, int dim) {
  return dim == 1 ? std::fabs(v[0]) : std::sqrt(v[0] * v[0] + v[1] * v[1]);
}

inline double vec_dot(const std::array<double, 2>& a,
                      const std::array<double, 2>& b, int dim) {
  return dim == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1];
}

}  // namespace

EnergyBreakdown energy(const Problem& prob, const GridFunction& u) {
  const Mesh& m = prob.mesh;
  const CellVectorField g = gradient(u);
  EnergyBreakdown out;
  for (int c = 0; c < m.cell_count(); ++c) {
    const Point xc = m.cell_midpoint(c);
    const double px = prob.p().at_cell(c);
    const double mag = vec_norm(g.values[static_cast<size_t>(c)], m.dim());
    out.e0 += prob.kernel.phi(px, xc, mag);
    out.j += prob.reaction.primitive_cell(c, cell_average(u, c));
  }
  out.e0 *= m.cell_measure();
  out.j *= m.cell_measure();
  out.total = out.e0 - out.j;
  return out;
}

double e0_directional(const Problem& prob, const GridFunction& u,
                      const GridFunction& v) {
  const Mesh& m = prob.mesh;
  const CellVectorField gu = gradient(u);
  const CellVectorField gv = gradient(v);
  double sum = 0.0;
  for (int c = 0; c < m.cell_count(); ++c) {
    const size_t cc = static_cast<size_t>(c);
    const double mag = vec_norm(gu.values[cc], m.dim());
    const double a = prob.kernel.eval(prob.p().at_cell(c), m.cell_midpoint(c), mag);
    sum += a * vec_dot(gu.values[cc], gv.values[cc], m.dim());
  }
  return sum * m.cell_measure();
}

double directional_derivative(const Problem& prob, const GridFunction& u,
                              const GridFunction& v) {
  const Mesh& m = prob.mesh;
  double reaction = 0.0;
  for (int c = 0; c < m.cell_count(); ++c)
    reaction += prob.reaction.eval_cell(c, cell_average(u, c)) * cell_average(v, c);
  return e0_directional(prob, u, v) - reaction * m.cell_measure();
}

GridFunction gradient_vector(const Problem& prob, const GridFunction& u) {
  const Mesh& m = prob.mesh;
  GridFunction g(m, 0.0);
  const CellVectorField gu = gradient(u);
  const double meas = m.cell_measure();
  const double corner_w = meas / m.corners_per_cell();
  if (m.dim() == 1) {
    const double inv_h = 1.0 / m.spacing(0);
    for (int c = 0; c < m.cell_count(); ++c) {
      const double gx = gu.values[static_cast<size_t>(c)][0];
      const double a =
          prob.kernel.eval(prob.p().at_cell(c), m.cell_midpoint(c), std::fabs(gx));
      const double flux = a * gx * meas * inv_h;
      const double fr = prob.reaction.eval_cell(c, cell_average(u, c)) * corner_w;
      g[c] += -flux - fr;
      g[c + 1] += flux - fr;
    }
  } else {
    const double cx = 0.5 * meas / m.spacing(0);
    const double cy = 0.5 * meas / m.spacing(1);
    for (int c = 0; c < m.cell_count(); ++c) {
      const auto k = m.cell_corners(c);
      const auto& gc = gu.values[static_cast<size_t>(c)];
      const double a = prob.kernel.eval(prob.p().at_cell(c), m.cell_midpoint(c),
                                        vec_norm(gc, 2));
      const double wx = a * gc[0] * cx;
      const double wy = a * gc[1] * cy;
      const double fr = prob.reaction.eval_cell(c, cell_average(u, c)) * corner_w;
      g[k[0]] += -wx - wy - fr;
      g[k[1]] += wx - wy - fr;
      g[k[2]] += -wx + wy - fr;
      g[k[3]] += wx + wy - fr;
    }
  }
  for (int i = 0; i < g.size(); ++i)
    if (m.is_boundary(i)) g[i] = 0.0;
  return g;
}

void gradient_parts(const Problem& prob, const GridFunction& u,
                    GridFunction& g_e0, GridFunction& g_j) {
  const Mesh& m = prob.mesh;
  g_e0 = GridFunction(m, 0.0);
  g_j = GridFunction(m, 0.0);
  const CellVectorField gu = gradient(u);
  const double meas = m.cell_measure();
  const double corner_w = meas / m.corners_per_cell();
  for (int c = 0; c < m.cell_count(); ++c) {
    const size_t cc = static_cast<size_t>(c);
    const auto& gc = gu.values[cc];
    const double a = prob.kernel.eval(prob.p().at_cell(c), m.cell_midpoint(c),
                                      vec_norm(gc, m.dim()));
    const double fr = prob.reaction.eval_cell(c, cell_average(u, c)) * corner_w;
    const auto k = m.cell_corners(c);
    if (m.dim() == 1) {
      const double flux = a * gc[0] * meas / m.spacing(0);
      g_e0[k[0]] -= flux;
      g_e0[k[1]] += flux;
      g_j[k[0]] += fr;
      g_j[k[1]] += fr;
    } else {
      const double wx = 0.5 * a * gc[0] * meas / m.spacing(0);
      const double wy = 0.5 * a * gc[1] * meas / m.spacing(1);
      g_e0[k[0]] += -wx - wy;
      g_e0[k[1]] += wx - wy;
      g_e0[k[2]] += -wx + wy;
      g_e0[k[3]] += wx + wy;
      for (int j = 0; j < 4; ++j) g_j[k[static_cast<size_t>(j)]] += fr;
    }
  }
  for (int i = 0; i < g_e0.size(); ++i) {
    if (m.is_boundary(i)) {
      g_e0[i] = 0.0;
      g_j[i] = 0.0;
    }
  }
}

double gradient_norm(const Problem& prob, const GridFunction& g) {
  double s = 0.0;
  for (double v : g.values) s += v * v;
  return std::sqrt(s / prob.mesh.cell_measure());
}

double monotone_gap(const Problem& prob, const GridFunction& u,
                    const GridFunction& v) {
  GridFunction d(prob.mesh);
  for (int i = 0; i < d.size(); ++i) d[i] = u[i] - v[i];
  return e0_directional(prob, u, d) - e0_directional(prob, v, d);
}

GridFunction hessian_apply(const Problem& prob, const GridFunction& u,
                           const GridFunction& v) {
  const Mesh& m = prob.mesh;
  GridFunction out(m, 0.0);
  const CellVectorField gu = gradient(u);
  const CellVectorField gv = gradient(v);
  const double meas = m.cell_measure();
  const double corner_w = meas / m.corners_per_cell();
  const int dim = m.dim();
  for (int c = 0; c < m.cell_count(); ++c) {
    const size_t cc = static_cast<size_t>(c);
    const Point xc = m.cell_midpoint(c);
    const double px = prob.p().at_cell(c);
    const auto& g = gu.values[cc];
    const auto& dv = gv.values[cc];
    const double mag = vec_norm(g, dim);
    const double a = prob.kernel.eval(px, xc, mag);
    // d/dv [A(|g|) g] = A dv + A_s(|g|)|g| (ghat.dv) ghat
    std::array<double, 2> w{a * dv[0], a * dv[1]};
    if (mag > kSingularEps) {
      const double coeff =
          prob.kernel.ds(px, xc, mag) / mag * vec_dot(g, dv, dim);
      w[0] += coeff * g[0];
      w[1] += coeff * g[1];
    }
    const double fr =
        prob.reaction.deriv_cell(c, cell_average(u, c)) * cell_average(v, c);
    const auto k = m.cell_corners(c);
    if (dim == 1) {
      const double flux = w[0] * meas / m.spacing(0);
      out[k[0]] += -flux - fr * corner_w;
      out[k[1]] += flux - fr * corner_w;
    } else {
      const double wx = 0.5 * w[0] * meas / m.spacing(0);
      const double wy = 0.5 * w[1] * meas / m.spacing(1);
      out[k[0]] += -wx - wy - fr * corner_w;
      out[k[1]] += wx - wy - fr * corner_w;
      out[k[2]] += -wx + wy - fr * corner_w;
      out[k[3]] += wx + wy - fr * corner_w;
    }
  }
  for (int i = 0; i < out.size(); ++i)
    if (m.is_boundary(i)) out[i] = 0.0;
  return out;
}

PsReport ps_diagnostics(const Problem& prob,
                        const std::vector<TraceEntry>& trace) {
  PsReport rep;
  if (trace.empty()) return rep;
  std::vector<double> norms;
  norms.reserve(trace.size());
  for (const auto& e : trace) {
    const double n = sobolev0_norm(e.u, prob.p());
    norms.push_back(n);
    rep.sup_sobolev_norm = std::max(rep.sup_sobolev_norm, n);
  }
  rep.last_grad_norm = trace.back().grad_norm;
  for (size_t i = 1; i < trace.size(); ++i) {
    const CellVectorField ga = gradient(trace[i - 1].u);
    const CellVectorField gb = gradient(trace[i].u);
    std::vector<double> mags(ga.values.size());
    for (size_t c = 0; c < mags.size(); ++c) {
      const std::array<double, 2> d{gb.values[c][0] - ga.values[c][0],
                                    gb.values[c][1] - ga.values[c][1]};
      mags[c] = vec_norm(d, prob.mesh.dim());
    }
    rep.diff_modulars.push_back(modular_cells(prob.mesh, mags, prob.p()));
  }
  bool strictly_growing = norms.size() > 1;
  for (size_t i = 1; i < norms.size(); ++i)
    if (!(norms[i] > norms[i - 1])) strictly_growing = false;
  rep.bounded = !(strictly_growing && norms.back() > 10.0 * norms.front());
  if (!std::isfinite(rep.sup_sobolev_norm)) rep.bounded = false;
  return rep;
}

}  // namespace varexp
