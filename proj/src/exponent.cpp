#include "varexp/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varexp/errors.hpp"

namespace varexp {

ExponentField::ExponentField(std::vector<double> nodal, const Mesh& mesh)
    : mesh_(mesh), nodal_(std::move(nodal)) {
  if (static_cast<int>(nodal_.size()) != mesh.node_count())
    throw MeshMismatch("exponent table size does not match node count");
  for (double v : nodal_) {
    if (!std::isfinite(v)) throw NonFinite("non-finite exponent value");
    if (v <= 1.0) throw AnyValueAtMostOne("exponent value <= 1");
  }
  p_minus_ = *std::min_element(nodal_.begin(), nodal_.end());
  p_plus_ = *std::max_element(nodal_.begin(), nodal_.end());
  cell_.resize(static_cast<size_t>(mesh.cell_count()));
  const double inv = 1.0 / mesh.corners_per_cell();
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto k = mesh.cell_corners(c);
    double s = 0.0;
    for (int j = 0; j < mesh.corners_per_cell(); ++j)
      s += nodal_[static_cast<size_t>(k[static_cast<size_t>(j)])];
    cell_[static_cast<size_t>(c)] = s * inv;
  }
}

ExponentField ExponentField::from_expression(const Expr& spec, const Mesh& mesh) {
  std::vector<double> vals(static_cast<size_t>(mesh.node_count()));
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Point x = mesh.node(i);
    vals[static_cast<size_t>(i)] = spec.eval(x[0], x[1]);
  }
  return ExponentField(std::move(vals), mesh);
}

ExponentField ExponentField::from_table(std::vector<double> values,
                                        const Mesh& mesh) {
  return ExponentField(std::move(values), mesh);
}

ExponentField ExponentField::constant(double value, const Mesh& mesh) {
  return ExponentField(
      std::vector<double>(static_cast<size_t>(mesh.node_count()), value), mesh);
}

ExponentField ExponentField::conjugate() const {
  std::vector<double> vals(nodal_.size());
  for (size_t i = 0; i < nodal_.size(); ++i)
    vals[i] = nodal_[i] / (nodal_[i] - 1.0);
  return ExponentField(std::move(vals), mesh_);
}

CriticalExponentField critical_exponent(const ExponentField& p, int N) {
  CriticalExponentField out;
  out.values.resize(p.nodal_values().size());
  const double inf = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < out.values.size(); ++i) {
    const double px = p.nodal_values()[i];
    out.values[i] = px < N ? N * px / (N - px) : inf;
  }
  return out;
}

double log_holder_estimate(const ExponentField& p, const Mesh& mesh) {
  double best = 0.0;
  const int n = mesh.node_count();
  for (int i = 0; i < n; ++i) {
    const Point xi = mesh.node(i);
    const double pi_ = p.at_node(i);
    for (int j = i + 1; j < n; ++j) {
      const Point xj = mesh.node(j);
      const double dx = xi[0] - xj[0];
      const double dy = xi[1] - xj[1];
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d <= 0.0 || d > 0.5) continue;
      best = std::max(best, std::fabs(pi_ - p.at_node(j)) * (-std::log(d)));
    }
  }
  return best;
}

AdmissibilityReport check_admissibility(const ExponentField& p,
                                        const ExponentField& q, int N) {
  if (!p.mesh().same_as(q.mesh()))
    throw MeshMismatch("p and q live on different meshes");
  AdmissibilityReport r;
  r.c_plus_ok = p.p_minus() > 1.0 && q.p_minus() > 1.0;
  r.growth_gap_ok = p.p_plus() < q.p_minus();
  const CriticalExponentField pstar = critical_exponent(p, N);
  r.subcritical_ok = true;
  for (size_t i = 0; i < pstar.values.size(); ++i) {
    if (!(q.nodal_values()[i] < pstar.values[i])) {
      r.subcritical_ok = false;
      break;
    }
  }
  r.a5_ok = 2.0 * (q.p_plus() - q.p_minus()) < p.p_minus();
  r.log_holder_estimate = log_holder_estimate(p, p.mesh());
  return r;
}

}  // namespace varexp
