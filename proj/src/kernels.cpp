#include "varexp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "varexp/errors.hpp"

namespace varexp {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double normalized(double margin, double lhs, double rhs) {
  const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  return margin / scale;
}

constexpr double kMarginTol = 1e-9;

struct WorstTracker {
  double margin = std::numeric_limits<double>::infinity();
  Point x{0.0, 0.0};
  double s = 0.0;
  long samples = 0;

  void observe(double m, const Point& xx, double ss) {
    ++samples;
    if (m < margin) {
      margin = m;
      x = xx;
      s = ss;
    }
  }

  HypothesisCheck finish(const std::string& name) const {
    HypothesisCheck c;
    c.name = name;
    c.status = margin < -kMarginTol ? HypothesisStatus::Violated
                                    : HypothesisStatus::HoldsOnSample;
    c.witness_x = x;
    c.witness_s = s;
    c.margin = margin;
    c.samples = samples;
    return c;
  }
};

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(static_cast<size_t>(count));
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[static_cast<size_t>(i)] =
        std::exp(la + (lb - la) * i / std::max(1, count - 1));
  return out;
}

}  // namespace

OperatorKernel OperatorKernel::px_laplacian(const ExponentField& p) {
  OperatorKernel k(p);
  k.family_ = KernelFamily::PxLaplacian;
  k.a1_ = GridFunction(p.mesh(), 0.0);
  k.a2_ = 1.0 + p.p_plus();
  k.a3_ = std::min(1.0, p.p_minus() - 1.0);
  return k;
}

OperatorKernel OperatorKernel::weighted_px_laplacian(const ExponentField& p) {
  OperatorKernel k = px_laplacian(p);
  k.family_ = KernelFamily::WeightedPxLaplacian;
  return k;
}

OperatorKernel OperatorKernel::px_mean_curvature(const ExponentField& p) {
  OperatorKernel k(p);
  k.family_ = KernelFamily::PxMeanCurvature;
  // A(x,s)s <= (1+s^2)^{(p-1)/2} <= 2^{(p-1)/2}(1 + s^{p-1}), so the zero
  // field is not an admissible a1 here.
  const double c = std::pow(2.0, 0.5 * (p.p_plus() - 1.0));
  k.a1_ = GridFunction(p.mesh(), c);
  k.a2_ = std::max(1.0 + p.p_plus(), c);
  k.a3_ = std::min(1.0, p.p_minus() - 1.0) *
          std::pow(2.0, 0.5 * (std::min(p.p_minus(), 2.0) - 4.0));
  return k;
}

OperatorKernel OperatorKernel::custom(const ExponentField& p, PointEval a,
                                      PointEval ds_a, GridFunction a1,
                                      double a2, double a3) {
  OperatorKernel k(p);
  k.family_ = KernelFamily::Custom;
  k.custom_a_ = std::move(a);
  k.custom_ds_ = std::move(ds_a);
  k.a1_ = std::move(a1);
  k.a2_ = a2;
  k.a3_ = a3;
  return k;
}

double OperatorKernel::eval(double px, const Point& x, double s,
                            bool* singular) const {
  if (singular) *singular = false;
  switch (family_) {
    case KernelFamily::PxLaplacian:
    case KernelFamily::WeightedPxLaplacian: {
      double sr = s;
      if (px < 2.0 && s < kSingularEps) {
        sr = kSingularEps;
        if (singular) *singular = true;
      }
      const double a = std::pow(sr, px - 2.0);
      return family_ == KernelFamily::PxLaplacian ? a : px * a;
    }
    case KernelFamily::PxMeanCurvature:
      return std::pow(1.0 + s * s, 0.5 * (px - 2.0));
    case KernelFamily::Custom:
      return custom_a_(x, s);
  }
  return 0.0;
}

double OperatorKernel::ds(double px, const Point& x, double s) const {
  switch (family_) {
    case KernelFamily::PxLaplacian: {
      const double sr = std::max(s, kSingularEps);
      return (px - 2.0) * std::pow(sr, px - 3.0);
    }
    case KernelFamily::WeightedPxLaplacian: {
      const double sr = std::max(s, kSingularEps);
      return px * (px - 2.0) * std::pow(sr, px - 3.0);
    }
    case KernelFamily::PxMeanCurvature:
      return (px - 2.0) * s * std::pow(1.0 + s * s, 0.5 * (px - 4.0));
    case KernelFamily::Custom: {
      if (custom_ds_) return custom_ds_(x, s);
      // central-difference fallback; accuracy limited to ~1e-6 relative
      const double h = 1e-6 * std::max(1.0, s);
      const double lo = std::max(0.0, s - h);
      return (custom_a_(x, s + h) - custom_a_(x, lo)) / (s + h - lo);
    }
  }
  return 0.0;
}

double OperatorKernel::phi(double px, const Point& x, double t) const {
  switch (family_) {
    case KernelFamily::PxLaplacian:
      return std::pow(t, px) / px;
    case KernelFamily::WeightedPxLaplacian:
      return std::pow(t, px);
    case KernelFamily::PxMeanCurvature:
      return (std::pow(1.0 + t * t, 0.5 * px) - 1.0) / px;
    case KernelFamily::Custom:
      return integrate_adaptive(
          [&](double s) { return s * custom_a_(x, s); }, 0.0, t, 1e-10);
  }
  return 0.0;
}

SimonGap simon_gap(const OperatorKernel& k, double px, const Point& x,
                   const Vec& xi, const Vec& zeta, int dim) {
  const auto norm = [dim](const Vec& v) {
    return dim == 1 ? std::fabs(v[0]) : std::sqrt(v[0] * v[0] + v[1] * v[1]);
  };
  const double nxi = norm(xi), nzeta = norm(zeta);
  if (nxi == 0.0 && nzeta == 0.0)
    throw BothZero("simon_gap requires (xi, zeta) != (0, 0)");
  const double axi = nxi > 0.0 ? k.eval(px, x, nxi) : 0.0;
  const double azeta = nzeta > 0.0 ? k.eval(px, x, nzeta) : 0.0;
  SimonGap out;
  for (int i = 0; i < dim; ++i) {
    const size_t j = static_cast<size_t>(i);
    out.gap += (axi * xi[j] - azeta * zeta[j]) * (xi[j] - zeta[j]);
  }
  Vec d{xi[0] - zeta[0], xi[1] - zeta[1]};
  const double nd = norm(d);
  if (px >= 2.0)
    out.bound = std::pow(nd, px);
  else
    out.bound = nd * nd * std::min(1.0, std::pow(nxi + nzeta, px - 2.0));
  return out;
}

Reaction Reaction::model(GridFunction c, const ExponentField& q,
                         double growth_C, double mu, double R) {
  Reaction r(q);
  if (!c.mesh.same_as(q.mesh()))
    throw MeshMismatch("reaction coefficient and q live on different meshes");
  r.c_ = std::move(c);
  r.c_cell_.resize(static_cast<size_t>(q.mesh().cell_count()));
  for (int cell = 0; cell < q.mesh().cell_count(); ++cell)
    r.c_cell_[static_cast<size_t>(cell)] = cell_average(r.c_, cell);
  r.growth_C_ = growth_C;
  r.mu_ = mu;
  r.R_ = R;
  r.odd_ = true;  // |t|^{q-2} t is odd by construction
  return r;
}

Reaction Reaction::custom(PointEval f, PointEval big_f, const ExponentField& q,
                          double growth_C, double mu, double R, bool odd) {
  Reaction r(q);
  r.custom_f_ = std::move(f);
  r.custom_F_ = std::move(big_f);
  r.growth_C_ = growth_C;
  r.mu_ = mu;
  r.R_ = R;
  r.odd_ = odd;
  return r;
}

namespace {
inline double power_f(double c, double qx, double t) {
  if (t == 0.0) return 0.0;
  const double a = std::fabs(t);
  return c * std::pow(a, qx - 1.0) * (t > 0.0 ? 1.0 : -1.0);
}
inline double power_F(double c, double qx, double t) {
  if (t == 0.0) return 0.0;
  return c * std::pow(std::fabs(t), qx) / qx;
}
}  // namespace

double Reaction::eval_cell(int cell, double t) const {
  if (custom_f_) return custom_f_(q_.mesh().cell_midpoint(cell), t);
  return power_f(c_cell_[static_cast<size_t>(cell)], q_.at_cell(cell), t);
}

double Reaction::primitive_cell(int cell, double t) const {
  if (custom_F_) return custom_F_(q_.mesh().cell_midpoint(cell), t);
  return power_F(c_cell_[static_cast<size_t>(cell)], q_.at_cell(cell), t);
}

double Reaction::deriv_cell(int cell, double t) const {
  if (custom_f_) {
    const double h = 1e-6 * std::max(1.0, std::fabs(t));
    const Point x = q_.mesh().cell_midpoint(cell);
    return (custom_f_(x, t + h) - custom_f_(x, t - h)) / (2.0 * h);
  }
  const double qx = q_.at_cell(cell);
  const double a = std::max(std::fabs(t), kSingularEps);
  return c_cell_[static_cast<size_t>(cell)] * (qx - 1.0) * std::pow(a, qx - 2.0);
}

double Reaction::eval_node(int node, double t) const {
  if (custom_f_) return custom_f_(q_.mesh().node(node), t);
  return power_f(c_[node], q_.at_node(node), t);
}

double Reaction::primitive_node(int node, double t) const {
  if (custom_F_) return custom_F_(q_.mesh().node(node), t);
  return power_F(c_[node], q_.at_node(node), t);
}

Reaction Reaction::scaled(double factor) const {
  Reaction r = *this;
  if (custom_f_) {
    auto f = custom_f_;
    auto F = custom_F_;
    r.custom_f_ = [f, factor](const Point& x, double t) { return factor * f(x, t); };
    r.custom_F_ = [F, factor](const Point& x, double t) { return factor * F(x, t); };
  } else {
    for (auto& v : r.c_.values) v *= factor;
    for (auto& v : r.c_cell_) v *= factor;
  }
  r.growth_C_ *= factor;
  return r;
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool HypothesisReport::all_hold() const {
  for (const auto& c : checks)
    if (c.status == HypothesisStatus::Violated) return false;
  return true;
}

HypothesisReport verify_kernel_hypotheses(const OperatorKernel& k,
                                          const SamplingPlan& plan) {
  const Mesh& mesh = k.p().mesh();
  const auto svals = log_spaced(plan.s_min, plan.s_max, plan.s_count);
  WorstTracker a2, a3, a4;
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Point x = mesh.node(i);
    const double px = k.p().at_node(i);
    const double a1x = k.a1()[i];
    for (double s : svals) {
      const double a = k.eval(px, x, s);
      // (A2): |A(x,s)s| <= a1(x) + a2 s^{p-1}
      {
        const double lhs = std::fabs(a * s);
        const double rhs = a1x + k.a2() * std::pow(s, px - 1.0);
        a2.observe(normalized(rhs - lhs, lhs, rhs), x, s);
      }
      // (A3): min{A, A + s dA/ds} >= a3 min{1, s^{p-2}}
      {
        const double lhs = std::min(a, a + s * k.ds(px, x, s));
        const double rhs = k.a3() * std::min(1.0, std::pow(s, px - 2.0));
        a3.observe(normalized(lhs - rhs, lhs, rhs), x, s);
      }
      // (A4): t^2 A(x,t) <= p+ Phi(x,t)
      {
        const double lhs = s * s * a;
        const double rhs = k.p().p_plus() * k.phi(px, x, s);
        a4.observe(normalized(rhs - lhs, lhs, rhs), x, s);
      }
    }
  }
  HypothesisReport rep;
  rep.checks.push_back(a2.finish("A2"));
  rep.checks.push_back(a3.finish("A3"));
  rep.checks.push_back(a4.finish("A4"));
  return rep;
}

HypothesisReport verify_reaction_hypotheses(const Reaction& r,
                                            const ExponentField& p,
                                            const SamplingPlan& plan) {
  const Mesh& mesh = r.q().mesh();
  const auto tvals = log_spaced(plan.t_near_zero, plan.t_max, plan.t_count);
  WorstTracker f1, f2, f4;
  double max_abs_f = 0.0;
  double near_zero_ratio = 0.0;
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Point x = mesh.node(i);
    const double qx = r.q().at_node(i);
    for (double ta : tvals) {
      for (double t : {ta, -ta}) {
        const double f = r.eval_node(i, t);
        max_abs_f = std::max(max_abs_f, std::fabs(f));
        // (f1): |f| <= C |t|^{q(x)-1}
        {
          const double rhs = r.growth_C() * std::pow(std::fabs(t), qx - 1.0);
          f1.observe(normalized(rhs - std::fabs(f), std::fabs(f), rhs), x, t);
        }
        // (f4): t f(x,t) >= 0
        f4.observe(normalized(t * f, t * f, 0.0), x, t);
        // (f2): 0 < mu F <= t f for t >= R
        if (std::fabs(t) >= r.R()) {
          const double F = r.primitive_node(i, t);
          double m = normalized(t * f - r.mu() * F, t * f, r.mu() * F);
          if (!(F > 0.0)) m = std::min(m, -1.0);  // positivity of F fails
          f2.observe(m, x, t);
        }
      }
    }
    // (f3) decay diagnostic at the smallest sampled |t|
    const double t0 = plan.t_near_zero;
    near_zero_ratio =
        std::max(near_zero_ratio, std::fabs(r.eval_node(i, t0)) /
                                      std::pow(t0, p.p_plus() - 1.0));
  }
  HypothesisReport rep;
  rep.checks.push_back(f1.finish("f1"));
  rep.checks.push_back(f2.finish("f2"));
  {
    HypothesisCheck f3;
    f3.name = "f3";
    f3.margin = 1e-3 - near_zero_ratio;  // ratio itself is the diagnostic
    f3.witness_s = plan.t_near_zero;
    f3.samples = mesh.node_count();
    f3.status = near_zero_ratio < 1e-3 ? HypothesisStatus::HoldsOnSample
                                       : HypothesisStatus::Violated;
    rep.checks.push_back(f3);
  }
  {
    HypothesisCheck c = f4.finish("f4");
    if (max_abs_f == 0.0) {
      c.status = HypothesisStatus::Violated;
      c.margin = -1.0;  // f identically zero on the sample
    }
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace varexp
