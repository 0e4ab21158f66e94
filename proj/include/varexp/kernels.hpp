#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varexp/exponent.hpp"
#include "varexp/mesh.hpp"

namespace varexp {

// Pointwise kernel evaluation is regularized at the origin in the singular
// range p(x) < 2; the potential closed forms are exact and need none.
inline constexpr double kSingularEps = 1e-12;

using Vec = std::array<double, 2>;

enum class KernelFamily { PxLaplacian, WeightedPxLaplacian, PxMeanCurvature, Custom };

// The operator kernel A(x,s) with its potential Phi(x,t) = int_0^t s A(x,s) ds
// and the structure constants a1, a2, a3 of the growth and ellipticity
// hypotheses.
class OperatorKernel {
 public:
  using PointEval = std::function<double(const Point&, double)>;

  static OperatorKernel px_laplacian(const ExponentField& p);
  static OperatorKernel weighted_px_laplacian(const ExponentField& p);
  static OperatorKernel px_mean_curvature(const ExponentField& p);
  // Custom kernels must supply a1, a2, a3; ds_a may be empty, in which case a
  // central-difference fallback (h = 1e-6 * max(1, s)) is used.
  static OperatorKernel custom(const ExponentField& p, PointEval a,
                               PointEval ds_a, GridFunction a1, double a2,
                               double a3);

  KernelFamily family() const { return family_; }
  const ExponentField& p() const { return p_; }
  const GridFunction& a1() const { return a1_; }
  double a2() const { return a2_; }
  double a3() const { return a3_; }

  // A(x,s).  px is the locally sampled exponent; `singular` is set when the
  // regularized branch was taken.
  double eval(double px, const Point& x, double s, bool* singular = nullptr) const;
  double ds(double px, const Point& x, double s) const;
  // Phi(x,t); closed form for the named families, adaptive quadrature for
  // custom kernels (tolerance 1e-10).
  double phi(double px, const Point& x, double t) const;

 private:
  KernelFamily family_ = KernelFamily::PxLaplacian;
  ExponentField p_;
  PointEval custom_a_, custom_ds_;
  GridFunction a1_;
  double a2_ = 1.0;
  double a3_ = 1.0;

  explicit OperatorKernel(const ExponentField& p) : p_(p) {}
};

// Simon-type gap inequality (degenerate branch for p(x) >= 2, singular branch
// for p(x) < 2).  gap = (A(x,|xi|)xi - A(x,|zeta|)zeta) . (xi - zeta).
struct SimonGap {
  double gap = 0.0;
  double bound = 0.0;
};

SimonGap simon_gap(const OperatorKernel& k, double px, const Point& x,
                   const Vec& xi, const Vec& zeta, int dim);

// Model reaction family f(x,t) = c(x)|t|^{q(x)-2} t with primitive
// F(x,t) = c(x)|t|^{q(x)}/q(x); custom hooks may replace both.
class Reaction {
 public:
  using PointEval = std::function<double(const Point&, double)>;

  static Reaction model(GridFunction c, const ExponentField& q, double growth_C,
                        double mu, double R);
  static Reaction custom(PointEval f, PointEval big_f, const ExponentField& q,
                         double growth_C, double mu, double R, bool odd);

  const ExponentField& q() const { return q_; }
  double growth_C() const { return growth_C_; }
  double mu() const { return mu_; }
  double R() const { return R_; }
  bool odd() const { return odd_; }
  bool is_model() const { return !custom_f_; }
  const GridFunction& c() const { return c_; }

  double eval_cell(int cell, double t) const;
  double primitive_cell(int cell, double t) const;
  double deriv_cell(int cell, double t) const;  // d f / d t
  double eval_node(int node, double t) const;
  double primitive_node(int node, double t) const;

  // The reaction multiplied by a constant factor (lambda f).
  Reaction scaled(double factor) const;

 private:
  explicit Reaction(const ExponentField& q) : q_(q) {}
  GridFunction c_;
  std::vector<double> c_cell_;
  ExponentField q_;
  PointEval custom_f_, custom_F_;
  double growth_C_ = 1.0;
  double mu_ = 0.0;
  double R_ = 1.0;
  bool odd_ = true;
};

enum class HypothesisStatus { HoldsOnSample, Violated, NotApplicable };

struct HypothesisCheck {
  std::string name;
  HypothesisStatus status = HypothesisStatus::NotApplicable;
  Point witness_x{0.0, 0.0};
  double witness_s = 0.0;  // s or t of the worst sample
  double margin = 0.0;     // worst (minimal) margin; negative when violated
  long samples = 0;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  const HypothesisCheck* find(const std::string& name) const;
  bool all_hold() const;
};

struct SamplingPlan {
  int s_count = 64;        // log-spaced kernel arguments
  double s_min = 1e-12;
  double s_max = 1e3;
  int t_count = 64;        // reaction arguments per regime
  double t_max = 1e3;
  double t_near_zero = 1e-6;
};

HypothesisReport verify_kernel_hypotheses(const OperatorKernel& k,
                                          const SamplingPlan& plan);
HypothesisReport verify_reaction_hypotheses(const Reaction& r,
                                            const ExponentField& p,
                                            const SamplingPlan& plan);

}  // namespace varexp
