#include "varexp/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "varexp/errors.hpp"

namespace varexp {

namespace {

using State = std::vector<double>;

double dot(const State& a, const State& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const State& a) { return std::sqrt(dot(a, a)); }

State axpy(const State& x, double alpha, const State& d) {
  State y = x;
  for (size_t i = 0; i < y.size(); ++i) y[i] += alpha * d[i];
  return y;
}

State lerp(const State& a, const State& b, double s) {
  State y(a.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = (1.0 - s) * a[i] + s * b[i];
  return y;
}

GridFunction wrap(const Mesh& mesh, const State& v) {
  GridFunction u(mesh);
  u.values = v;
  return u;
}

// Standard finite-difference Dirichlet Laplacian scaled by the cell measure;
// used as the Sobolev-gradient preconditioner and for the ladder basis.
State apply_stiffness(const Mesh& m, const State& u) {
  State out(u.size(), 0.0);
  const int nx = m.nodes_per_axis(0);
  if (m.dim() == 1) {
    const double c = 1.0 / m.spacing(0);
    for (int i = 1; i < nx - 1; ++i)
      out[static_cast<size_t>(i)] =
          c * (2.0 * u[static_cast<size_t>(i)] - u[static_cast<size_t>(i - 1)] -
               u[static_cast<size_t>(i + 1)]);
  } else {
    const int ny = m.nodes_per_axis(1);
    const double meas = m.cell_measure();
    const double cx = meas / (m.spacing(0) * m.spacing(0));
    const double cy = meas / (m.spacing(1) * m.spacing(1));
    for (int iy = 1; iy < ny - 1; ++iy) {
      for (int ix = 1; ix < nx - 1; ++ix) {
        const size_t i = static_cast<size_t>(iy * nx + ix);
        out[i] = cx * (2.0 * u[i] - u[i - 1] - u[i + 1]) +
                 cy * (2.0 * u[i] - u[i - static_cast<size_t>(nx)] -
                       u[i + static_cast<size_t>(nx)]);
      }
    }
  }
  return out;
}

// Solve stiffness * z = g with zero boundary values (Thomas in 1-D, CG in 2-D).
State precondition(const Mesh& m, const State& g) {
  State z(g.size(), 0.0);
  if (m.dim() == 1) {
    const int n = m.nodes_per_axis(0) - 2;  // interior
    if (n <= 0) return z;
    const double c = 1.0 / m.spacing(0);
    const double diag = 2.0 * c, off = -c;
    std::vector<double> cp(static_cast<size_t>(n)), dp(static_cast<size_t>(n));
    cp[0] = off / diag;
    dp[0] = g[1] / diag;
    for (int i = 1; i < n; ++i) {
      const double den = diag - off * cp[static_cast<size_t>(i - 1)];
      cp[static_cast<size_t>(i)] = off / den;
      dp[static_cast<size_t>(i)] =
          (g[static_cast<size_t>(i + 1)] - off * dp[static_cast<size_t>(i - 1)]) / den;
    }
    z[static_cast<size_t>(n)] = dp[static_cast<size_t>(n - 1)];
    for (int i = n - 1; i >= 1; --i)
      z[static_cast<size_t>(i)] = dp[static_cast<size_t>(i - 1)] -
                                  cp[static_cast<size_t>(i - 1)] * z[static_cast<size_t>(i + 1)];
    return z;
  }
  // CG on the interior unknowns
  State r = g;
  for (int i = 0; i < static_cast<int>(r.size()); ++i)
    if (m.is_boundary(i)) r[static_cast<size_t>(i)] = 0.0;
  State p = r;
  double rr = dot(r, r);
  const double tol2 = rr * 1e-16;
  for (int it = 0; it < 800 && rr > tol2 && rr > 0.0; ++it) {
    State ap = apply_stiffness(m, p);
    const double alpha = rr / dot(p, ap);
    for (size_t i = 0; i < z.size(); ++i) z[i] += alpha * p[i];
    for (size_t i = 0; i < r.size(); ++i) r[i] -= alpha * ap[i];
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  return z;
}

GridFunction smooth_random_field(const Mesh& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  State raw(static_cast<size_t>(m.node_count()), 0.0);
  for (int i = 0; i < m.node_count(); ++i)
    if (!m.is_boundary(i)) raw[static_cast<size_t>(i)] = uni(rng);
  State smooth = precondition(m, raw);
  GridFunction u = wrap(m, smooth);
  return enforce_zero_trace(u);
}

GridFunction bump_field(const Mesh& m) {
  GridFunction u(m);
  constexpr double kPi = 3.14159265358979323846;
  for (int i = 0; i < m.node_count(); ++i) {
    const Point x = m.node(i);
    double v = std::sin(kPi * (x[0] - m.lo(0)) / (m.hi(0) - m.lo(0)));
    if (m.dim() == 2) v *= std::sin(kPi * (x[1] - m.lo(1)) / (m.hi(1) - m.lo(1)));
    u[i] = v;
  }
  return enforce_zero_trace(u);
}

GridFunction scaled(const GridFunction& u, double a) {
  GridFunction v = u;
  for (auto& x : v.values) x *= a;
  return v;
}

// Luxemburg norms are absolutely homogeneous, so one scaling suffices.
GridFunction scale_to_sobolev(const GridFunction& u, const ExponentField& p,
                              double target) {
  const double n = sobolev0_norm(u, p);
  if (n == 0.0) return u;
  return scaled(u, target / n);
}

// Golden-section maximization of f on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b,
                  int iters = 40) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// ---- matrix-free Newton polish (CG on the normal equations) ----------------

State cgnr(const std::function<State(const State&)>& apply, const State& b,
           double rel_tol, int max_iter) {
  State x(b.size(), 0.0);
  State r = b;                 // b - A x
  State s = apply(r);          // A^T r = A r (A symmetric)
  State p = s;
  double ss = dot(s, s);
  const double b_norm = norm2(b);
  for (int it = 0; it < max_iter; ++it) {
    if (norm2(r) <= rel_tol * b_norm || ss == 0.0) break;
    State q = apply(p);
    const double qq = dot(q, q);
    if (qq == 0.0) break;
    const double alpha = ss / qq;
    for (size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
    for (size_t i = 0; i < r.size(); ++i) r[i] -= alpha * q[i];
    s = apply(r);
    const double ss_new = dot(s, s);
    const double beta = ss_new / ss;
    ss = ss_new;
    for (size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
  }
  return x;
}

// Refines a near-critical point to gradient_norm <= tol.  Matrix-free: only
// Hessian-vector products, never an assembled matrix.
bool newton_polish(const Problem& prob, GridFunction& u, double tol,
                   long* iterations = nullptr) {
  const int n = prob.mesh.node_count();
  const int cg_max = 8 * n;
  for (int it = 0; it < 60; ++it) {
    if (iterations) ++*iterations;
    GridFunction g = gradient_vector(prob, u);
    const double rn = gradient_norm(prob, g);
    if (rn <= tol) return true;
    State b(g.values.size());
    for (size_t i = 0; i < b.size(); ++i) b[i] = -g.values[i];
    const auto apply = [&](const State& v) {
      return hessian_apply(prob, u, wrap(prob.mesh, v)).values;
    };
    State d = cgnr(apply, b, 1e-4, cg_max);
    double alpha = 1.0;
    bool accepted = false;
    for (int back = 0; back < 40; ++back) {
      GridFunction trial = u;
      for (size_t i = 0; i < d.size(); ++i) trial.values[i] += alpha * d[i];
      const double rn_trial =
          gradient_norm(prob, gradient_vector(prob, trial));
      if (rn_trial < rn) {
        u = trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return false;
  }
  return gradient_norm(prob, gradient_vector(prob, u)) <= tol;
}

// ---- generic path-based mountain pass --------------------------------------

struct SpaceOps {
  std::function<double(const State&)> energy;
  std::function<State(const State&)> grad;
  std::function<State(const State&)> precond;
  std::function<double(const State&)> residual;  // stopping metric
};

struct PathResult {
  State maximizer;
  double energy = 0.0;
  double residual = 0.0;
  long iterations = 0;
  bool reached_tol = false;
  bool collapsed = false;  // path maximum fell below the ridge floor
};

// try_polish may refine a near-critical maximizer in place; returning true
// ends the path iteration early with the refined point.
PathResult run_path_mpa(const SpaceOps& ops, const State& valley,
                        double rho_floor, double stop_tol, long max_iter,
                        const SolverConfig& cfg,
                        const std::function<void(long, const State&, double)>&
                            on_iterate = nullptr,
                        double polish_trigger = 0.0,
                        const std::function<bool(State&)>& try_polish = nullptr) {
  const int P = std::max(5, cfg.path_points);
  std::vector<State> path(static_cast<size_t>(P));
  std::vector<double> pe(static_cast<size_t>(P));
  for (int j = 0; j < P; ++j) {
    path[static_cast<size_t>(j)] =
        lerp(State(valley.size(), 0.0), valley, double(j) / (P - 1));
    pe[static_cast<size_t>(j)] = ops.energy(path[static_cast<size_t>(j)]);
  }
  PathResult out;
  for (long it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    int jmax = 1;
    for (int j = 1; j < P - 1; ++j)
      if (pe[static_cast<size_t>(j)] > pe[static_cast<size_t>(jmax)]) jmax = j;
    // golden-section refinement across the two adjacent segments
    const State& zl = path[static_cast<size_t>(jmax - 1)];
    const State& zc = path[static_cast<size_t>(jmax)];
    const State& zr = path[static_cast<size_t>(jmax + 1)];
    const auto along = [&](double s) {
      return s <= 1.0 ? lerp(zl, zc, s) : lerp(zc, zr, s - 1.0);
    };
    const double s_best =
        golden_max([&](double s) { return ops.energy(along(s)); }, 0.25, 1.75, 24);
    State u = along(s_best);
    double eu = ops.energy(u);
    if (eu < pe[static_cast<size_t>(jmax)]) {
      u = zc;
      eu = pe[static_cast<size_t>(jmax)];
    }
    const double rn = ops.residual(u);
    if (on_iterate) on_iterate(it, u, rn);
    if (eu < rho_floor) {
      out.maximizer = u;
      out.energy = eu;
      out.residual = rn;
      out.collapsed = true;
      return out;
    }
    if (rn <= stop_tol) {
      out.maximizer = u;
      out.energy = eu;
      out.residual = rn;
      out.reached_tol = true;
      return out;
    }
    if (try_polish && (rn <= polish_trigger || it % 50 == 0)) {
      State candidate = u;
      if (try_polish(candidate)) {
        out.maximizer = candidate;
        out.energy = ops.energy(candidate);
        out.residual = ops.residual(candidate);
        out.reached_tol = true;
        return out;
      }
    }
    // descent step on the maximizer
    State g = ops.grad(u);
    State d = ops.precond(g);
    for (auto& v : d) v = -v;
    const double slope = dot(g, d);
    double alpha = 1.0;
    State next = u;
    double e_next = eu;
    for (int back = 0; back < 48; ++back) {
      State trial = axpy(u, alpha, d);
      const double et = ops.energy(trial);
      if (et <= eu + cfg.armijo_c * alpha * slope) {
        next = std::move(trial);
        e_next = et;
        break;
      }
      alpha *= cfg.armijo_shrink;
    }
    path[static_cast<size_t>(jmax)] = next;
    pe[static_cast<size_t>(jmax)] = e_next;
    out.maximizer = next;
    out.energy = e_next;
    out.residual = rn;
    if (cfg.relax_every > 0 && it % cfg.relax_every == 0) {
      // equal-arclength reparameterization (endpoints fixed)
      std::vector<double> cum(static_cast<size_t>(P), 0.0);
      for (int j = 1; j < P; ++j) {
        State diff = path[static_cast<size_t>(j)];
        for (size_t i = 0; i < diff.size(); ++i)
          diff[i] -= path[static_cast<size_t>(j - 1)][i];
        cum[static_cast<size_t>(j)] = cum[static_cast<size_t>(j - 1)] + norm2(diff);
      }
      if (cum.back() > 0.0) {
        std::vector<State> fresh(static_cast<size_t>(P));
        fresh.front() = path.front();
        fresh.back() = path.back();
        int seg = 0;
        for (int j = 1; j < P - 1; ++j) {
          const double target = cum.back() * j / (P - 1);
          while (seg < P - 2 && cum[static_cast<size_t>(seg + 1)] < target) ++seg;
          const double len = cum[static_cast<size_t>(seg + 1)] - cum[static_cast<size_t>(seg)];
          const double s = len > 0.0 ? (target - cum[static_cast<size_t>(seg)]) / len : 0.0;
          fresh[static_cast<size_t>(j)] =
              lerp(path[static_cast<size_t>(seg)], path[static_cast<size_t>(seg + 1)], s);
        }
        path = std::move(fresh);
        for (int j = 0; j < P; ++j)
          pe[static_cast<size_t>(j)] = ops.energy(path[static_cast<size_t>(j)]);
      }
    }
  }
  return out;
}

SpaceOps full_space_ops(const Problem& prob) {
  SpaceOps ops;
  ops.energy = [&prob](const State& v) {
    return energy(prob, wrap(prob.mesh, v)).total;
  };
  ops.grad = [&prob](const State& v) {
    return gradient_vector(prob, wrap(prob.mesh, v)).values;
  };
  ops.precond = [&prob](const State& g) { return precondition(prob.mesh, g); };
  ops.residual = [&prob](const State& v) {
    return gradient_norm(prob, gradient_vector(prob, wrap(prob.mesh, v)));
  };
  return ops;
}

SolveReport make_report(const Problem& prob, const GridFunction& u,
                        SolveStatus status, long iterations) {
  SolveReport rep;
  rep.solution = u;
  rep.energy = energy(prob, u);
  rep.grad_norm = gradient_norm(prob, gradient_vector(prob, u));
  rep.status = status;
  rep.iterations = iterations;
  return rep;
}

double rel_l2_distance_signed(const GridFunction& a, const GridFunction& b) {
  double dp = 0.0, dm = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double x = a.values[i], y = b.values[i];
    dp += (x - y) * (x - y);
    dm += (x + y) * (x + y);
    na += x * x;
    nb += y * y;
  }
  const double scale = std::sqrt(std::max(na, nb));
  if (scale == 0.0) return 0.0;
  return std::sqrt(std::min(dp, dm)) / scale;
}

}  // namespace

SolverConfig SolverConfig::defaults(const Mesh& mesh) {
  SolverConfig cfg;
  cfg.grad_tol = mesh.dim() == 1 ? 1e-8 : 1e-6;
  return cfg;
}

MPGeometry verify_mp_geometry(const Problem& prob, const GridFunction& phi,
                              const SolverConfig& cfg) {
  const ExponentField& p = prob.p();
  double norm_phi = sobolev0_norm(phi, p);
  if (norm_phi <= 0.0) throw NoValley("phi must be nonzero with zero trace");

  // valley: double t until E(t phi) < 0
  double t = 1.0;
  while (energy(prob, scaled(phi, t)).total >= 0.0) {
    t *= 2.0;
    if (t > cfg.valley_t_max)
      throw NoValley("no t <= t_max with E(t phi) < 0 (check q- > p+)");
  }
  MPGeometry geom;
  geom.t_star = t;
  geom.e = scaled(phi, t);

  // ridge: scan radii, sample spheres
  std::mt19937_64 rng(cfg.seed);
  const double norm_e = norm_phi * t;
  double best_r = 0.0, best_floor = 0.0;
  for (int ir = 0; ir < 16; ++ir) {
    const double r =
        norm_e * std::pow(10.0, -3.0 + 3.0 * ir / 15.0) * 0.3;
    double floor_r = energy(prob, scale_to_sobolev(phi, p, r)).total;
    for (int s = 0; s < cfg.sphere_samples; ++s) {
      GridFunction w = smooth_random_field(prob.mesh, rng);
      const double nw = sobolev0_norm(w, p);
      if (nw == 0.0) continue;
      floor_r = std::min(floor_r, energy(prob, scaled(w, r / nw)).total);
    }
    if (floor_r > best_floor) {
      best_floor = floor_r;
      best_r = r;
    }
  }
  if (!(best_floor > 0.0))
    throw NoMountainRidge("no radius with positive sampled energy floor");
  geom.r = best_r;
  geom.rho = best_floor;
  return geom;
}

SolveReport mountain_pass_solve(const Problem& prob, const MPGeometry& geom,
                                const SolverConfig& cfg) {
  SpaceOps ops = full_space_ops(prob);
  SolveReport rep;
  const double path_tol = std::max(cfg.grad_tol, 1e-5);
  const auto trace_cb = [&](long it, const State& u, double rn) {
    if (it % 25 != 0) return;  // keep the trace compact
    const EnergyBreakdown eb = energy(prob, wrap(prob.mesh, u));
    rep.trace.push_back({it, eb.e0, eb.j, eb.total, rn});
  };
  long polish_iters = 0;
  const auto try_polish = [&](State& v) {
    GridFunction u = wrap(prob.mesh, v);
    if (!newton_polish(prob, u, cfg.grad_tol, &polish_iters)) return false;
    if (sobolev0_norm(u, prob.p()) <= cfg.nontrivial_tol) return false;
    if (energy(prob, u).total < geom.rho - 10.0 * cfg.grad_tol) return false;
    v = u.values;
    return true;
  };
  PathResult path = run_path_mpa(ops, geom.e.values, geom.rho - 10.0 * cfg.grad_tol,
                                 path_tol, cfg.max_iter, cfg, trace_cb, 1e-1,
                                 try_polish);
  if (path.collapsed)
    throw DegenerateCollapse("path maximum fell below the ridge floor");

  GridFunction u = wrap(prob.mesh, path.maximizer);
  long iters = path.iterations + polish_iters;
  const bool polished = newton_polish(prob, u, cfg.grad_tol, &iters);
  rep.solution = u;
  rep.energy = energy(prob, u);
  rep.grad_norm = gradient_norm(prob, gradient_vector(prob, u));
  rep.iterations = iters;
  const double nontrivial = sobolev0_norm(u, prob.p());
  if (polished && rep.grad_norm <= cfg.grad_tol && nontrivial > cfg.nontrivial_tol)
    rep.status = SolveStatus::Converged;
  else
    rep.status = SolveStatus::MaxIterReached;
  {
    const EnergyBreakdown eb = rep.energy;
    rep.trace.push_back({iters, eb.e0, eb.j, eb.total, rep.grad_norm});
  }
  return rep;
}

SubspaceLadder build_subspace_ladder(const Problem& prob, int K,
                                     const SolverConfig& cfg) {
  const Mesh& m = prob.mesh;
  const std::vector<int> interior = m.interior_nodes();
  const int n = static_cast<int>(interior.size());
  if (K < 1 || K > n) throw LadderTooLarge("ladder size exceeds interior node count");

  Eigen::MatrixXd A(n, n);
  State unit(static_cast<size_t>(m.node_count()), 0.0);
  for (int c = 0; c < n; ++c) {
    unit[static_cast<size_t>(interior[static_cast<size_t>(c)])] = 1.0;
    const State col = apply_stiffness(m, unit);
    unit[static_cast<size_t>(interior[static_cast<size_t>(c)])] = 0.0;
    for (int r = 0; r < n; ++r)
      A(r, c) = col[static_cast<size_t>(interior[static_cast<size_t>(r)])];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);

  SubspaceLadder ladder;
  ladder.basis.reserve(static_cast<size_t>(K));
  ladder.eigenvalues.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    GridFunction b(m, 0.0);
    for (int r = 0; r < n; ++r)
      b[interior[static_cast<size_t>(r)]] = es.eigenvectors()(r, k);
    // fix the sign for determinism: largest-magnitude entry positive
    int imax = 0;
    for (int i = 1; i < b.size(); ++i)
      if (std::fabs(b[i]) > std::fabs(b[imax])) imax = i;
    if (b[imax] < 0.0)
      for (auto& v : b.values) v = -v;
    ladder.basis.push_back(std::move(b));
    ladder.eigenvalues.push_back(es.eigenvalues()(k));
  }

  // alpha_k: sampled sup of |u|_{L^{q(x)}} over unit-Sobolev fields in Z_k
  std::mt19937_64 rng(cfg.seed + 77);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ladder.alpha.resize(static_cast<size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    double best = 0.0;
    for (int trial = 0; trial < 32; ++trial) {
      GridFunction u(m, 0.0);
      for (int j = k; j < K; ++j) {
        const double c = uni(rng);
        for (int i = 0; i < u.size(); ++i)
          u[i] += c * ladder.basis[static_cast<size_t>(j)][i];
      }
      const double nn = sobolev0_norm(u, prob.p());
      if (nn == 0.0) continue;
      best = std::max(best,
                      luxemburg_norm(scaled(u, 1.0 / nn), prob.q()).value);
    }
    ladder.alpha[static_cast<size_t>(k)] = best;
  }
  return ladder;
}

int sign_changes(const GridFunction& u) {
  double amax = 0.0;
  for (double v : u.values) amax = std::max(amax, std::fabs(v));
  if (amax == 0.0) return 0;
  const double tol = 1e-6 * amax;
  int changes = 0;
  int last_sign = 0;
  for (double v : u.values) {
    if (std::fabs(v) <= tol) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

FountainResult fountain_search(const Problem& prob, const SubspaceLadder& ladder,
                               const SolverConfig& cfg) {
  if (!prob.reaction.odd())
    throw OddnessRequired("fountain search needs an odd reaction");
  FountainResult out;
  out.reaction_check = verify_reaction_hypotheses(prob.reaction, prob.p(), {});
  const auto* f1 = out.reaction_check.find("f1");
  const auto* f2 = out.reaction_check.find("f2");
  if ((f1 && f1->status == HypothesisStatus::Violated) ||
      (f2 && f2->status == HypothesisStatus::Violated))
    return out;  // empty with diagnostic attached

  const int K = static_cast<int>(ladder.basis.size());
  std::vector<SolveReport> candidates;

  for (int k = 1; k <= K; ++k) {
    const GridFunction& b = ladder.basis[static_cast<size_t>(k - 1)];
    for (double sign : {1.0, -1.0}) {
      // ridge point along the symmetric ray t -> E(t b)
      double t_neg = 1.0;
      bool has_valley = true;
      while (energy(prob, scaled(b, sign * t_neg)).total >= 0.0) {
        t_neg *= 2.0;
        if (t_neg > cfg.valley_t_max) {
          has_valley = false;
          break;
        }
      }
      if (!has_valley) continue;
      const double t_hat = golden_max(
          [&](double t) { return energy(prob, scaled(b, sign * t)).total; },
          0.0, t_neg, 48);
      GridFunction u = scaled(b, sign * t_hat);
      long iters = 0;
      if (!newton_polish(prob, u, cfg.grad_tol, &iters)) continue;
      if (sobolev0_norm(u, prob.p()) <= cfg.nontrivial_tol) continue;
      candidates.push_back(make_report(prob, u, SolveStatus::Converged, iters));
    }

    // restricted mountain pass in Y_{k+1}
    if (k + 1 <= K) {
      const int dim = k + 1;
      const auto to_full = [&](const State& c) {
        GridFunction u(prob.mesh, 0.0);
        for (int j = 0; j < dim; ++j)
          for (int i = 0; i < u.size(); ++i)
            u[i] += c[static_cast<size_t>(j)] * ladder.basis[static_cast<size_t>(j)][i];
        return u;
      };
      SpaceOps ops;
      ops.energy = [&](const State& c) { return energy(prob, to_full(c)).total; };
      ops.grad = [&](const State& c) {
        const GridFunction g = gradient_vector(prob, to_full(c));
        State gc(static_cast<size_t>(dim), 0.0);
        for (int j = 0; j < dim; ++j)
          for (int i = 0; i < g.size(); ++i)
            gc[static_cast<size_t>(j)] += g[i] * ladder.basis[static_cast<size_t>(j)][i];
        return gc;
      };
      ops.precond = [&](const State& g) {
        State d = g;
        for (int j = 0; j < dim; ++j)
          d[static_cast<size_t>(j)] /= ladder.eigenvalues[static_cast<size_t>(j)];
        return d;
      };
      ops.residual = [&](const State& c) { return norm2(ops.grad(c)); };

      double t_neg = 1.0;
      bool has_valley = true;
      const GridFunction& bk = ladder.basis[static_cast<size_t>(k)];
      while (energy(prob, scaled(bk, t_neg)).total >= 0.0) {
        t_neg *= 2.0;
        if (t_neg > cfg.valley_t_max) {
          has_valley = false;
          break;
        }
      }
      if (has_valley) {
        State valley(static_cast<size_t>(dim), 0.0);
        valley[static_cast<size_t>(k)] = t_neg;
        PathResult res = run_path_mpa(ops, valley, -1e300, 1e-10,
                                      std::min<long>(cfg.max_iter, 1500), cfg);
        GridFunction u = to_full(res.maximizer);
        long iters = res.iterations;
        if (newton_polish(prob, u, cfg.grad_tol, &iters) &&
            sobolev0_norm(u, prob.p()) > cfg.nontrivial_tol)
          candidates.push_back(
              make_report(prob, u, SolveStatus::Converged, iters));
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const SolveReport& a, const SolveReport& b) {
              if (a.energy.total != b.energy.total)
                return a.energy.total < b.energy.total;
              return a.solution.values < b.solution.values;
            });
  for (const auto& cand : candidates) {
    bool dup = false;
    for (const auto& kept : out.solutions) {
      if (rel_l2_distance_signed(cand.solution, kept.solution) <= cfg.dedup_tol ||
          std::fabs(cand.energy.total - kept.energy.total) <=
              1e-8 * (1.0 + std::fabs(kept.energy.total))) {
        dup = true;
        break;
      }
    }
    if (!dup) out.solutions.push_back(cand);
  }
  return out;
}

double rayleigh_quotient(const Problem& prob, const GridFunction& u) {
  const EnergyBreakdown eb = energy(prob, u);
  constexpr double kJFloor = 1e-30;
  if (eb.j <= kJFloor)
    throw ZeroDenominator("reaction energy J(u) vanishes");
  return eb.e0 / eb.j;
}

Lambda1Result lambda1_minimize(const Problem& prob, const SolverConfig& cfg) {
  Lambda1Result out;
  out.kernel_check = verify_kernel_hypotheses(prob.kernel, {});
  out.reaction_check = verify_reaction_hypotheses(prob.reaction, prob.p(), {});

  std::mt19937_64 rng(cfg.seed);
  std::vector<GridFunction> dirs;
  dirs.push_back(scale_to_sobolev(bump_field(prob.mesh), prob.p(), 1.0));
  for (int s = 0; s < cfg.random_starts; ++s) {
    GridFunction w = smooth_random_field(prob.mesh, rng);
    const double n = sobolev0_norm(w, prob.p());
    if (n > 0.0) dirs.push_back(scaled(w, 1.0 / n));
  }

  constexpr double kJFloor = 1e-30;
  double best_q = std::numeric_limits<double>::infinity();
  GridFunction best_u;
  out.sweep.reserve(static_cast<size_t>(cfg.scale_count));
  for (int is = 0; is < cfg.scale_count; ++is) {
    const double scale =
        std::pow(10.0, -3.0 + 6.0 * is / std::max(1, cfg.scale_count - 1));
    double scale_best = std::numeric_limits<double>::infinity();
    for (const auto& dir : dirs) {
      GridFunction u = scaled(dir, scale);
      EnergyBreakdown eb = energy(prob, u);
      if (eb.j <= kJFloor) continue;
      double q = eb.e0 / eb.j;
      for (int step = 0; step < cfg.quotient_steps; ++step) {
        GridFunction g0, gj;
        gradient_parts(prob, u, g0, gj);
        State gq(g0.values.size());
        for (size_t i = 0; i < gq.size(); ++i)
          gq[i] = (g0.values[i] - q * gj.values[i]) / eb.j;
        State d = precondition(prob.mesh, gq);
        for (auto& v : d) v = -v;
        double alpha = 1.0;
        bool improved = false;
        for (int back = 0; back < 30; ++back) {
          GridFunction trial = u;
          for (size_t i = 0; i < d.size(); ++i)
            trial.values[i] += alpha * d[i];
          trial = scale_to_sobolev(trial, prob.p(), scale);
          const EnergyBreakdown et = energy(prob, trial);
          if (et.j > kJFloor && et.e0 / et.j < q * (1.0 - 1e-13)) {
            u = std::move(trial);
            eb = et;
            q = et.e0 / et.j;
            improved = true;
            break;
          }
          alpha *= 0.5;
        }
        if (!improved) break;
      }
      if (q < scale_best) scale_best = q;
      if (q < best_q) {
        best_q = q;
        best_u = u;
      }
    }
    out.sweep.emplace_back(scale, scale_best);
  }
  out.lambda1_est = best_q;

  // degeneracy: quotient decreasing along the whole sweep, minimum on the
  // boundary of the probed scale range
  bool decreasing = out.sweep.size() > 1;
  for (size_t i = 1; i < out.sweep.size(); ++i)
    if (!(out.sweep[i].second < out.sweep[i - 1].second * (1.0 + 1e-9)))
      decreasing = false;
  out.degenerate = decreasing &&
                   out.sweep.back().second < 0.5 * out.sweep.front().second &&
                   out.sweep.back().second <= best_q * (1.0 + 1e-9);
  if (!out.degenerate && best_u.size() > 0) out.minimizer = best_u;
  return out;
}

Problem with_reaction_scaled(const Problem& prob, double lambda) {
  return Problem(prob.mesh, prob.kernel, prob.reaction.scaled(lambda));
}

SolveReport global_minimize_at_lambda(const Problem& prob, double lambda,
                                      const SolverConfig& cfg) {
  const Problem plam = with_reaction_scaled(prob, lambda);
  std::mt19937_64 rng(cfg.seed + 13);

  std::vector<GridFunction> dirs;
  dirs.push_back(scale_to_sobolev(bump_field(prob.mesh), prob.p(), 1.0));
  for (int s = 0; s < cfg.random_starts; ++s) {
    GridFunction w = smooth_random_field(prob.mesh, rng);
    const double n = sobolev0_norm(w, prob.p());
    if (n > 0.0) dirs.push_back(scaled(w, 1.0 / n));
  }
  // cheap lambda1-direction: a few quotient descent steps from the bump
  {
    SolverConfig qc = cfg;
    qc.scale_count = 1;
    qc.quotient_steps = 40;
    qc.random_starts = 0;
    const Lambda1Result l1 = lambda1_minimize(prob, qc);
    if (l1.minimizer) {
      const double n = sobolev0_norm(*l1.minimizer, prob.p());
      if (n > 0.0) dirs.push_back(scaled(*l1.minimizer, 1.0 / n));
    }
  }

  // coercivity probe along expanding rays
  for (const auto& dir : dirs) {
    for (double t = 1.0; t <= 1e18; t *= 2.0) {
      const double e = energy(plam, scaled(dir, t)).total;
      if (e < -cfg.coercivity_cap) {
        SolveReport rep = make_report(plam, scaled(dir, t),
                                      SolveStatus::DivergedToMinusInfinity, 0);
        return rep;
      }
      if (e > cfg.coercivity_cap) break;  // ray is climbing; stop expanding
    }
  }

  SolveReport best;
  best.status = SolveStatus::DegenerateZero;
  best.solution = GridFunction(prob.mesh, 0.0);
  best.energy = energy(plam, best.solution);
  bool have_negative = false;

  for (const auto& dir : dirs) {
    GridFunction u = dir;
    long iters = 0;
    double e = energy(plam, u).total;
    for (long it = 0; it < 5000; ++it) {
      ++iters;
      GridFunction g = gradient_vector(plam, u);
      const double rn = gradient_norm(plam, g);
      if (rn <= std::max(cfg.grad_tol, 1e-6)) break;
      State d = precondition(prob.mesh, g.values);
      for (auto& v : d) v = -v;
      const double slope = dot(g.values, d);
      double alpha = 1.0;
      bool moved = false;
      for (int back = 0; back < 48; ++back) {
        GridFunction trial = u;
        for (size_t i = 0; i < d.size(); ++i) trial.values[i] += alpha * d[i];
        const double et = energy(plam, trial).total;
        if (et <= e + cfg.armijo_c * alpha * slope) {
          u = std::move(trial);
          e = et;
          moved = true;
          break;
        }
        alpha *= cfg.armijo_shrink;
      }
      if (e < -cfg.coercivity_cap)
        return make_report(plam, u, SolveStatus::DivergedToMinusInfinity, iters);
      if (!moved) break;
    }
    newton_polish(plam, u, cfg.grad_tol, &iters);
    SolveReport rep = make_report(plam, u, SolveStatus::MaxIterReached, iters);
    const double nontrivial = sobolev0_norm(u, prob.p());
    if (rep.grad_norm <= cfg.grad_tol && nontrivial > cfg.nontrivial_tol &&
        rep.energy.total < 0.0) {
      rep.status = SolveStatus::Converged;
      if (!have_negative || rep.energy.total < best.energy.total) {
        best = rep;
        have_negative = true;
      }
    }
  }
  return best;
}

}  // namespace varexp
