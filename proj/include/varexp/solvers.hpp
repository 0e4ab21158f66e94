#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "varexp/energy.hpp"

namespace varexp {

struct SolverConfig {
  double grad_tol = 1e-8;  // 1e-8 in 1-D, 1e-6 in 2-D
  double nontrivial_tol = 1e-6;
  double dedup_tol = 1e-3;
  double coercivity_cap = 1e6;
  long max_iter = 100000;
  int path_points = 33;
  int relax_every = 10;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  std::uint64_t seed = 1;
  int sphere_samples = 64;
  double valley_t_max = 1e6;
  int scale_count = 15;      // lambda1 norm-scale sweep
  int random_starts = 3;
  int quotient_steps = 120;  // descent steps per (start, scale)

  static SolverConfig defaults(const Mesh& mesh);
};

struct MPGeometry {
  double r = 0.0;      // sphere radius with positive sampled energy floor
  double rho = 0.0;    // energy floor on that sphere
  GridFunction e;      // valley point, E(e) < 0
  double t_star = 0.0; // scaling with E(t* phi) < 0
};

enum class SolveStatus {
  Converged,
  MaxIterReached,
  DivergedToMinusInfinity,
  DegenerateZero,
};

struct TraceRow {
  long iter = 0;
  double e0 = 0.0, j = 0.0, total = 0.0, grad_norm = 0.0;
};

struct SolveReport {
  GridFunction solution;
  EnergyBreakdown energy;
  double grad_norm = 0.0;
  long iterations = 0;
  SolveStatus status = SolveStatus::MaxIterReached;
  std::vector<TraceRow> trace;
};

// Discrete stand-in for the nested subspaces Y_k / Z_k: the first K Dirichlet
// Laplacian eigenvectors in ascending eigenvalue order.
struct SubspaceLadder {
  std::vector<GridFunction> basis;     // b_1 ... b_K, unit Euclidean norm
  std::vector<double> eigenvalues;     // ascending
  std::vector<double> alpha;           // alpha_k estimates, k = 1..K
};

struct FountainResult {
  std::vector<SolveReport> solutions;  // deduplicated, energy ascending
  HypothesisReport reaction_check;
};

struct Lambda1Result {
  double lambda1_est = 0.0;
  std::optional<GridFunction> minimizer;
  bool degenerate = false;  // quotient decreases toward 0 along the scale sweep
  std::vector<std::pair<double, double>> sweep;  // (scale, best quotient)
  HypothesisReport kernel_check;
  HypothesisReport reaction_check;
};

// Scans a radius grid with random sphere samples for the ridge (r, rho) and
// doubles t until E(t phi) < 0 for the valley.
MPGeometry verify_mp_geometry(const Problem& prob, const GridFunction& phi,
                              const SolverConfig& cfg);

// Numerical mountain pass: discrete path from 0 to the valley point, descent
// on the path maximizer, periodic re-relaxation, final residual polish.
SolveReport mountain_pass_solve(const Problem& prob, const MPGeometry& geom,
                                const SolverConfig& cfg);

SubspaceLadder build_subspace_ladder(const Problem& prob, int K,
                                     const SolverConfig& cfg);

// Symmetric multi-solution search over the ladder levels (odd reactions only).
FountainResult fountain_search(const Problem& prob, const SubspaceLadder& ladder,
                               const SolverConfig& cfg);

double rayleigh_quotient(const Problem& prob, const GridFunction& u);

Lambda1Result lambda1_minimize(const Problem& prob, const SolverConfig& cfg);

SolveReport global_minimize_at_lambda(const Problem& prob, double lambda,
                                      const SolverConfig& cfg);

// Reaction scaled by lambda (problem (7.2) with the same kernel).
Problem with_reaction_scaled(const Problem& prob, double lambda);

// Number of sign changes of the nodal values along the lexicographic node
// order (1-D: interior zero crossings), ignoring magnitudes below
// 1e-6 * max|u|.
int sign_changes(const GridFunction& u);

}  // namespace varexp
