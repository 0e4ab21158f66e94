// varexp-solve: batch experiment runner.
//
//   varexp-solve run <config.json> [--out DIR] [--seed N] [--task T]
//
// Config schema is documented in README.md.  Unknown keys are rejected.
// Exit codes: 0 success, 2 hypothesis violation (task = verify), 1 failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "varexp/energy.hpp"
#include "varexp/errors.hpp"
#include "varexp/exponent.hpp"
#include "varexp/kernels.hpp"
#include "varexp/mesh.hpp"
#include "varexp/modular.hpp"
#include "varexp/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace varexp;

namespace {

int log_level() {
  const char* env = std::getenv("VAREXP_LOG");
  return env ? std::atoi(env) : 0;
}

void logv(const std::string& msg) {
  if (log_level() > 0) std::cerr << "[varexp-solve] " << msg << "\n";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw ParseError("config: " + where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::vector<std::string>& allowed) {
  if (!obj.is_object()) config_error(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) config_error(where, "unknown key '" + key + "'");
  }
}

double need_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) config_error(where, "missing key '" + key + "'");
  if (!obj[key].is_number()) config_error(where + "." + key, "expected a number");
  return obj[key].get<double>();
}

Mesh parse_mesh(const json& spec) {
  reject_unknown(spec, "mesh", {"dim", "box", "cells"});
  const int dim = static_cast<int>(need_number(spec, "mesh", "dim"));
  if (!spec.contains("box") || !spec["box"].is_array())
    config_error("mesh.box", "expected an array");
  if (!spec.contains("cells") || !spec["cells"].is_array())
    config_error("mesh.cells", "expected an array");
  const auto box = spec["box"].get<std::vector<double>>();
  const auto cells = spec["cells"].get<std::vector<int>>();
  if (dim == 1) {
    if (box.size() != 2 || cells.size() != 1)
      config_error("mesh", "1-D mesh needs box [a,b] and cells [n]");
    return Mesh::interval(box[0], box[1], cells[0]);
  }
  if (dim == 2) {
    if (box.size() != 4 || cells.size() != 2)
      config_error("mesh", "2-D mesh needs box [ax,bx,ay,by] and cells [nx,ny]");
    return Mesh::rectangle(box[0], box[1], box[2], box[3], cells[0], cells[1]);
  }
  config_error("mesh.dim", "must be 1 or 2");
}

// Field spec: {"expr": "..."} or {"table": [v0, v1, ...]} (per node).
std::vector<double> parse_field(const json& spec, const std::string& where,
                                const Mesh& mesh) {
  reject_unknown(spec, where, {"expr", "table"});
  if (spec.contains("expr") == spec.contains("table"))
    config_error(where, "need exactly one of 'expr' or 'table'");
  std::vector<double> out(static_cast<size_t>(mesh.node_count()));
  if (spec.contains("expr")) {
    if (!spec["expr"].is_string()) config_error(where + ".expr", "expected a string");
    const Expr e = Expr::parse(spec["expr"].get<std::string>());
    for (int i = 0; i < mesh.node_count(); ++i) {
      const Point x = mesh.node(i);
      out[static_cast<size_t>(i)] = e.eval(x[0], x[1]);
    }
  } else {
    if (!spec["table"].is_array()) config_error(where + ".table", "expected an array");
    const auto t = spec["table"].get<std::vector<double>>();
    if (static_cast<int>(t.size()) != mesh.node_count())
      config_error(where + ".table", "length must equal the node count");
    out = t;
  }
  return out;
}

ExponentField parse_exponent(const json& spec, const std::string& where,
                             const Mesh& mesh) {
  if (spec.contains("expr"))
    return ExponentField::from_expression(Expr::parse(spec["expr"].get<std::string>()),
                                          mesh);
  return ExponentField::from_table(parse_field(spec, where, mesh), mesh);
}

struct Experiment {
  Mesh mesh = Mesh::interval(0.0, 1.0, 2);
  std::optional<Problem> problem;
  std::string task;
  SolverConfig solver;
  double lambda = 1.0;
  int ladder_k = 6;
  std::optional<GridFunction> phi;  // mountain-pass start / norms input
  fs::path out_dir = "out";
};

Experiment parse_config(const json& cfg, const std::optional<std::string>& task_override,
                        const std::optional<std::uint64_t>& seed_override,
                        const std::optional<std::string>& out_override) {
  reject_unknown(cfg, "<root>",
                 {"mesh", "p", "q", "kernel", "reaction", "task", "solver", "seed",
                  "output_dir", "lambda", "ladder_k", "phi", "u"});
  Experiment ex;
  if (!cfg.contains("mesh")) config_error("<root>", "missing key 'mesh'");
  ex.mesh = parse_mesh(cfg["mesh"]);
  if (!cfg.contains("p") || !cfg.contains("q"))
    config_error("<root>", "missing exponent specs 'p' and 'q'");
  const ExponentField p = parse_exponent(cfg["p"], "p", ex.mesh);
  const ExponentField q = parse_exponent(cfg["q"], "q", ex.mesh);

  std::string family = "pxLaplacian";
  if (cfg.contains("kernel")) {
    reject_unknown(cfg["kernel"], "kernel", {"family"});
    if (cfg["kernel"].contains("family"))
      family = cfg["kernel"]["family"].get<std::string>();
  }
  OperatorKernel kernel = family == "pxLaplacian" ? OperatorKernel::px_laplacian(p)
                          : family == "weightedPxLaplacian"
                              ? OperatorKernel::weighted_px_laplacian(p)
                          : family == "pxMeanCurvature"
                              ? OperatorKernel::px_mean_curvature(p)
                              : (config_error("kernel.family",
                                              "unknown family '" + family + "'"),
                                 OperatorKernel::px_laplacian(p));

  GridFunction c(ex.mesh, 1.0);
  double growth_C = 1.0, mu = 0.0, R = 1.0;
  bool odd = true;
  if (cfg.contains("reaction")) {
    reject_unknown(cfg["reaction"], "reaction", {"c", "growth_C", "mu", "R", "odd"});
    const json& r = cfg["reaction"];
    if (r.contains("c")) c.values = parse_field(r["c"], "reaction.c", ex.mesh);
    if (r.contains("growth_C")) growth_C = need_number(r, "reaction", "growth_C");
    if (r.contains("mu")) mu = need_number(r, "reaction", "mu");
    if (r.contains("R")) R = need_number(r, "reaction", "R");
    if (r.contains("odd")) {
      if (!r["odd"].is_boolean()) config_error("reaction.odd", "expected a boolean");
      odd = r["odd"].get<bool>();
    }
  }
  if (mu == 0.0) mu = q.p_minus();
  if (!odd) config_error("reaction.odd", "model reactions are odd; custom ones are API-only");
  Reaction reaction = Reaction::model(c, q, growth_C, mu, R);
  ex.problem.emplace(ex.mesh, std::move(kernel), std::move(reaction));

  ex.task = cfg.value("task", std::string("verify"));
  if (task_override) ex.task = *task_override;
  static const std::vector<std::string> kTasks = {
      "verify", "mountain-pass", "fountain", "lambda1", "minimize-at-lambda", "norms"};
  bool known_task = false;
  for (const auto& t : kTasks) known_task = known_task || t == ex.task;
  if (!known_task) config_error("task", "unknown task '" + ex.task + "'");

  ex.solver = SolverConfig::defaults(ex.mesh);
  if (cfg.contains("solver")) {
    const json& s = cfg["solver"];
    reject_unknown(s, "solver",
                   {"grad_tol", "nontrivial_tol", "dedup_tol", "coercivity_cap",
                    "max_iter", "path_points", "relax_every", "sphere_samples",
                    "scale_count", "random_starts", "quotient_steps"});
    if (s.contains("grad_tol")) ex.solver.grad_tol = need_number(s, "solver", "grad_tol");
    if (s.contains("nontrivial_tol"))
      ex.solver.nontrivial_tol = need_number(s, "solver", "nontrivial_tol");
    if (s.contains("dedup_tol")) ex.solver.dedup_tol = need_number(s, "solver", "dedup_tol");
    if (s.contains("coercivity_cap"))
      ex.solver.coercivity_cap = need_number(s, "solver", "coercivity_cap");
    if (s.contains("max_iter"))
      ex.solver.max_iter = static_cast<long>(need_number(s, "solver", "max_iter"));
    if (s.contains("path_points"))
      ex.solver.path_points = static_cast<int>(need_number(s, "solver", "path_points"));
    if (s.contains("relax_every"))
      ex.solver.relax_every = static_cast<int>(need_number(s, "solver", "relax_every"));
    if (s.contains("sphere_samples"))
      ex.solver.sphere_samples = static_cast<int>(need_number(s, "solver", "sphere_samples"));
    if (s.contains("scale_count"))
      ex.solver.scale_count = static_cast<int>(need_number(s, "solver", "scale_count"));
    if (s.contains("random_starts"))
      ex.solver.random_starts = static_cast<int>(need_number(s, "solver", "random_starts"));
    if (s.contains("quotient_steps"))
      ex.solver.quotient_steps = static_cast<int>(need_number(s, "solver", "quotient_steps"));
  }
  if (cfg.contains("seed"))
    ex.solver.seed = static_cast<std::uint64_t>(need_number(cfg, "<root>", "seed"));
  if (seed_override) ex.solver.seed = *seed_override;
  if (cfg.contains("lambda")) ex.lambda = need_number(cfg, "<root>", "lambda");
  if (cfg.contains("ladder_k"))
    ex.ladder_k = static_cast<int>(need_number(cfg, "<root>", "ladder_k"));
  const char* field_key = cfg.contains("phi") ? "phi" : cfg.contains("u") ? "u" : nullptr;
  if (field_key) {
    GridFunction g(ex.mesh);
    g.values = parse_field(cfg[field_key], field_key, ex.mesh);
    ex.phi = g;
  }
  if (cfg.contains("output_dir")) ex.out_dir = cfg["output_dir"].get<std::string>();
  if (out_override) ex.out_dir = *out_override;
  return ex;
}

// ---- output ----------------------------------------------------------------

struct Emitter {
  fs::path dir;
  std::vector<std::string> files;

  std::ofstream open(const std::string& name) {
    fs::create_directories(dir);
    files.push_back(name);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot open output file " + (dir / name).string());
    return out;
  }

  void nodes_csv(const std::string& name, const GridFunction& u) {
    auto out = open(name);
    out << (u.mesh.dim() == 1 ? "x,value\n" : "x,y,value\n");
    for (int i = 0; i < u.size(); ++i) {
      const Point x = u.mesh.node(i);
      out << fmt(x[0]);
      if (u.mesh.dim() == 2) out << ',' << fmt(x[1]);
      out << ',' << fmt(u[i]) << '\n';
    }
  }

  void trace_csv(const std::string& name, const std::vector<TraceRow>& trace) {
    auto out = open(name);
    out << "iter,e0,j,total,grad_norm\n";
    for (const auto& row : trace)
      out << row.iter << ',' << fmt(row.e0) << ',' << fmt(row.j) << ','
          << fmt(row.total) << ',' << fmt(row.grad_norm) << '\n';
  }
};

json hypothesis_json(const HypothesisReport& rep) {
  json out = json::array();
  for (const auto& c : rep.checks) {
    const char* status = c.status == HypothesisStatus::HoldsOnSample ? "holds_on_sample"
                         : c.status == HypothesisStatus::Violated    ? "violated"
                                                                     : "not_applicable";
    out.push_back({{"name", c.name},
                   {"status", status},
                   {"witness_x", {c.witness_x[0], c.witness_x[1]}},
                   {"witness_s", c.witness_s},
                   {"margin", c.margin},
                   {"samples", c.samples}});
  }
  return out;
}

json solve_json(const SolveReport& rep) {
  const char* status = rep.status == SolveStatus::Converged ? "converged"
                       : rep.status == SolveStatus::MaxIterReached ? "max_iter"
                       : rep.status == SolveStatus::DivergedToMinusInfinity
                           ? "diverged_to_minus_infinity"
                           : "degenerate_zero";
  return {{"status", status},
          {"energy", {{"e0", rep.energy.e0}, {"j", rep.energy.j}, {"total", rep.energy.total}}},
          {"grad_norm", rep.grad_norm},
          {"iterations", rep.iterations}};
}

// ---- tasks -----------------------------------------------------------------

int run_task(const Experiment& ex) {
  const Problem& prob = *ex.problem;
  Emitter em{ex.out_dir, {}};
  json report;
  report["task"] = ex.task;
  report["seed"] = ex.solver.seed;
  int exit_code = 0;
  const auto t0 = std::chrono::steady_clock::now();

  const AdmissibilityReport adm =
      check_admissibility(prob.p(), prob.q(), prob.mesh.dim());
  report["admissibility"] = {{"c_plus_ok", adm.c_plus_ok},
                             {"growth_gap_ok", adm.growth_gap_ok},
                             {"subcritical_ok", adm.subcritical_ok},
                             {"a5_ok", adm.a5_ok},
                             {"log_holder_estimate", adm.log_holder_estimate}};

  if (ex.task == "verify") {
    const HypothesisReport kr = verify_kernel_hypotheses(prob.kernel, {});
    const HypothesisReport rr = verify_reaction_hypotheses(prob.reaction, prob.p(), {});
    report["kernel_hypotheses"] = hypothesis_json(kr);
    report["reaction_hypotheses"] = hypothesis_json(rr);
    const bool admissible =
        adm.c_plus_ok && adm.growth_gap_ok && adm.subcritical_ok && adm.a5_ok;
    if (!admissible || !kr.all_hold() || !rr.all_hold()) exit_code = 2;
  } else if (ex.task == "norms") {
    GridFunction u = ex.phi ? *ex.phi : GridFunction(prob.mesh, 0.0);
    u = enforce_zero_trace(u);
    const NormResult lux = luxemburg_norm(u, prob.p());
    const EnergyBreakdown eb = energy(prob, u);
    report["norms"] = {{"modular_p", modular(u, prob.p())},
                       {"luxemburg_p", lux.value},
                       {"modular_at_norm", lux.modular_at_value},
                       {"sobolev0_p", sobolev0_norm(u, prob.p())},
                       {"energy", {{"e0", eb.e0}, {"j", eb.j}, {"total", eb.total}}}};
    em.nodes_csv("field.csv", u);
  } else if (ex.task == "mountain-pass") {
    GridFunction phi = ex.phi ? enforce_zero_trace(*ex.phi) : GridFunction(prob.mesh);
    if (!ex.phi) {
      constexpr double kPi = 3.14159265358979323846;
      for (int i = 0; i < phi.size(); ++i) {
        const Point x = prob.mesh.node(i);
        phi[i] = std::sin(kPi * (x[0] - prob.mesh.lo(0)) /
                          (prob.mesh.hi(0) - prob.mesh.lo(0)));
        if (prob.mesh.dim() == 2)
          phi[i] *= std::sin(kPi * (x[1] - prob.mesh.lo(1)) /
                             (prob.mesh.hi(1) - prob.mesh.lo(1)));
      }
      phi = enforce_zero_trace(phi);
    }
    const MPGeometry geom = verify_mp_geometry(prob, phi, ex.solver);
    report["geometry"] = {{"r", geom.r}, {"rho", geom.rho}, {"t_star", geom.t_star}};
    const SolveReport rep = mountain_pass_solve(prob, geom, ex.solver);
    report["solve"] = solve_json(rep);
    em.nodes_csv("solution.csv", rep.solution);
    em.trace_csv("trace.csv", rep.trace);
    if (rep.status != SolveStatus::Converged) exit_code = 1;
  } else if (ex.task == "fountain") {
    const SubspaceLadder ladder = build_subspace_ladder(prob, ex.ladder_k, ex.solver);
    report["ladder"] = {{"eigenvalues", ladder.eigenvalues}, {"alpha", ladder.alpha}};
    const FountainResult res = fountain_search(prob, ladder, ex.solver);
    report["reaction_hypotheses"] = hypothesis_json(res.reaction_check);
    auto table = em.open("fountain.csv");
    table << "k,energy,grad_norm,sign_changes\n";
    json sols = json::array();
    for (size_t k = 0; k < res.solutions.size(); ++k) {
      const SolveReport& rep = res.solutions[k];
      table << (k + 1) << ',' << fmt(rep.energy.total) << ',' << fmt(rep.grad_norm)
            << ',' << sign_changes(rep.solution) << '\n';
      em.nodes_csv("fountain_" + std::to_string(k + 1) + ".csv", rep.solution);
      sols.push_back(solve_json(rep));
    }
    report["solutions"] = sols;
    if (res.solutions.empty()) exit_code = 1;
  } else if (ex.task == "lambda1") {
    const Lambda1Result res = lambda1_minimize(prob, ex.solver);
    report["lambda1"] = {{"estimate", res.lambda1_est}, {"degenerate", res.degenerate}};
    report["kernel_hypotheses"] = hypothesis_json(res.kernel_check);
    report["reaction_hypotheses"] = hypothesis_json(res.reaction_check);
    auto table = em.open("lambda1.csv");
    table << "scale,quotient\n";
    for (const auto& [scale, quot] : res.sweep)
      table << fmt(scale) << ',' << fmt(quot) << '\n';
    if (res.minimizer) em.nodes_csv("minimizer.csv", *res.minimizer);
  } else {  // minimize-at-lambda
    if (!(ex.lambda > 0.0)) config_error("lambda", "must be > 0");
    const SolveReport rep = global_minimize_at_lambda(prob, ex.lambda, ex.solver);
    report["lambda"] = ex.lambda;
    report["solve"] = solve_json(rep);
    em.nodes_csv("solution.csv", rep.solution);
  }

  const auto t1 = std::chrono::steady_clock::now();
  {
    // wall-clock timings live in their own file so the report and the CSVs
    // stay byte-identical across reruns
    auto tf = em.open("timings.txt");
    tf << "total_ms "
       << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
       << '\n';
  }
  report["files"] = em.files;
  {
    fs::create_directories(ex.out_dir);
    std::ofstream out(ex.out_dir / "run_report.json", std::ios::binary);
    out << report.dump(2) << '\n';
  }
  logv("task " + ex.task + " finished with exit code " + std::to_string(exit_code));
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variable-exponent variational solver"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path;
  std::string out_dir, task;
  std::uint64_t seed = 0;
  bool has_seed = false;
  run->add_option("config", config_path, "path to the JSON config")->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--task", task, "task override");
  run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
    has_seed = true;
  });
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config file '" << config_path << "'\n";
      return 1;
    }
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "error: config parse failure: " << e.what() << "\n";
      return 1;
    }
    const Experiment ex = parse_config(
        cfg, task.empty() ? std::nullopt : std::optional<std::string>(task),
        has_seed ? std::optional<std::uint64_t>(seed) : std::nullopt,
        out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir));
    return run_task(ex);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
