#pragma once

// Experiment harness: named presets that reproduce the benchmark grids, a
// runner that executes every cell and serializes traces plus a summary
// table, and a verification suite that certifies the operator zoo and
// cross-checks the iteration bounds against live runs.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fplab/bounds.hpp"
#include "fplab/config.hpp"
#include "fplab/operators.hpp"
#include "fplab/oracle.hpp"
#include "fplab/solvers.hpp"
#include "fplab/trace_io.hpp"
#include "fplab/verify.hpp"

namespace fplab {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1a", "fig1b", "fig1c",
                                                 "fig2",  "fig3",  "fig4"};
  return names;
}

inline bool is_preset(const std::string& name) {
  for (const std::string& n : preset_names()) {
    if (n == name) return true;
  }
  return false;
}

namespace detail {

inline ConfigDoc preset_cell_base(const std::string& preset, const std::string& token,
                                  const std::string& algorithm, std::uint64_t max_queries,
                                  std::uint64_t trace_every) {
  ConfigDoc doc;
  doc.source = preset;
  doc.set("solver.name", algorithm);
  doc.set("solver.eps", "1e-08");
  doc.set("run.max_queries", std::to_string(max_queries));
  doc.set("run.trace_every", std::to_string(trace_every));
  doc.set("run.id", preset + "_" + token + "_" + algorithm);
  return doc;
}

}  // namespace detail

// The per-cell run configurations of a preset, in execution order.  Cells are
// plain config documents, so a hand-written config file with the same keys
// reproduces any cell byte-for-byte.
inline std::vector<ConfigDoc> preset_cells(const std::string& name) {
  std::vector<ConfigDoc> cells;
  const std::vector<std::string> anchored = {"picard", "halpern", "restarted_halpern",
                                             "adaghal"};

  if (name == "fig1a" || name == "fig1b" || name == "fig1c") {
    // Rotation instance in dimension 500 at gamma = 1, 10/11, 5/6.
    double gamma = 1.0;
    std::string token = "gamma1";
    if (name == "fig1b") {
      gamma = 10.0 / 11.0;
      token = "gamma10over11";
    } else if (name == "fig1c") {
      gamma = 5.0 / 6.0;
      token = "gamma5over6";
    }
    for (const std::string& algo : anchored) {
      ConfigDoc doc = detail::preset_cell_base(name, token, algo, 20000, 1);
      doc.set("operator.name", "rotation_hard");
      doc.set("operator.dim", "500");
      doc.set("operator.gamma", detail::format_double(gamma));
      cells.push_back(std::move(doc));
    }
    return cells;
  }

  if (name == "fig2" || name == "fig3") {
    // Rotation composed with the two-slope coordinatewise map in dimension
    // 500; fig2 flattens the far branch (slope c beyond the knot), fig3 the
    // near one.
    for (const char* c : {"0.25", "0.5", "0.75"}) {
      for (const std::string& algo : anchored) {
        ConfigDoc doc = detail::preset_cell_base(name, std::string("c") + c, algo, 20000, 1);
        doc.set("operator.name", "rotation_slope");
        doc.set("operator.dim", "500");
        doc.set("operator.m_near", name == "fig2" ? "1" : c);
        doc.set("operator.m_far", name == "fig2" ? c : "1");
        cells.push_back(std::move(doc));
      }
    }
    return cells;
  }

  if (name == "fig4") {
    // Projected mildly expansive instance in dimension 100, swept over the
    // knee location c and the expansion factor gamma.
    for (const char* c : {"0.1", "0.5", "0.9"}) {
      for (const char* gamma : {"1.0001", "1.001", "1.01"}) {
        const std::string token = std::string("c") + c + "_gamma" + gamma;
        for (const char* algo : {"picard", "halpern", "restarted_halpern", "ghal"}) {
          ConfigDoc doc = detail::preset_cell_base(name, token, algo, 100000, 10);
          doc.set("operator.name", "ball_rotation_scale");
          doc.set("operator.dim", "100");
          doc.set("operator.gamma", gamma);
          doc.set("operator.c", c);
          if (std::string(algo) == "ghal") {
            doc.set("solver.D", "2");
            doc.set("solver.beta", "0.975");
            doc.set("solver.beta_prime", detail::format_double(1.0 / 1.01));
            doc.set("solver.halt_mode", "break_revert");
          }
          cells.push_back(std::move(doc));
        }
      }
    }
    return cells;
  }

  throw ConfigError("unknown preset '" + name + "' (available: fig1a fig1b fig1c fig2 fig3 fig4)");
}

// Bare override keys accepted on the command line expand to their qualified
// config names; dotted keys pass through untouched.
inline std::string expand_override_key(const std::string& key) {
  if (key.find('.') != std::string::npos) return key;
  static const std::map<std::string, std::string> aliases = {
      {"d", "operator.dim"},          {"dim", "operator.dim"},
      {"gamma", "operator.gamma"},    {"c", "operator.c"},
      {"eps", "solver.eps"},          {"seed", "run.seed"},
      {"max_queries", "run.max_queries"}, {"budget", "run.max_queries"},
      {"trace_every", "run.trace_every"}, {"format", "run.format"}};
  auto it = aliases.find(key);
  if (it == aliases.end()) {
    throw ConfigError("unknown override key '" + key + "' (use section.key or one of: "
                      "d, dim, gamma, c, eps, seed, max_queries, budget, trace_every, format)");
  }
  return it->second;
}

struct HarnessRun {
  RunMeta meta;
  RunResult result;
  std::filesystem::path trace_path;
};

struct PresetReport {
  std::vector<HarnessRun> runs;
  std::filesystem::path summary_path;
};

inline HarnessRun execute_and_export(const RunPlan& plan,
                                     const std::filesystem::path& fallback_dir) {
  RunResult result = execute_plan(plan);
  RunMeta meta{plan.run_id, plan.solver_name, plan.op.label(), plan.seed};
  const char* ext = plan.format == TraceFormat::Csv ? ".csv" : ".jsonl";
  std::filesystem::path trace_path =
      plan.out_path.empty() ? fallback_dir / (plan.run_id + ext) : plan.out_path;
  export_trace(result, meta, trace_path, plan.format);
  return HarnessRun{std::move(meta), std::move(result), std::move(trace_path)};
}

// Runs every cell of a preset, writes one trace file per cell into out_dir,
// and finishes with {preset}_summary.csv listing final residual, query count,
// and termination reason per run.
inline PresetReport run_preset(
    const std::string& name, const std::filesystem::path& out_dir,
    const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  std::vector<ConfigDoc> cells = preset_cells(name);
  PresetReport report;
  std::string summary = "run_id,algorithm,operator,final_residual,total_queries,termination\n";
  for (ConfigDoc& doc : cells) {
    for (const auto& [key, value] : overrides) {
      doc.set(expand_override_key(key), value);
    }
    RunPlan plan = build_run_plan(doc);
    HarnessRun run = execute_and_export(plan, out_dir);
    summary += run.meta.run_id + ',' + run.meta.algorithm + ',' + run.meta.operator_label +
               ',' + detail::format_double(run.result.final_residual) + ',' +
               std::to_string(run.result.total_queries) + ',' +
               to_string(run.result.termination) + '\n';
    report.runs.push_back(std::move(run));
  }
  report.summary_path = out_dir / (name + "_summary.csv");
  detail::write_file_atomic(report.summary_path, summary);
  return report;
}

// ---------------------------------------------------------------------------
// Oracle-validity helpers: run a solver against the iteration-count formulas
// and report whether the live trajectory honored them.

struct FixedStepOracleReport {
  double lambda = 0.0;
  std::uint64_t k_bound = 0;
  double eps0 = 0.0;
  double d_star = 0.0;
  bool reached_within_bound = false;
  std::uint64_t first_hit_iter = 0;
  bool envelope_ok = false;
  double worst_envelope_excess = 0.0;
  RunResult result;
};

// Fixed-step anchored run on the rotation instance with the step size and
// iteration count taken from the contractive/nonexpansive bound; checks both
// that the target is hit by iterate k and that every recorded residual stays
// under the geometric-plus-floor envelope.
inline FixedStepOracleReport run_fixed_step_oracle(std::size_t d, double gamma, double eps,
                                                   double envelope_slack = 1e-9) {
  FixedStepOracleReport rep;
  OperatorSpec op = make_rotation_hard(d, gamma);
  const double s = std::get<RotationHardOp>(op.variant()).s;
  RealVector x0 = RealVector::zeros(d);
  RealVector xstar = rotation_hard_fixed_point(d, gamma, s);
  rep.d_star = distance(x0, xstar, NormKind::EuclideanL2);

  std::vector<double> image;
  apply_operator(op, x0.coords(), image);
  rep.eps0 = distance_of(image, x0.coords(), NormKind::EuclideanL2);

  BoundInputs in;
  in.eps0 = rep.eps0;
  in.eps = eps;
  in.gamma = gamma;
  in.D_star = rep.d_star;
  BoundValue bound = bound_fixed_step(in);
  rep.lambda = bound.lambda;
  rep.k_bound = bound.k;

  SolverConfig cfg;
  cfg.target_eps = eps;
  cfg.max_queries = bound.k + 16;
  CountedOperator counted(op, cfg.max_queries);
  rep.result = fixhal(counted, x0, rep.lambda, cfg);

  rep.first_hit_iter = std::numeric_limits<std::uint64_t>::max();
  rep.envelope_ok = true;
  const double floor_term = 2.0 * rep.lambda / (1.0 - rep.lambda) * rep.d_star;
  for (const TraceRecord& rec : rep.result.trace.records()) {
    if (rec.residual <= eps && rec.iter < rep.first_hit_iter) rep.first_hit_iter = rec.iter;
    const double decay = std::pow((1.0 - rep.lambda) * gamma, static_cast<double>(rec.iter));
    const double envelope = decay * rep.eps0 + floor_term + envelope_slack;
    const double excess = rec.residual - envelope;
    if (excess > rep.worst_envelope_excess) rep.worst_envelope_excess = excess;
    if (excess > 0.0) rep.envelope_ok = false;
  }
  rep.reached_within_bound = rep.first_hit_iter <= rep.k_bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Verification suite: sampling certificates for the operator zoo, negative
// controls that must fail with a reproducible witness, and live cross-checks
// of every iteration bound.

struct SuiteEntry {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  bool all_passed = true;
  std::filesystem::path summary_path;
};

namespace detail {

// Re-evaluates the Lipschitz ratio of a witness pair (uncounted queries).
inline double witness_ratio(const OperatorSpec& op,
                            const std::pair<RealVector, RealVector>& w) {
  std::vector<double> iu, iv;
  apply_operator(op, w.first.coords(), iu);
  apply_operator(op, w.second.coords(), iv);
  const double sep = distance(w.first, w.second, op.norm());
  return distance_of(iu, iv, op.norm()) / sep;
}

// Re-evaluates the gradual-expansion excess of a witness pair: positive
// means the pair genuinely violates the certified inequality.
inline double witness_gradexp_excess(const OperatorSpec& op, double D, double alpha,
                                     const std::pair<RealVector, RealVector>& w, double tol) {
  std::vector<double> iu, iv;
  apply_operator(op, w.first.coords(), iu);
  apply_operator(op, w.second.coords(), iv);
  const double sep = distance(w.first, w.second, op.norm());
  const double res_u = distance_of(iu, w.first.coords(), op.norm());
  const double res_v = distance_of(iv, w.second.coords(), op.norm());
  const double lhs = distance_of(iu, iv, op.norm());
  const double rhs = (1.0 + alpha * std::max(res_u, res_v) / D) * sep + tol;
  return lhs - rhs;
}

}  // namespace detail

inline SuiteResult verify_suite(const std::filesystem::path& out_dir,
                                std::uint64_t seed = 42) {
  SuiteResult suite;
  auto add = [&suite](const std::string& name, bool ok, const std::string& detail) {
    suite.entries.push_back(SuiteEntry{name, ok, detail});
    if (!ok) suite.all_passed = false;
  };
  auto fmt = [](double v) { return detail::format_double(v); };
  constexpr std::uint64_t kPairs = 100000;
  constexpr double kTol = 1e-10;

  // --- Lipschitz certificates -------------------------------------------
  {
    OperatorSpec op = make_identity(5);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 5, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_identity", rep.passed && !rep.inconclusive, "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_linear_scale(0.7, 3);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 3, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_linear_scale", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_rotation_hard(20, 1.0);
    DomainSampler s(BallRegion{2.0}, 20, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_rotation_gamma1", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_rotation_hard(20, 5.0 / 6.0);
    DomainSampler s(BallRegion{2.0}, 20, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_rotation_gamma5over6", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_piecewise_scale(1.01, 0.5, 4);
    DomainSampler s(BoxRegion{-1.5, 1.5}, 4, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_piecewise_scale", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_piecewise_slope(1.0, 0.5, 4);
    DomainSampler s(BoxRegion{-2.0, 2.0}, 4, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_piecewise_slope", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_ball_projection(6);
    DomainSampler s(BoxRegion{-2.0, 2.0}, 6, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_ball_projection", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_ball_rotation_scale(50, 1.001, 0.5);
    DomainSampler s(BallRegion{1.2}, 50, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs);
    add("lipschitz_fig4_composite", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    // Negative control: a 1.5-Lipschitz map certified against claim 1.0 must
    // fail, and its witness pair must reproduce the violation on re-eval.
    OperatorSpec op = make_linear_scale(1.5, 2);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 2, seed);
    CheckReport rep = estimate_lipschitz(op, s, kPairs, 1.0);
    bool reproduced = false;
    if (!rep.passed && rep.witness) {
      reproduced = detail::witness_ratio(op, *rep.witness) > 1.0 * (1.0 + 1e-9);
    }
    add("lipschitz_negative_control", !rep.passed && reproduced,
        "worst=" + fmt(rep.worst_ratio));
  }

  // --- Gradual-expansion certificates ------------------------------------
  {
    OperatorSpec op = make_exp_shift(0.4, 2.0, 1);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 1, seed);
    CheckReport rep = check_gradually_expansive(op, 2.0, 0.4, s, kPairs, kTol);
    add("gradexp_exp_shift_d1", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec op = make_exp_shift(0.4, 2.0, 8);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 8, seed);
    CheckReport rep = check_gradually_expansive(op, 2.0, 0.4, s, kPairs, kTol);
    add("gradexp_exp_shift_d8", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    // Negative control: uniform expansion violates the definition everywhere.
    OperatorSpec op = make_linear_scale(1.5, 2);
    const double diam = 2.0 * std::sqrt(2.0);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 2, seed);
    CheckReport rep = check_gradually_expansive(op, diam, 0.4, s, kPairs, kTol);
    bool reproduced = false;
    if (!rep.passed && rep.witness) {
      reproduced = detail::witness_gradexp_excess(op, diam, 0.4, *rep.witness, kTol) > 0.0;
    }
    add("gradexp_negative_control", !rep.passed && reproduced,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    // Alpha closure: a certificate at alpha = 0.4 must imply one at 0.8 on
    // the identical sample stream.
    OperatorSpec op = make_exp_shift(0.4, 2.0, 8);
    DomainSampler s1(BoxRegion{-1.0, 1.0}, 8, seed);
    CheckReport r04 = check_gradually_expansive(op, 2.0, 0.4, s1, kPairs, kTol);
    DomainSampler s2(BoxRegion{-1.0, 1.0}, 8, seed);
    CheckReport r08 = check_gradually_expansive(op, 2.0, 0.8, s2, kPairs, kTol);
    add("gradexp_alpha_closure", r04.passed && r08.passed,
        "alpha04=" + std::string(r04.passed ? "pass" : "fail") +
            ";alpha08=" + std::string(r08.passed ? "pass" : "fail"));
  }
  {
    // Displacement-field route: where the displacement condition certifies,
    // the gradual-expansion certificate must hold on the same samples.  The
    // box stays inside the unclipped region of the exponential shift.
    OperatorSpec opT = make_exp_shift(0.4, 2.0, 8);
    OperatorSpec opF = make_sum({opT, make_affine(-1.0, {}, 8, NormKind::SupLinf)});
    DomainSampler s1(BoxRegion{-1.0, -0.1}, 8, seed);
    CheckReport rf = check_F_condition(opF, 2.0, 0.4, s1, kPairs, kTol);
    DomainSampler s2(BoxRegion{-1.0, -0.1}, 8, seed);
    CheckReport rt = check_gradually_expansive(opT, 2.0, 0.4, s2, kPairs, kTol);
    add("fcond_implies_gradexp", rf.passed && rt.passed,
        "fcond=" + std::string(rf.passed ? "pass" : "fail") +
            ";gradexp=" + std::string(rt.passed ? "pass" : "fail"));
  }
  {
    OperatorSpec opF = make_linear_scale(-0.3, 4);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 4, seed);
    CheckReport rep = check_hypomonotone(opF, 0.3, s, kPairs, kTol);
    add("hypomonotone_scale", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    OperatorSpec opF = make_identity(3);
    DomainSampler s(BoxRegion{-1.0, 1.0}, 3, seed);
    CheckReport rep = check_gradual_resolvent_condition(opF, 2.0, 0.4, s, kPairs, kTol);
    add("gradual_resolvent_identity", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    // Deterministic replay: identical seed, identical report.
    OperatorSpec op = make_rotation_hard(10, 5.0 / 6.0);
    DomainSampler s1(BallRegion{1.5}, 10, seed);
    DomainSampler s2(BallRegion{1.5}, 10, seed);
    CheckReport a = estimate_lipschitz(op, s1, 10000);
    CheckReport b = estimate_lipschitz(op, s2, 10000);
    add("deterministic_replay", a.worst_ratio == b.worst_ratio && a.passed == b.passed,
        "worst=" + fmt(a.worst_ratio));
  }

  // --- Frozen bound values ------------------------------------------------
  {
    BoundInputs in;
    in.eps0 = 1.0;
    in.eps = 0.01;
    in.gamma = 1.0;
    in.D_star = 1.0;
    BoundValue b = bound_fixed_step(in);
    add("bounds_fixed_step_frozen", b.k == 2122 && b.lambda == 0.01 / 4.01,
        "lambda=" + fmt(b.lambda) + ";k=" + std::to_string(b.k));
  }
  {
    BoundValue b = bound_leb(0.5, 1.0);
    add("bounds_leb_frozen", b.lambda == 1.0 / 9.0 && b.k == 12,
        "lambda=" + fmt(b.lambda) + ";k=" + std::to_string(b.k));
  }
  {
    const double eps_bar = bound_ghal_expansive_error(2.0, 1.0001, 0.975, 1.0 / 1.01);
    add("bounds_ghal_error_frozen", eps_bar == 0.021249178172252737,
        "eps_bar=" + fmt(eps_bar));
  }

  // --- Oracle validity: live runs against the bound formulas --------------
  {
    FixedStepOracleReport rep = run_fixed_step_oracle(100, 1.0, 1e-2);
    add("oracle_fixed_step_rotation", rep.reached_within_bound && rep.envelope_ok,
        "k=" + std::to_string(rep.k_bound) + ";hit=" + std::to_string(rep.first_hit_iter) +
            ";excess=" + fmt(rep.worst_envelope_excess));
  }
  {
    // Mild expansion: step size and count from the mild bound, run on the
    // projected expansive composite (iterates stay in the unit ball, so the
    // D = 2 domain requirement holds).
    OperatorSpec op = make_ball_rotation_scale(100, 1.001, 0.5);
    RealVector x0 = RealVector::zeros(100);
    std::vector<double> image;
    apply_operator(op, x0.coords(), image);
    const double eps0 = distance_of(image, x0.coords(), op.norm());

    BoundInputs in;
    in.eps0 = eps0;
    in.eps = 0.01;
    in.gamma = 1.001;
    in.D = 2.0;
    in.beta = 0.5;
    BoundValue bound = bound_mild(in);

    SolverConfig cfg;
    cfg.target_eps = in.eps;
    cfg.max_queries = bound.k + 16;
    CountedOperator counted(op, cfg.max_queries);
    RunResult run = fixhal(counted, x0, bound.lambda, cfg);
    std::uint64_t hit = std::numeric_limits<std::uint64_t>::max();
    for (const TraceRecord& rec : run.trace.records()) {
      if (rec.residual <= in.eps) {
        hit = rec.iter;
        break;
      }
    }
    add("oracle_mild_fixed_step", hit <= bound.k,
        "k=" + std::to_string(bound.k) + ";hit=" + std::to_string(hit));
  }
  {
    // Nonexpansive GHAL: target reached, safeguard silent.
    OperatorSpec op = make_rotation_hard(20, 1.0);
    SolverConfig cfg;
    cfg.target_eps = 1e-4;
    cfg.max_queries = 100000;
    cfg.D = 2.0;
    CountedOperator counted(op, cfg.max_queries);
    RunResult run = ghal(counted, RealVector::zeros(20), cfg);
    add("oracle_ghal_nonexpansive",
        run.termination == Termination::TargetReached && run.final_residual <= 1e-4,
        "queries=" + std::to_string(run.total_queries) + ";final=" +
            fmt(run.final_residual));
  }
  {
    // Increment contraction along a fixed-step anchored trajectory.
    OperatorSpec op = make_rotation_hard(10, 5.0 / 6.0);
    SolverConfig cfg;
    cfg.target_eps = 1e-13;
    cfg.max_queries = 200;
    CountedOperator counted(op, cfg.max_queries);
    RunResult run = fixhal(counted, RealVector::zeros(10), 0.3, cfg);
    CheckReport rep = check_increment_contraction(run.trace, 0.3, 1.0 / 1.01);
    add("increment_contraction_fixhal", rep.passed && !rep.inconclusive,
        "worst=" + fmt(rep.worst_ratio));
  }
  {
    // Error-bound regime: every restart phase must finish within the phase
    // budget coming from the error-bound step size.
    OperatorSpec op = make_linear_scale(0.5, 3);
    BoundValue bound = bound_leb(0.5, 0.5);
    SolverConfig cfg;
    cfg.target_eps = 1e-6;
    cfg.max_queries = 10000;
    cfg.mu = 0.5;
    CountedOperator counted(op, cfg.max_queries);
    RunResult run = fixhal_restarted(counted, RealVector({2.0, 2.0, 2.0}), cfg);
    // Records within one phase span its iterates; phase 0 additionally
    // contains the start record, and each later phase's anchor is the record
    // that closed the previous one, so phase p >= 1 has `count` iterates and
    // phase 0 has `count - 1`.
    std::map<std::uint64_t, std::uint64_t> phase_sizes;
    for (const TraceRecord& rec : run.trace.records()) {
      if (rec.phase) ++phase_sizes[*rec.phase];
    }
    std::uint64_t longest = 0;
    for (const auto& [phase, count] : phase_sizes) {
      const std::uint64_t len = (phase == 0 && count > 0) ? count - 1 : count;
      if (len > longest) longest = len;
    }
    add("oracle_restarted_error_bound",
        run.termination == Termination::TargetReached && longest <= bound.k,
        "phase_budget=" + std::to_string(bound.k) + ";longest=" + std::to_string(longest));
  }

  std::string summary = "check,ok,detail\n";
  for (const SuiteEntry& e : suite.entries) {
    summary += e.name + ',' + (e.ok ? "pass" : "fail") + ',' + e.detail + '\n';
  }
  suite.summary_path = out_dir / "verify_summary.csv";
  detail::write_file_atomic(suite.summary_path, summary);
  return suite;
}

}  // namespace fplab
