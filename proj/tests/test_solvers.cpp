#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <fplab/operators.hpp>
#include <fplab/oracle.hpp>
#include <fplab/solvers.hpp>

using namespace fplab;

TEST_CASE("picard on a univariate contraction matches the closed form", "[solvers]") {
  OperatorSpec op = make_linear_scale(0.5, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-3;
  cfg.max_queries = 100;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = picard(counted, RealVector({1.0}), cfg);
  CHECK(run.termination == Termination::TargetReached);
  CHECK(run.total_iters == 10);  // evaluations, counting the start point
  CHECK(run.total_queries == 10);
  CHECK(run.final_residual == 0.0009765625);  // 0.5^10 exactly
}

TEST_CASE("classic halpern keeps the 1/(k+1) anchor weight", "[solvers]") {
  // T = 0 from x0 = 1: the iterate is exactly x_k = 1/(k+1).
  OperatorSpec op = make_linear_scale(0.0, 1);
  SolverConfig cfg;
  cfg.target_eps = 0.17;
  cfg.max_queries = 100;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = halpern_classic(counted, RealVector({1.0}), cfg);
  CHECK(run.termination == Termination::TargetReached);
  const TraceRecord& last = run.trace.records().back();
  CHECK(last.iter == 5);
  CHECK(last.residual == 1.0 / 6.0);
  CHECK(last.lambda == 1.0 / 6.0);
  // start record carries the anchor itself
  CHECK(run.trace.records().front().lambda == 1.0);
}

TEST_CASE("fixed-step anchored iteration settles at its biased limit", "[solvers]") {
  // x* solves x = 0.5*x0 + 0.5*(T x) with T = 0.5x, x0 = 1: x* = 2/3.
  OperatorSpec op = make_linear_scale(0.5, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-300;  // unreachable: run to the budget
  cfg.max_queries = 201;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = fixhal(counted, RealVector({1.0}), 0.5, cfg);
  CHECK(run.termination == Termination::BudgetExhausted);
  CHECK(run.total_iters == 201);  // 200 steps plus the start evaluation
  // the residual plateaus at |T(x*) - x*| = x*/2 = 1/3
  CHECK(run.final_residual == Catch::Approx(1.0 / 3.0).margin(1e-10));
}

TEST_CASE("fixed-step increments satisfy the exact identity", "[solvers]") {
  // ||x_{k+1} - x_k|| = (1 - lambda) * ||T(x_k) - T(x_{k-1})|| holds for any
  // operator, by pure algebra of the anchored update.
  OperatorSpec op = make_rotation_hard(5, 0.9);
  const double lambda = 0.1;
  const std::vector<double> x0(5, 0.0);
  std::vector<double> x = x0, image, x_next, prev_image;
  apply_operator(op, x, image);
  double worst_rel = 0.0;
  double prev_image_dist = -1.0;
  for (int k = 0; k < 50; ++k) {
    combine_into(x0, image, lambda, x_next);
    const double disp = distance_of(x_next, x, NormKind::EuclideanL2);
    prev_image = image;
    x.swap(x_next);
    apply_operator(op, x, image);
    if (prev_image_dist >= 0.0) {
      const double rhs = (1.0 - lambda) * prev_image_dist;
      worst_rel = std::max(worst_rel, std::abs(disp - rhs) / rhs);
    }
    prev_image_dist = distance_of(image, prev_image, NormKind::EuclideanL2);
  }
  CHECK(worst_rel <= 1e-11);
}

TEST_CASE("restarted variant restarts on residual halving", "[solvers]") {
  OperatorSpec op = make_linear_scale(0.5, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-8;
  cfg.max_queries = 100000;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = fixhal_restarted(counted, RealVector({2.0}), cfg);
  CHECK(run.termination == Termination::TargetReached);
  CHECK(run.final_residual <= 1e-8);
  std::uint64_t max_phase = 0;
  std::uint64_t prev_queries = 0;
  for (const TraceRecord& rec : run.trace.records()) {
    REQUIRE(rec.phase.has_value());
    max_phase = std::max(max_phase, *rec.phase);
    CHECK(rec.queries > prev_queries);
    prev_queries = rec.queries;
  }
  CHECK(max_phase >= 3);  // the run actually restarted
}

TEST_CASE("ghal reaches the target on a nonexpansive instance", "[solvers]") {
  OperatorSpec op = make_rotation_hard(10, 1.0);
  SolverConfig cfg;
  cfg.target_eps = 1e-3;
  cfg.max_queries = 100000;
  cfg.D = 2.0;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = ghal(counted, RealVector::zeros(10), cfg);
  CHECK(run.termination == Termination::TargetReached);
  CHECK(run.final_residual <= 1e-3);
  // phases never decrease along the trace
  std::uint64_t prev_phase = 0;
  for (const TraceRecord& rec : run.trace.records()) {
    REQUIRE(rec.phase.has_value());
    CHECK(*rec.phase >= prev_phase);
    prev_phase = *rec.phase;
  }
}

TEST_CASE("ghal requires a diameter estimate", "[solvers]") {
  OperatorSpec op = make_rotation_hard(4, 1.0);
  SolverConfig cfg;
  CountedOperator counted(op);
  CHECK_THROWS_AS(ghal(counted, RealVector::zeros(4), cfg), std::invalid_argument);
}

TEST_CASE("ghal safeguard halts on a uniformly expansive map", "[solvers]") {
  // Expansion 1.5 inside |x| <= 1: displacements grow and the safeguard fires.
  OperatorSpec op = make_piecewise_scale(1.5, 0.0, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-6;
  cfg.max_queries = 10000;
  cfg.D = 2.0;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = ghal(counted, RealVector({0.05}), cfg);
  CHECK(run.termination == Termination::SafeguardHalt);
  // the returned point is the best of the inner anchor and last iterate
  double best = 1e300;
  for (const TraceRecord& rec : run.trace.records()) best = std::min(best, rec.residual);
  CHECK(run.final_residual <= best + 1e-15);
}

TEST_CASE("ghal break-revert freezes the anchor weight instead of halting", "[solvers]") {
  OperatorSpec op = make_piecewise_scale(1.5, 0.0, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-6;
  cfg.max_queries = 400;
  cfg.D = 2.0;
  cfg.halt_mode = HaltMode::BreakRevert;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = ghal(counted, RealVector({0.05}), cfg);
  CHECK(run.termination != Termination::SafeguardHalt);
  // after the first safeguard trip the recorded lambda never changes again
  bool frozen_seen = false;
  double frozen_lambda = -1.0;
  std::uint64_t trip_phase = 0;
  for (const TraceRecord& rec : run.trace.records()) {
    if (!rec.phase) continue;
    if (!frozen_seen && *rec.phase >= 2) {
      frozen_seen = true;
      frozen_lambda = rec.lambda;
      trip_phase = *rec.phase;
    } else if (frozen_seen && *rec.phase > trip_phase) {
      CHECK(rec.lambda == frozen_lambda);
    }
  }
  CHECK(frozen_seen);
}

TEST_CASE("adaghal reaches the target on the rotation instance", "[solvers]") {
  OperatorSpec op = make_rotation_hard(4, 1.0);
  SolverConfig cfg;
  cfg.target_eps = 1e-4;
  cfg.max_queries = 1000000;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = adaghal(counted, RealVector::zeros(4), cfg);
  CHECK(run.termination == Termination::TargetReached);
  CHECK(run.final_residual <= 1e-4);
}

TEST_CASE("adaghal doubles its diameter estimate exactly on guard events", "[solvers]") {
  // T(x) = 0.9x + 1 has its fixed point at 10, ten times the initial
  // residual, so the first stage must push the iterate well past the initial
  // estimate D = 1 and force at least one doubling.
  OperatorSpec op = make_affine(0.9, {1.0}, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-6;
  cfg.max_queries = 1000000;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = adaghal(counted, RealVector({0.0}), cfg);
  CHECK(run.termination == Termination::TargetReached);
  bool doubled = false;
  double prev_D = -1.0;
  for (const TraceRecord& rec : run.trace.records()) {
    REQUIRE(rec.D_estimate.has_value());
    if (prev_D > 0.0) {
      CHECK((*rec.D_estimate == prev_D || *rec.D_estimate == 2.0 * prev_D));
      if (*rec.D_estimate == 2.0 * prev_D) doubled = true;
    }
    prev_D = *rec.D_estimate;
  }
  CHECK(doubled);
}

TEST_CASE("adaghal univariate run is deterministic", "[solvers]") {
  OperatorSpec op = make_linear_scale(0.5, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-6;
  cfg.max_queries = 100000;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = adaghal(counted, RealVector({1.0}), cfg);
  CHECK(run.termination == Termination::TargetReached);
  CHECK(run.total_queries == 22);
  CHECK(run.final_residual <= 1e-6);
  CHECK(run.final_residual == Catch::Approx(6.1022631723350026e-07).epsilon(1e-12));
}

TEST_CASE("budget exhaustion returns the best evaluated iterate", "[solvers]") {
  OperatorSpec op = make_rotation_hard(4, 1.0);
  SolverConfig cfg;
  cfg.target_eps = 1e-12;
  cfg.max_queries = 5;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = picard(counted, RealVector::zeros(4), cfg);
  CHECK(run.termination == Termination::BudgetExhausted);
  CHECK(run.total_queries == 5);
  double best = 1e300;
  for (const TraceRecord& rec : run.trace.records()) best = std::min(best, rec.residual);
  CHECK(run.final_residual == best);
}

TEST_CASE("non-finite images end the run gracefully", "[solvers]") {
  OperatorSpec op = make_linear_scale(1e200, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-12;
  cfg.max_queries = 100;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = picard(counted, RealVector({1.0}), cfg);
  CHECK(run.termination == Termination::NonFinite);
}

TEST_CASE("trace subsampling still records the terminal iterate", "[solvers]") {
  OperatorSpec op = make_linear_scale(0.5, 1);
  SolverConfig cfg;
  cfg.target_eps = 1e-6;
  cfg.max_queries = 1000;
  cfg.trace_every = 7;
  CountedOperator counted(op, cfg.max_queries);
  RunResult run = picard(counted, RealVector({1.0}), cfg);
  CHECK(run.termination == Termination::TargetReached);
  const auto& recs = run.trace.records();
  REQUIRE(!recs.empty());
  CHECK(recs.back().iter == run.total_iters - 1);     // pending record flushed
  CHECK(recs.back().residual == run.final_residual);
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    CHECK(recs[i].queries < recs[i + 1].queries);     // strictly increasing
  }
}

TEST_CASE("resolvent evaluates the implicit averaged map", "[solvers]") {
  // T = 0: the resolvent at tau = 1 halves the input.
  OperatorSpec zero = make_linear_scale(0.0, 1);
  CountedOperator c0(zero);
  RealVector r0 = resolvent(c0, RealVector({0.8}), 1.0, 1e-12);
  CHECK(std::abs(r0[0] - 0.4) <= 1e-10);

  // T = identity: every point is fixed, bitwise.
  OperatorSpec id = make_identity(3);
  CountedOperator c1(id);
  RealVector x({0.1, -2.7, 3.14});
  RealVector r1 = resolvent(c1, x, 1.0, 1e-12);
  CHECK(r1.coords() == x.coords());

  // gamma too large for the implicit contraction: tau*gamma/(1+tau) >= 1.
  OperatorSpec big = make_linear_scale(3.0, 1);
  CountedOperator c2(big);
  CHECK_THROWS_AS(resolvent(c2, RealVector({1.0}), 1.0, 1e-12), ContractionFailure);
}
