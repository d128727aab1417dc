#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <string>

#include <fplab/config.hpp>

using namespace fplab;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* kBasePicard =
    "operator.name = affine\n"
    "operator.dim = 2\n"
    "operator.scale = 0.5\n"
    "operator.offset = 1.0\n"
    "solver.name = picard\n"
    "solver.eps = 1e-3\n";

}  // namespace

TEST_CASE("config text parses keys, comments, and blank lines", "[config]") {
  ConfigDoc doc = parse_config_text(
      "# full-line comment\n"
      "\n"
      "operator.name = identity   # trailing comment\n"
      "operator.dim=3\r\n"
      "  run.id  =  trial one  \n",
      "demo.cfg");
  CHECK(doc.source == "demo.cfg");
  CHECK(doc.entries.size() == 3);
  CHECK(doc.entries.at("operator.name").value == "identity");
  CHECK(doc.entries.at("operator.name").line == 3);
  CHECK(doc.entries.at("operator.dim").value == "3");
  CHECK(doc.entries.at("operator.dim").line == 4);
  CHECK(doc.entries.at("run.id").value == "trial one");
  CHECK(doc.has("run.id"));
  CHECK_FALSE(doc.has("run.seed"));
}

TEST_CASE("config parse errors carry the source and line number", "[config]") {
  CHECK_THROWS_WITH(parse_config_text("just words\n", "f.cfg"),
                    ContainsSubstring("f.cfg:1") &&
                        ContainsSubstring("expected 'section.key = value'"));
  CHECK_THROWS_WITH(parse_config_text("nodot = 1\n", "f.cfg"),
                    ContainsSubstring("section.key") && ContainsSubstring("nodot"));
  CHECK_THROWS_WITH(parse_config_text("a. = 1\n", "f.cfg"),
                    ContainsSubstring("section.key"));
  CHECK_THROWS_WITH(parse_config_text("run.id =\n", "f.cfg"),
                    ContainsSubstring("empty value for 'run.id'"));
  CHECK_THROWS_WITH(
      parse_config_text("run.seed = 1\nrun.seed = 2\n", "f.cfg"),
      ContainsSubstring("f.cfg:2") && ContainsSubstring("duplicate key 'run.seed'") &&
          ContainsSubstring("line 1"));
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("run plan picks up operator, solver, and run keys", "[config]") {
  std::string text = std::string(kBasePicard) +
                     "run.max_queries = 500\n"
                     "run.trace_every = 2\n"
                     "run.seed = 9\n"
                     "run.id = demo\n"
                     "run.out = /tmp/demo_trace.csv\n"
                     "run.format = jsonl\n";
  RunPlan plan = build_run_plan(parse_config_text(text));
  CHECK(plan.op.label() == "affine");
  CHECK(plan.op.dim() == 2);
  CHECK(plan.solver_name == "picard");
  CHECK(plan.solver.target_eps == 1e-3);
  CHECK(plan.solver.max_queries == 500);
  CHECK(plan.solver.trace_every == 2);
  CHECK(plan.seed == 9);
  CHECK(plan.run_id == "demo");
  CHECK(plan.out_path == std::filesystem::path("/tmp/demo_trace.csv"));
  CHECK(plan.format == TraceFormat::Jsonl);
}

TEST_CASE("run plan defaults are applied when keys are absent", "[config]") {
  RunPlan plan = build_run_plan(parse_config_text(kBasePicard));
  CHECK(plan.seed == 42);
  CHECK(plan.run_id == "run");
  CHECK(plan.out_path.empty());
  CHECK(plan.format == TraceFormat::Csv);
  CHECK(plan.solver.max_queries == 1000000);
  CHECK(plan.solver.trace_every == 1);
}

TEST_CASE("executing a picard plan converges to the affine fixed point", "[config]") {
  RunPlan plan = build_run_plan(parse_config_text(kBasePicard));
  RunResult run = execute_plan(plan);
  CHECK(run.termination == Termination::TargetReached);
  // from the origin the residual is exactly sqrt(2)/2^k after k steps
  CHECK(run.total_iters == 12);  // evaluations, counting the start point
  CHECK(run.total_queries == 12);
  CHECK(run.final_residual ==
        Catch::Approx(std::sqrt(2.0) * std::pow(0.5, 11)).epsilon(1e-15));
  CHECK(run.final_point[0] == Catch::Approx(2.0).margin(1e-3));
}

TEST_CASE("unknown and inapplicable keys are rejected with line numbers", "[config]") {
  std::string stray = std::string(kBasePicard) + "operator.bogus = 1\n";
  CHECK_THROWS_WITH(build_run_plan(parse_config_text(stray)),
                    ContainsSubstring("unknown key 'operator.bogus' (line 7)"));

  // solver.lambda means nothing to picard, so it must not be silently eaten
  std::string inapplicable = std::string(kBasePicard) + "solver.lambda = 0.5\n";
  CHECK_THROWS_WITH(build_run_plan(parse_config_text(inapplicable)),
                    ContainsSubstring("unknown key 'solver.lambda'"));

  std::string two = std::string(kBasePicard) + "x.a = 1\nx.b = 2\n";
  CHECK_THROWS_WITH(build_run_plan(parse_config_text(two)),
                    ContainsSubstring("unknown keys") && ContainsSubstring("'x.a' (line 7)") &&
                        ContainsSubstring("'x.b' (line 8)"));
}

TEST_CASE("solver-specific requirements are enforced", "[config]") {
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 2\n"
                                                     "solver.name = ghal\n")),
                    ContainsSubstring("ghal requires D"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 2\n"
                                                     "solver.name = fixhal\n")),
                    ContainsSubstring("missing required key 'solver.lambda'"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 2\n"
                                                     "solver.name = gradient\n")),
                    ContainsSubstring("unknown solver name 'gradient'"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = mystery\n"
                                                     "solver.name = picard\n")),
                    ContainsSubstring("unknown operator name 'mystery'"));
}

TEST_CASE("value validation points at the offending key", "[config]") {
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = linear_scale\n"
                                                     "operator.dim = 2\n"
                                                     "operator.gamma = abc\n"
                                                     "solver.name = picard\n")),
                    ContainsSubstring("value 'abc' for 'operator.gamma' is not a real number"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 2\n"
                                                     "solver.name = picard\n"
                                                     "run.max_queries = -5\n")),
                    ContainsSubstring("not a non-negative integer"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 0\n"
                                                     "solver.name = picard\n")),
                    ContainsSubstring("'operator.dim' is not a positive integer"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 2\n"
                                                     "operator.norm = sup\n"
                                                     "solver.name = picard\n")),
                    ContainsSubstring("'l2' or 'linf'"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 2\n"
                                                     "solver.name = ghal\n"
                                                     "solver.D = 2\n"
                                                     "solver.halt_mode = stop\n")),
                    ContainsSubstring("'halt' or 'break_revert'"));
  CHECK_THROWS_WITH(build_run_plan(parse_config_text("operator.name = identity\n"
                                                     "operator.dim = 2\n"
                                                     "solver.name = picard\n"
                                                     "run.format = yaml\n")),
                    ContainsSubstring("'csv' or 'jsonl'"));
}

TEST_CASE("every operator name in the table builds", "[config]") {
  auto build = [](const std::string& operator_lines) {
    ConfigDoc doc = parse_config_text(operator_lines + "solver.name = picard\n");
    return build_run_plan(doc).op;
  };
  CHECK(build("operator.name = identity\noperator.dim = 3\n").label() == "identity");
  CHECK(build("operator.name = linear_scale\noperator.dim = 3\noperator.gamma = 0.5\n")
            .gamma_known() == 0.5);
  CHECK(build("operator.name = rotation_hard\noperator.dim = 4\noperator.gamma = 1\n"
              "operator.literal = true\n")
            .label() == "rotation_hard");
  CHECK(build("operator.name = piecewise_scale\noperator.dim = 1\noperator.gamma = 1.01\n"
              "operator.c = 0.5\n")
            .label() == "piecewise_scale");
  CHECK(build("operator.name = piecewise_slope\noperator.dim = 2\noperator.m_near = 1\n"
              "operator.m_far = 0.5\noperator.parity = odd\n")
            .label() == "piecewise_slope");
  CHECK(build("operator.name = ball_projection\noperator.dim = 3\n").diameter() == 2.0);
  CHECK(build("operator.name = box_projection\noperator.dim = 2\noperator.lo = -1\n"
              "operator.hi = 1\n")
            .label() == "box_projection");
  CHECK(build("operator.name = exp_shift\noperator.dim = 1\noperator.alpha = 0.4\n"
              "operator.D = 2\n")
            .norm() == NormKind::SupLinf);
  CHECK(build("operator.name = rotation_slope\noperator.dim = 4\noperator.m_near = 1\n"
              "operator.m_far = 0.25\n")
            .label() == "rotation_slope");
  OperatorSpec brs = build(
      "operator.name = ball_rotation_scale\noperator.dim = 4\noperator.gamma = 1.001\n"
      "operator.c = 0.5\n");
  CHECK(brs.label() == "ball_rotation_scale");
  CHECK(brs.gamma_known() == 1.001);
  CHECK(build("operator.name = affine\noperator.dim = 2\noperator.scale = 0.5\n").label() ==
        "affine");
}
