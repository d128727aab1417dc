#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fplab/harness.hpp>

using namespace fplab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* leaf) {
  fs::path dir = fs::temp_directory_path() / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string cell_value(const ConfigDoc& doc, const char* key) {
  return doc.entries.at(key).value;
}

const std::vector<std::pair<std::string, std::string>> kSmallOverrides = {
    {"d", "10"}, {"max_queries", "500"}};

}  // namespace

TEST_CASE("preset tables have the expected shape and run ids", "[harness]") {
  CHECK(preset_names().size() == 6);
  CHECK(is_preset("fig1a"));
  CHECK(is_preset("fig4"));
  CHECK_FALSE(is_preset("fig5"));
  CHECK_THROWS_AS(preset_cells("fig5"), ConfigError);

  std::vector<ConfigDoc> fig1a = preset_cells("fig1a");
  REQUIRE(fig1a.size() == 4);
  CHECK(cell_value(fig1a[0], "run.id") == "fig1a_gamma1_picard");
  CHECK(cell_value(fig1a[3], "run.id") == "fig1a_gamma1_adaghal");
  CHECK(cell_value(fig1a[0], "operator.name") == "rotation_hard");
  CHECK(cell_value(fig1a[0], "operator.dim") == "500");
  CHECK(cell_value(fig1a[0], "operator.gamma") == "1");
  CHECK(cell_value(fig1a[0], "solver.eps") == "1e-08");

  std::vector<ConfigDoc> fig1c = preset_cells("fig1c");
  REQUIRE(fig1c.size() == 4);
  CHECK(cell_value(fig1c[1], "run.id") == "fig1c_gamma5over6_halpern");

  std::vector<ConfigDoc> fig2 = preset_cells("fig2");
  REQUIRE(fig2.size() == 12);
  CHECK(cell_value(fig2[0], "operator.m_near") == "1");
  CHECK(cell_value(fig2[0], "operator.m_far") == "0.25");

  std::vector<ConfigDoc> fig3 = preset_cells("fig3");
  REQUIRE(fig3.size() == 12);
  CHECK(cell_value(fig3[0], "operator.m_near") == "0.25");
  CHECK(cell_value(fig3[0], "operator.m_far") == "1");

  std::vector<ConfigDoc> fig4 = preset_cells("fig4");
  REQUIRE(fig4.size() == 36);
  CHECK(cell_value(fig4[0], "run.id") == "fig4_c0.1_gamma1.0001_picard");
  const ConfigDoc& ghal_cell = fig4[3];
  CHECK(cell_value(ghal_cell, "run.id") == "fig4_c0.1_gamma1.0001_ghal");
  CHECK(cell_value(ghal_cell, "solver.D") == "2");
  CHECK(cell_value(ghal_cell, "solver.halt_mode") == "break_revert");
  CHECK_FALSE(fig4[0].has("solver.D"));  // anchored runs take no D

  // every cell must survive plan construction
  for (const std::string& name : preset_names()) {
    for (const ConfigDoc& doc : preset_cells(name)) {
      CHECK_NOTHROW(build_run_plan(doc));
    }
  }
}

TEST_CASE("override keys expand to qualified config names", "[harness]") {
  CHECK(expand_override_key("d") == "operator.dim");
  CHECK(expand_override_key("dim") == "operator.dim");
  CHECK(expand_override_key("gamma") == "operator.gamma");
  CHECK(expand_override_key("budget") == "run.max_queries");
  CHECK(expand_override_key("seed") == "run.seed");
  CHECK(expand_override_key("solver.beta") == "solver.beta");  // dotted passthrough
  CHECK_THROWS_AS(expand_override_key("zeta"), ConfigError);
}

TEST_CASE("run_preset writes one trace per cell plus a summary", "[harness]") {
  const fs::path dir = fresh_dir("fplab_harness_preset");
  PresetReport report = run_preset("fig1a", dir, kSmallOverrides);
  REQUIRE(report.runs.size() == 4);

  const char* expected[] = {"fig1a_gamma1_picard", "fig1a_gamma1_halpern",
                            "fig1a_gamma1_restarted_halpern", "fig1a_gamma1_adaghal"};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(report.runs[i].meta.run_id == expected[i]);
    CHECK(report.runs[i].meta.seed == 42);
    CHECK(report.runs[i].trace_path == dir / (std::string(expected[i]) + ".csv"));
    CHECK(fs::exists(report.runs[i].trace_path));
    CHECK(report.runs[i].result.total_queries <= 500);
    // the trace file round-trips and matches the in-memory run
    ParsedTrace parsed = parse_trace_csv(report.runs[i].trace_path);
    CHECK(parsed.meta.run_id == expected[i]);
    CHECK(parsed.records.size() == report.runs[i].result.trace.records().size());
  }

  CHECK(report.summary_path == dir / "fig1a_summary.csv");
  std::string summary = slurp(report.summary_path);
  std::istringstream lines(summary);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "run_id,algorithm,operator,final_residual,total_queries,termination");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 4);
  CHECK(summary.find("fig1a_gamma1_picard,picard,rotation_hard,") != std::string::npos);
}

TEST_CASE("identical preset invocations produce identical bytes", "[harness]") {
  const fs::path dir1 = fresh_dir("fplab_harness_det1");
  const fs::path dir2 = fresh_dir("fplab_harness_det2");
  PresetReport r1 = run_preset("fig1a", dir1, kSmallOverrides);
  PresetReport r2 = run_preset("fig1a", dir2, kSmallOverrides);
  REQUIRE(r1.runs.size() == r2.runs.size());
  for (std::size_t i = 0; i < r1.runs.size(); ++i) {
    CHECK(slurp(r1.runs[i].trace_path) == slurp(r2.runs[i].trace_path));
  }
  CHECK(slurp(r1.summary_path) == slurp(r2.summary_path));
}

TEST_CASE("format override switches preset traces to jsonl", "[harness]") {
  const fs::path dir = fresh_dir("fplab_harness_jsonl");
  auto overrides = kSmallOverrides;
  overrides.emplace_back("format", "jsonl");
  PresetReport report = run_preset("fig1a", dir, overrides);
  for (const HarnessRun& run : report.runs) {
    CHECK(run.trace_path.extension() == ".jsonl");
    CHECK(fs::exists(run.trace_path));
  }
}

TEST_CASE("fixed-step oracle honors its iteration budget and envelope", "[harness]") {
  FixedStepOracleReport rep = run_fixed_step_oracle(20, 1.0, 1e-2);
  CHECK(rep.lambda > 0.0);
  CHECK(rep.k_bound > 0);
  CHECK(rep.reached_within_bound);
  CHECK(rep.first_hit_iter <= rep.k_bound);
  CHECK(rep.envelope_ok);
  CHECK(rep.worst_envelope_excess <= 0.0);
}

TEST_CASE("the verification suite passes end to end", "[harness]") {
  const fs::path dir = fresh_dir("fplab_harness_suite");
  SuiteResult suite = verify_suite(dir);
  CHECK(suite.entries.size() == 25);
  for (const SuiteEntry& e : suite.entries) {
    INFO(e.name << ": " << e.detail);
    CHECK(e.ok);
  }
  CHECK(suite.all_passed);
  REQUIRE(fs::exists(suite.summary_path));
  std::string summary = slurp(suite.summary_path);
  CHECK(summary.rfind("check,ok,detail\n", 0) == 0);
  CHECK(summary.find("oracle_fixed_step_rotation,pass,") != std::string::npos);
}
