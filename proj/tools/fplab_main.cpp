// Command-line front end: preset experiment runs, single config runs, the
// verification suite, and the iteration-bound calculators.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <fplab/fplab.hpp>

namespace {

using fplab::BoundInputs;
using fplab::BoundValue;

std::vector<std::pair<std::string, std::string>> parse_set_args(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const std::string& item : raw) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw CLI::ValidationError("--set", "expected key=value, got '" + item + "'");
    }
    overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return overrides;
}

// Seed precedence: --seed flag, then the FPLAB_SEED environment variable,
// then the built-in default (42).
std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("FPLAB_SEED");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw CLI::ValidationError("FPLAB_SEED", std::string("not an integer: '") + env + "'");
  }
  return static_cast<std::uint64_t>(v);
}

int cmd_run_preset(const std::string& name, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_flag,
                   const std::vector<std::string>& set_args) {
  auto overrides = parse_set_args(set_args);
  std::optional<std::uint64_t> seed = seed_flag ? seed_flag : env_seed();
  if (seed) overrides.emplace_back("run.seed", std::to_string(*seed));

  fplab::PresetReport report = fplab::run_preset(name, out_dir, overrides);
  for (const fplab::HarnessRun& run : report.runs) {
    std::printf("%-40s %-16s queries=%-8llu residual=%-12.6g %s\n",
                run.meta.run_id.c_str(), run.meta.operator_label.c_str(),
                static_cast<unsigned long long>(run.result.total_queries),
                run.result.final_residual, to_string(run.result.termination).c_str());
  }
  std::printf("summary: %s\n", report.summary_path.string().c_str());
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  fplab::RunPlan plan = fplab::build_run_plan(fplab::parse_config_file(config_path));
  if (plan.run_id == "run") {
    const std::string stem = std::filesystem::path(config_path).stem().string();
    if (!stem.empty()) plan.run_id = stem;
  }
  fplab::HarnessRun run = fplab::execute_and_export(plan, out_dir);
  std::printf("%s: queries=%llu residual=%.17g %s\n", run.meta.run_id.c_str(),
              static_cast<unsigned long long>(run.result.total_queries),
              run.result.final_residual, to_string(run.result.termination).c_str());
  std::printf("trace: %s\n", run.trace_path.string().c_str());
  return 0;
}

int cmd_verify(const std::string& out_dir, std::optional<std::uint64_t> seed_flag) {
  std::optional<std::uint64_t> seed = seed_flag ? seed_flag : env_seed();
  fplab::SuiteResult suite = fplab::verify_suite(out_dir, seed.value_or(42));
  for (const fplab::SuiteEntry& e : suite.entries) {
    std::printf("%-34s %s  %s\n", e.name.c_str(), e.ok ? "pass" : "FAIL", e.detail.c_str());
  }
  std::printf("summary: %s\n", suite.summary_path.string().c_str());
  std::printf("%s\n", suite.all_passed ? "all checks passed" : "some checks FAILED");
  return suite.all_passed ? 0 : 1;
}

struct BoundsArgs {
  double eps0 = 0.0, eps = 0.0, gamma = 0.0;
  double D = 0.0, D_star = 0.0, beta = 0.0, beta_prime = 0.0, mu = 0.0;
  bool has_gamma = false, has_D = false, has_D_star = false;
  bool has_beta = false, has_beta_prime = false, has_mu = false;
};

int cmd_bounds(const std::string& lemma, const BoundsArgs& a) {
  auto print = [](const BoundValue& b) {
    std::printf("lambda = %.17g\n", b.lambda);
    std::printf("k = %llu%s\n", static_cast<unsigned long long>(b.k),
                b.k_diverged ? " (saturated)" : "");
    if (b.error_level) std::printf("error_level = %.17g\n", *b.error_level);
  };
  BoundInputs in;
  in.eps0 = a.eps0;
  in.eps = a.eps;
  if (a.has_gamma) in.gamma = a.gamma;
  if (a.has_D) in.D = a.D;
  if (a.has_D_star) in.D_star = a.D_star;
  if (a.has_beta) in.beta = a.beta;
  if (a.has_beta_prime) in.beta_prime = a.beta_prime;
  if (a.has_mu) in.mu = a.mu;

  if (lemma == "fixed_step") {
    print(fplab::bound_fixed_step(in));
  } else if (lemma == "mild") {
    print(fplab::bound_mild(in));
  } else if (lemma == "corollary_mild") {
    print(fplab::bound_corollary_mild(in));
  } else if (lemma == "leb") {
    if (!a.has_beta || !a.has_mu) {
      std::fprintf(stderr, "bounds leb requires --beta and --mu\n");
      return 2;
    }
    print(fplab::bound_leb(a.beta, a.mu));
  } else if (lemma == "ghal_error") {
    if (!a.has_D || !a.has_gamma || !a.has_beta || !a.has_beta_prime) {
      std::fprintf(stderr, "bounds ghal_error requires --D, --gamma, --beta, --beta-prime\n");
      return 2;
    }
    std::printf("error_level = %.17g\n",
                fplab::bound_ghal_expansive_error(a.D, a.gamma, a.beta, a.beta_prime));
  } else {
    std::fprintf(stderr,
                 "unknown lemma '%s' (one of: fixed_step mild corollary_mild leb ghal_error)\n",
                 lemma.c_str());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-point iteration toolkit"};
  app.require_subcommand(1);

  // run-preset
  std::string preset_name, preset_out = "out";
  std::uint64_t seed_value = 0;
  std::vector<std::string> set_args;
  CLI::App* sc_preset = app.add_subcommand("run-preset", "run a named experiment preset");
  sc_preset->add_option("name", preset_name, "preset name (fig1a fig1b fig1c fig2 fig3 fig4)")
      ->required();
  sc_preset->add_option("--out", preset_out, "output directory (default: out)");
  CLI::Option* preset_seed = sc_preset->add_option("--seed", seed_value, "run seed");
  sc_preset->add_option("--set", set_args, "override a config key (key=value; repeatable)");

  // run
  std::string config_path, run_out = "out";
  CLI::App* sc_run = app.add_subcommand("run", "run a single config file");
  sc_run->add_option("config", config_path, "path to a run config")->required();
  sc_run->add_option("--out", run_out,
                     "fallback output directory when the config sets no run.out");

  // verify
  std::string verify_out = "out";
  std::uint64_t verify_seed_value = 0;
  CLI::App* sc_verify = app.add_subcommand("verify", "run the verification suite");
  sc_verify->add_option("--out", verify_out, "output directory (default: out)");
  CLI::Option* verify_seed = sc_verify->add_option("--seed", verify_seed_value, "sampler seed");

  // bounds
  std::string lemma;
  BoundsArgs ba;
  CLI::App* sc_bounds = app.add_subcommand("bounds", "evaluate an iteration bound");
  sc_bounds->add_option("lemma", lemma,
                        "one of: fixed_step mild corollary_mild leb ghal_error")
      ->required();
  sc_bounds->add_option("--eps0", ba.eps0, "initial residual");
  sc_bounds->add_option("--eps", ba.eps, "target residual");
  CLI::Option* o_gamma = sc_bounds->add_option("--gamma", ba.gamma, "Lipschitz modulus");
  CLI::Option* o_D = sc_bounds->add_option("--D", ba.D, "domain diameter");
  CLI::Option* o_Ds = sc_bounds->add_option("--D-star", ba.D_star, "distance to a fixed point");
  CLI::Option* o_beta = sc_bounds->add_option("--beta", ba.beta, "shrink factor");
  CLI::Option* o_bp = sc_bounds->add_option("--beta-prime", ba.beta_prime, "safeguard slack");
  CLI::Option* o_mu = sc_bounds->add_option("--mu", ba.mu, "error-bound constant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_preset->parsed()) {
      std::optional<std::uint64_t> seed;
      if (preset_seed->count() > 0) seed = seed_value;
      return cmd_run_preset(preset_name, preset_out, seed, set_args);
    }
    if (sc_run->parsed()) {
      return cmd_run(config_path, run_out);
    }
    if (sc_verify->parsed()) {
      std::optional<std::uint64_t> seed;
      if (verify_seed->count() > 0) seed = verify_seed_value;
      return cmd_verify(verify_out, seed);
    }
    if (sc_bounds->parsed()) {
      ba.has_gamma = o_gamma->count() > 0;
      ba.has_D = o_D->count() > 0;
      ba.has_D_star = o_Ds->count() > 0;
      ba.has_beta = o_beta->count() > 0;
      ba.has_beta_prime = o_bp->count() > 0;
      ba.has_mu = o_mu->count() > 0;
      return cmd_bounds(lemma, ba);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
