#pragma once

// Line-oriented run configuration: `section.key = value` pairs, `#` comments,
// no nesting.  A parsed document is validated into a RunPlan (operator +
// solver + run settings); unknown or inapplicable keys are rejected with the
// line number they came from, so typos fail loudly instead of being ignored.

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fplab/operators.hpp"
#include "fplab/solvers.hpp"
#include "fplab/trace_io.hpp"

namespace fplab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

// Raw key/value document; keys are fully qualified ("operator.gamma").
struct ConfigDoc {
  std::map<std::string, ConfigEntry> entries;
  std::string source = "<config>";

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  void set(const std::string& key, const std::string& value, int line = 0) {
    entries[key] = ConfigEntry{value, line};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ConfigDoc parse_config_text(const std::string& text,
                                   const std::string& source = "<config>") {
  ConfigDoc doc;
  doc.source = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": expected 'section.key = value'");
    }
    std::string key = detail::trim(stripped.substr(0, eq));
    std::string value = detail::trim(stripped.substr(eq + 1));
    std::size_t dot = key.find('.');
    if (key.empty() || dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
      throw ConfigError(source + ":" + std::to_string(lineno) +
                        ": key must be of the form section.key, got '" + key + "'");
    }
    if (value.empty()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty value for '" +
                        key + "'");
    }
    auto it = doc.entries.find(key);
    if (it != doc.entries.end()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                        "' (first set on line " + std::to_string(it->second.line) + ")");
    }
    doc.entries[key] = ConfigEntry{value, lineno};
  }
  return doc;
}

inline ConfigDoc parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

// Fully validated description of one solver run.
struct RunPlan {
  OperatorSpec op;
  std::string solver_name;
  SolverConfig solver;
  std::string run_id;
  std::uint64_t seed = 42;
  std::filesystem::path out_path;
  TraceFormat format = TraceFormat::Csv;
};

namespace detail {

class PlanReader {
 public:
  explicit PlanReader(const ConfigDoc& doc) : doc_(doc) {}

  std::optional<std::string> take_string(const std::string& key) {
    auto it = doc_.entries.find(key);
    if (it == doc_.entries.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second.value;
  }

  std::string require_string(const std::string& key) {
    auto v = take_string(key);
    if (!v) throw ConfigError(doc_.source + ": missing required key '" + key + "'");
    return *v;
  }

  std::optional<double> take_double(const std::string& key) {
    auto v = take_string(key);
    if (!v) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    double d = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *end != '\0' || errno == ERANGE) {
      fail_value(key, *v, "a real number");
    }
    return d;
  }

  double require_double(const std::string& key) {
    auto v = take_double(key);
    if (!v) throw ConfigError(doc_.source + ": missing required key '" + key + "'");
    return *v;
  }

  std::optional<std::uint64_t> take_uint(const std::string& key) {
    auto v = take_string(key);
    if (!v) return std::nullopt;
    if (!v->empty() && (*v)[0] == '-') fail_value(key, *v, "a non-negative integer");
    errno = 0;
    char* end = nullptr;
    unsigned long long u = std::strtoull(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0' || errno == ERANGE) {
      fail_value(key, *v, "a non-negative integer");
    }
    return static_cast<std::uint64_t>(u);
  }

  std::optional<bool> take_bool(const std::string& key) {
    auto v = take_string(key);
    if (!v) return std::nullopt;
    if (*v == "true") return true;
    if (*v == "false") return false;
    fail_value(key, *v, "true or false");
    return std::nullopt;  // unreachable
  }

  [[noreturn]] void fail_value(const std::string& key, const std::string& value,
                               const char* expected) {
    int line = 0;
    auto it = doc_.entries.find(key);
    if (it != doc_.entries.end()) line = it->second.line;
    throw ConfigError(doc_.source + ":" + std::to_string(line) + ": value '" + value +
                      "' for '" + key + "' is not " + expected);
  }

  // Anything parsed but never consumed is an unknown (or inapplicable) key.
  void reject_leftovers() const {
    std::vector<std::string> bad;
    for (const auto& [key, entry] : doc_.entries) {
      if (!consumed_.count(key)) {
        bad.push_back("'" + key + "' (line " + std::to_string(entry.line) + ")");
      }
    }
    if (!bad.empty()) {
      std::string msg = doc_.source + ": unknown key";
      if (bad.size() > 1) msg += "s";
      msg += " ";
      for (std::size_t i = 0; i < bad.size(); ++i) {
        if (i) msg += ", ";
        msg += bad[i];
      }
      throw ConfigError(msg);
    }
  }

  const ConfigDoc& doc() const { return doc_; }

 private:
  const ConfigDoc& doc_;
  std::set<std::string> consumed_;
};

inline NormKind parse_norm(PlanReader& r) {
  auto v = r.take_string("operator.norm");
  if (!v) return NormKind::EuclideanL2;
  if (*v == "l2") return NormKind::EuclideanL2;
  if (*v == "linf") return NormKind::SupLinf;
  r.fail_value("operator.norm", *v, "'l2' or 'linf'");
}

inline std::size_t parse_dim(PlanReader& r) {
  auto v = r.take_uint("operator.dim");
  if (!v) throw ConfigError(r.doc().source + ": missing required key 'operator.dim'");
  if (*v == 0) r.fail_value("operator.dim", "0", "a positive integer");
  return static_cast<std::size_t>(*v);
}

inline OperatorSpec build_operator(PlanReader& r) {
  const std::string name = r.require_string("operator.name");
  if (name == "identity") {
    return make_identity(parse_dim(r), parse_norm(r));
  }
  if (name == "linear_scale") {
    const std::size_t d = parse_dim(r);
    const double gamma = r.require_double("operator.gamma");
    return make_linear_scale(gamma, d, parse_norm(r));
  }
  if (name == "affine") {
    const std::size_t d = parse_dim(r);
    const double scale = r.require_double("operator.scale");
    const double offset = r.take_double("operator.offset").value_or(0.0);
    std::vector<double> off;
    if (offset != 0.0) off.assign(d, offset);
    return make_affine(scale, std::move(off), d, parse_norm(r));
  }
  if (name == "rotation_hard") {
    const std::size_t d = parse_dim(r);
    const double gamma = r.require_double("operator.gamma");
    const std::optional<double> s = r.take_double("operator.s");
    const bool literal = r.take_bool("operator.literal").value_or(false);
    return make_rotation_hard(d, gamma, s, literal);
  }
  if (name == "piecewise_scale") {
    const std::size_t d = parse_dim(r);
    const double gamma = r.require_double("operator.gamma");
    const double c = r.require_double("operator.c");
    return make_piecewise_scale(gamma, c, d);
  }
  if (name == "piecewise_slope") {
    const std::size_t d = parse_dim(r);
    const double m_near = r.require_double("operator.m_near");
    const double m_far = r.require_double("operator.m_far");
    bool even = true;
    if (auto parity = r.take_string("operator.parity")) {
      if (*parity == "even") {
        even = true;
      } else if (*parity == "odd") {
        even = false;
      } else {
        r.fail_value("operator.parity", *parity, "'even' or 'odd'");
      }
    }
    return make_piecewise_slope(m_near, m_far, d, even);
  }
  if (name == "ball_projection") {
    return make_ball_projection(parse_dim(r));
  }
  if (name == "box_projection") {
    const std::size_t d = parse_dim(r);
    const double lo = r.require_double("operator.lo");
    const double hi = r.require_double("operator.hi");
    return make_box_projection(lo, hi, d);
  }
  if (name == "exp_shift") {
    const std::size_t d = parse_dim(r);
    const double alpha = r.require_double("operator.alpha");
    const double D = r.require_double("operator.D");
    return make_exp_shift(alpha, D, d);
  }
  if (name == "rotation_slope") {
    const std::size_t d = parse_dim(r);
    const double m_near = r.require_double("operator.m_near");
    const double m_far = r.require_double("operator.m_far");
    const std::optional<double> s = r.take_double("operator.s");
    return make_rotation_slope(d, m_near, m_far, s);
  }
  if (name == "ball_rotation_scale") {
    const std::size_t d = parse_dim(r);
    const double gamma = r.require_double("operator.gamma");
    const double c = r.require_double("operator.c");
    const std::optional<double> s = r.take_double("operator.s");
    return make_ball_rotation_scale(d, gamma, c, s);
  }
  throw ConfigError(r.doc().source + ": unknown operator name '" + name + "'");
}

}  // namespace detail

inline const std::set<std::string>& known_solver_names() {
  static const std::set<std::string> names = {"picard",  "halpern", "restarted_halpern",
                                              "fixhal",  "ghal",    "adaghal"};
  return names;
}

inline RunPlan build_run_plan(const ConfigDoc& doc) {
  detail::PlanReader r(doc);
  OperatorSpec op = detail::build_operator(r);

  const std::string solver_name = r.require_string("solver.name");
  if (!known_solver_names().count(solver_name)) {
    throw ConfigError(doc.source + ": unknown solver name '" + solver_name + "'");
  }

  SolverConfig cfg;
  if (auto eps = r.take_double("solver.eps")) cfg.target_eps = *eps;
  if (auto mq = r.take_uint("run.max_queries")) cfg.max_queries = *mq;
  if (auto te = r.take_uint("run.trace_every")) cfg.trace_every = *te;

  if (solver_name == "fixhal") {
    cfg.lambda = r.require_double("solver.lambda");
  } else if (solver_name == "restarted_halpern") {
    cfg.lambda = r.take_double("solver.lambda");
    cfg.mu = r.take_double("solver.mu");
  } else if (solver_name == "ghal") {
    if (!doc.has("solver.D")) throw ConfigError(doc.source + ": ghal requires D");
    cfg.D = r.take_double("solver.D");
    if (auto b = r.take_double("solver.beta")) cfg.beta = *b;
    if (auto bp = r.take_double("solver.beta_prime")) cfg.beta_prime = *bp;
    if (auto hm = r.take_string("solver.halt_mode")) {
      if (*hm == "halt") {
        cfg.halt_mode = HaltMode::Halt;
      } else if (*hm == "break_revert") {
        cfg.halt_mode = HaltMode::BreakRevert;
      } else {
        r.fail_value("solver.halt_mode", *hm, "'halt' or 'break_revert'");
      }
    }
  }

  RunPlan plan{std::move(op), solver_name, cfg, /*run_id=*/"run", /*seed=*/42,
               /*out_path=*/{}, /*format=*/TraceFormat::Csv};
  plan.seed = r.take_uint("run.seed").value_or(42);
  plan.run_id = r.take_string("run.id").value_or("run");
  if (auto out = r.take_string("run.out")) plan.out_path = *out;
  if (auto fmt = r.take_string("run.format")) {
    if (*fmt == "csv") {
      plan.format = TraceFormat::Csv;
    } else if (*fmt == "jsonl") {
      plan.format = TraceFormat::Jsonl;
    } else {
      r.fail_value("run.format", *fmt, "'csv' or 'jsonl'");
    }
  }

  r.reject_leftovers();
  validate_config(plan.solver);
  return plan;
}

// Runs the configured solver from the origin and returns the result; the
// caller decides whether/where to serialize.
inline RunResult execute_plan(const RunPlan& plan) {
  CountedOperator op(plan.op, plan.solver.max_queries);
  RealVector x0 = RealVector::zeros(plan.op.dim());
  if (plan.solver_name == "picard") return picard(op, x0, plan.solver);
  if (plan.solver_name == "halpern") return halpern_classic(op, x0, plan.solver);
  if (plan.solver_name == "restarted_halpern") return fixhal_restarted(op, x0, plan.solver);
  if (plan.solver_name == "fixhal") return fixhal(op, x0, *plan.solver.lambda, plan.solver);
  if (plan.solver_name == "ghal") return ghal(op, x0, plan.solver);
  if (plan.solver_name == "adaghal") return adaghal(op, x0, plan.solver);
  throw ConfigError("unknown solver name '" + plan.solver_name + "'");
}

}  // namespace fplab
