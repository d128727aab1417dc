// fplab/trace.hpp
//
// Run artifacts: per-iterate trace records, the trace container, termination
// codes, and the RunResult every solver returns.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fplab/core.hpp"

namespace fplab {

enum class Termination {
  TargetReached,    // residual <= target_eps certified from a counted image
  BudgetExhausted,  // query budget ran out; best-so-far iterate returned
  SafeguardHalt,    // progress safeguard tripped in Halt mode
  NonFinite,        // the operator produced NaN/Inf
};

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::TargetReached: return "TargetReached";
    case Termination::BudgetExhausted: return "BudgetExhausted";
    case Termination::SafeguardHalt: return "SafeguardHalt";
    case Termination::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

// How the progress safeguard reacts when it trips.
enum class HaltMode {
  Halt,         // stop the whole run, return the best iterate seen
  BreakRevert,  // end the phase, revert the anchor weight, continue
};

// One sampled iterate. `iter` counts iterates within the run (0 = start
// point), `queries` is the cumulative operator query count when the record
// was taken. Optional fields are written only by solvers that have them.
struct TraceRecord {
  std::uint64_t iter = 0;
  std::uint64_t queries = 0;
  double residual = 0.0;
  double lambda = 0.0;
  std::optional<double> eps_k;
  std::optional<double> D_estimate;
  std::optional<std::uint64_t> phase;
  double displacement = 0.0;  // ||x_{j} - x_{j-1}||, 0 for the start record
};

// Append-only trace. Enforces the invariant that query counts strictly
// increase from record to record (every record must be paid for by at least
// one fresh query, so subsampled traces stay monotone). Point snapshots are
// kept only when asked, since fig-scale runs would otherwise hold thousands
// of d=500 vectors.
class IterationTrace {
 public:
  explicit IterationTrace(bool record_points = false) : record_points_(record_points) {}

  void append(const TraceRecord& rec, const std::vector<double>& point) {
    if (!records_.empty() && rec.queries <= records_.back().queries) {
      throw std::logic_error("IterationTrace: query counts must strictly increase");
    }
    records_.push_back(rec);
    if (record_points_) points_.push_back(point);
  }

  const std::vector<TraceRecord>& records() const { return records_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  bool has_points() const { return record_points_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

 private:
  bool record_points_;
  std::vector<TraceRecord> records_;
  std::vector<std::vector<double>> points_;
};

struct RunResult {
  RealVector final_point;
  double final_residual = 0.0;
  std::uint64_t total_queries = 0;
  std::uint64_t total_iters = 0;
  Termination termination = Termination::BudgetExhausted;
  IterationTrace trace;

  RunResult() : final_point(RealVector::zeros(1)) {}
};

}  // namespace fplab
