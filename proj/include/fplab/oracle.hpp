// fplab/oracle.hpp
//
// Query-counted access to an operator. Solvers never call apply_operator
// directly; they go through a CountedOperator so that reported query counts
// mean exactly "number of operator evaluations", with budget enforcement and
// non-finite detection at the single choke point.

#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "fplab/core.hpp"
#include "fplab/operators.hpp"

namespace fplab {

// Thrown when an evaluation would exceed the configured budget. Solvers
// catch this and wind down with their best iterate so far.
struct BudgetExceeded : std::runtime_error {
  BudgetExceeded() : std::runtime_error("operator query budget exhausted") {}
};

// Thrown when an operator returns NaN/Inf; surfaced as Termination::NonFinite.
struct NonFiniteImage : std::runtime_error {
  NonFiniteImage() : std::runtime_error("operator produced a non-finite image") {}
};

class CountedOperator {
 public:
  explicit CountedOperator(const OperatorSpec& spec,
                           std::uint64_t max_queries = std::numeric_limits<std::uint64_t>::max())
      : spec_(&spec), max_queries_(max_queries) {}

  const OperatorSpec& spec() const { return *spec_; }
  std::uint64_t queries() const { return queries_; }
  std::uint64_t max_queries() const { return max_queries_; }
  bool exhausted() const { return queries_ >= max_queries_; }

  // One counted evaluation. The budget check happens before the evaluation,
  // so a solver can never spend more than max_queries.
  void evaluate(const std::vector<double>& x, std::vector<double>& image) {
    if (queries_ >= max_queries_) throw BudgetExceeded{};
    apply_operator(*spec_, x, image);
    ++queries_;
    if (!all_finite(image)) throw NonFiniteImage{};
  }

  std::vector<double> evaluate(const std::vector<double>& x) {
    std::vector<double> image;
    evaluate(x, image);
    return image;
  }

 private:
  const OperatorSpec* spec_;
  std::uint64_t max_queries_;
  std::uint64_t queries_ = 0;
};

// ||Tx - x|| in the operator's own norm, from an already-computed image.
inline double residual_of(const OperatorSpec& spec, const std::vector<double>& x,
                          const std::vector<double>& image) {
  return distance_of(image, x, spec.norm());
}

}  // namespace fplab
