// fplab/verify.hpp
//
// Sampling-based property checkers: empirical Lipschitz certification,
// gradual-expansion and field-condition tests, hypomonotonicity and the
// resolvent-side inner-product condition, plus a trace-level increment
// contraction check. Every report records the sampler seed, the number of
// pairs tested and skipped, and (on failure) a witness pair at which
// re-evaluating the defining inequality reproduces the violation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "fplab/core.hpp"
#include "fplab/operators.hpp"
#include "fplab/oracle.hpp"
#include "fplab/trace.hpp"

namespace fplab {

struct CheckReport {
  bool passed = true;
  std::uint64_t samples_tested = 0;
  double worst_ratio = 0.0;
  std::optional<std::pair<RealVector, RealVector>> witness;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t skipped = 0;      // near-coincident pairs left out of ratios
  bool inconclusive = false;      // nothing checkable (e.g. trace too short)
  std::uint64_t queries = 0;      // oracle evaluations spent by the check
};

namespace detail {

constexpr double kPairSeparationFloor = 1e-12;

inline double dot_diff(const std::vector<double>& au, const std::vector<double>& av,
                       const std::vector<double>& bu, const std::vector<double>& bv) {
  // <a_u - a_v, b_u - b_v>
  double acc = 0.0;
  for (std::size_t i = 0; i < au.size(); ++i) acc += (au[i] - av[i]) * (bu[i] - bv[i]);
  return acc;
}

}  // namespace detail

// Empirical Lipschitz constant: worst ratio ||T(x)-T(y)|| / ||x-y|| over
// sampled pairs. When the operator carries a known gamma (or the caller
// supplies a claimed one), the report certifies worst_ratio against it with
// relative slack 1e-9; otherwise the report is a pure estimate that passes.
inline CheckReport estimate_lipschitz(const OperatorSpec& op, DomainSampler& sampler,
                                      std::uint64_t n_pairs,
                                      std::optional<double> claimed_gamma = std::nullopt) {
  CheckReport rep;
  rep.seed = sampler.seed();
  const std::optional<double> claim = claimed_gamma ? claimed_gamma : op.gamma_known();
  rep.tolerance = claim ? 1e-9 : 0.0;
  CountedOperator counted(op);
  std::vector<double> tx;
  std::vector<double> ty;
  std::optional<std::pair<RealVector, RealVector>> worst_pair;
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const RealVector x = sampler.sample();
    const RealVector y = sampler.sample();
    const double sep = distance(x, y, op.norm());
    if (sep < detail::kPairSeparationFloor) {
      ++rep.skipped;
      continue;
    }
    counted.evaluate(x.coords(), tx);
    counted.evaluate(y.coords(), ty);
    const double ratio = distance_of(tx, ty, op.norm()) / sep;
    ++rep.samples_tested;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      worst_pair.emplace(x, y);
    }
  }
  rep.queries = counted.queries();
  if (claim) {
    rep.passed = rep.worst_ratio <= *claim * (1.0 + rep.tolerance);
    if (!rep.passed) rep.witness = worst_pair;
  }
  if (rep.samples_tested == 0) rep.inconclusive = true;
  return rep;
}

// Gradual-expansion test: every sampled pair must satisfy
//   ||T(x)-T(y)|| <= (1 + alpha * max{||T(x)-x||, ||T(y)-y||} / D) ||x-y|| + tol.
inline CheckReport check_gradually_expansive(const OperatorSpec& op, double D, double alpha,
                                             DomainSampler& sampler, std::uint64_t n_pairs,
                                             double tol) {
  if (!(D > 0.0)) throw std::invalid_argument("check_gradually_expansive: D must be > 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("check_gradually_expansive: alpha must be >= 0");
  CheckReport rep;
  rep.seed = sampler.seed();
  rep.tolerance = tol;
  CountedOperator counted(op);
  std::vector<double> tx;
  std::vector<double> ty;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const RealVector x = sampler.sample();
    const RealVector y = sampler.sample();
    const double sep = distance(x, y, op.norm());
    if (sep < detail::kPairSeparationFloor) {
      ++rep.skipped;
      continue;
    }
    counted.evaluate(x.coords(), tx);
    counted.evaluate(y.coords(), ty);
    const double res_max = std::max(residual_of(op, x.coords(), tx),
                                    residual_of(op, y.coords(), ty));
    const double lhs = distance_of(tx, ty, op.norm());
    const double bound = (1.0 + alpha * res_max / D) * sep;
    ++rep.samples_tested;
    const double ratio = lhs / std::max(bound, 1e-300);
    if (ratio > rep.worst_ratio) rep.worst_ratio = ratio;
    const double excess = lhs - bound;
    if (excess > tol && excess > worst_excess) {
      worst_excess = excess;
      rep.witness.emplace(x, y);
    }
  }
  rep.queries = counted.queries();
  rep.passed = !rep.witness.has_value();
  if (rep.samples_tested == 0) rep.inconclusive = true;
  return rep;
}

// Field premise behind the gradual-expansion property: for F = T - Id,
//   ||F(x)-F(y)|| <= (alpha/D) * max{||F(x)||, ||F(y)||} * ||x-y|| + tol.
inline CheckReport check_F_condition(const OperatorSpec& opF, double D, double alpha,
                                     DomainSampler& sampler, std::uint64_t n_pairs, double tol) {
  if (!(D > 0.0)) throw std::invalid_argument("check_F_condition: D must be > 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("check_F_condition: alpha must be >= 0");
  CheckReport rep;
  rep.seed = sampler.seed();
  rep.tolerance = tol;
  CountedOperator counted(opF);
  std::vector<double> fx;
  std::vector<double> fy;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const RealVector x = sampler.sample();
    const RealVector y = sampler.sample();
    const double sep = distance(x, y, opF.norm());
    if (sep < detail::kPairSeparationFloor) {
      ++rep.skipped;
      continue;
    }
    counted.evaluate(x.coords(), fx);
    counted.evaluate(y.coords(), fy);
    const double f_max = std::max(norm_of(fx, opF.norm()), norm_of(fy, opF.norm()));
    const double lhs = distance_of(fx, fy, opF.norm());
    const double bound = (alpha / D) * f_max * sep;
    ++rep.samples_tested;
    const double ratio = lhs / std::max(bound, 1e-300);
    if (ratio > rep.worst_ratio) rep.worst_ratio = ratio;
    const double excess = lhs - bound;
    if (excess > tol && excess > worst_excess) {
      worst_excess = excess;
      rep.witness.emplace(x, y);
    }
  }
  rep.queries = counted.queries();
  rep.passed = !rep.witness.has_value();
  if (rep.samples_tested == 0) rep.inconclusive = true;
  return rep;
}

// Hypomonotonicity: <F(u)-F(v), u-v> >= -mu ||u-v||^2, up to the absolute
// inner-product slack tol * (1 + ||u-v||^2). Euclidean geometry only.
inline CheckReport check_hypomonotone(const OperatorSpec& opF, double mu, DomainSampler& sampler,
                                      std::uint64_t n_pairs, double tol) {
  if (opF.norm() != NormKind::EuclideanL2) {
    throw std::invalid_argument("check_hypomonotone: requires an l2 operator");
  }
  if (!(mu >= 0.0)) throw std::invalid_argument("check_hypomonotone: mu must be >= 0");
  CheckReport rep;
  rep.seed = sampler.seed();
  rep.tolerance = tol;
  CountedOperator counted(opF);
  std::vector<double> fu;
  std::vector<double> fv;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const RealVector u = sampler.sample();
    const RealVector v = sampler.sample();
    const double sep = distance(u, v, NormKind::EuclideanL2);
    if (sep < detail::kPairSeparationFloor) {
      ++rep.skipped;
      continue;
    }
    counted.evaluate(u.coords(), fu);
    counted.evaluate(v.coords(), fv);
    const double d2 = sep * sep;
    const double lhs = detail::dot_diff(fu, fv, u.coords(), v.coords());
    ++rep.samples_tested;
    const double empirical_mu = -lhs / d2;  // most negative curvature seen
    if (empirical_mu > rep.worst_ratio) rep.worst_ratio = empirical_mu;
    const double slack = tol * (1.0 + d2);
    const double excess = (-mu * d2) - lhs - slack;
    if (excess > 0.0 && excess > worst_excess) {
      worst_excess = excess;
      rep.witness.emplace(u, v);
    }
  }
  rep.queries = counted.queries();
  rep.passed = !rep.witness.has_value();
  if (rep.samples_tested == 0) rep.inconclusive = true;
  return rep;
}

// Residual-scaled hypomonotonicity used by the resolvent argument:
//   <F(u)-F(v), u-v> >= -(tau/(1+tau)) ||u-v||^2,
//   tau = (alpha/D) * max{||F(u)||, ||F(v)||},
// up to the absolute inner-product slack tol * (1 + ||u-v||^2).
inline CheckReport check_gradual_resolvent_condition(const OperatorSpec& opF, double D,
                                                     double alpha, DomainSampler& sampler,
                                                     std::uint64_t n_pairs, double tol) {
  if (opF.norm() != NormKind::EuclideanL2) {
    throw std::invalid_argument("check_gradual_resolvent_condition: requires an l2 operator");
  }
  if (!(D > 0.0)) {
    throw std::invalid_argument("check_gradual_resolvent_condition: D must be > 0");
  }
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("check_gradual_resolvent_condition: alpha must be >= 0");
  }
  CheckReport rep;
  rep.seed = sampler.seed();
  rep.tolerance = tol;
  CountedOperator counted(opF);
  std::vector<double> fu;
  std::vector<double> fv;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const RealVector u = sampler.sample();
    const RealVector v = sampler.sample();
    const double sep = distance(u, v, NormKind::EuclideanL2);
    if (sep < detail::kPairSeparationFloor) {
      ++rep.skipped;
      continue;
    }
    counted.evaluate(u.coords(), fu);
    counted.evaluate(v.coords(), fv);
    const double d2 = sep * sep;
    const double tau = (alpha / D) * std::max(norm_of(fu, NormKind::EuclideanL2),
                                              norm_of(fv, NormKind::EuclideanL2));
    const double factor = tau / (1.0 + tau);
    const double lhs = detail::dot_diff(fu, fv, u.coords(), v.coords());
    ++rep.samples_tested;
    const double ratio = (-lhs / d2) / std::max(factor, 1e-300);
    if (ratio > rep.worst_ratio) rep.worst_ratio = ratio;
    const double slack = tol * (1.0 + d2);
    const double excess = (-factor * d2) - lhs - slack;
    if (excess > 0.0 && excess > worst_excess) {
      worst_excess = excess;
      rep.witness.emplace(u, v);
    }
  }
  rep.queries = counted.queries();
  rep.passed = !rep.witness.has_value();
  if (rep.samples_tested == 0) rep.inconclusive = true;
  return rep;
}

// Trace-level displacement contraction: within each phase of a fixed-step
// trace, successive displacements must satisfy
//   ||x_{j+1} - x_j|| <= (1 - beta' * lambda) ||x_j - x_{j-1}||
// for j >= 2, checked with relative slack 1e-9 on consecutively recorded
// iterates. Fewer than three iterates (or no comparable pair) is
// inconclusive. When the trace carries point snapshots the witness holds the
// offending iterate pair; otherwise it holds the two displacements as
// one-dimensional points.
inline CheckReport check_increment_contraction(const IterationTrace& trace, double lambda,
                                               double beta_prime) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("check_increment_contraction: lambda must lie in (0,1)");
  }
  if (!(beta_prime > 0.0 && beta_prime <= 1.0)) {
    throw std::invalid_argument("check_increment_contraction: beta_prime must lie in (0,1]");
  }
  CheckReport rep;
  rep.tolerance = 1e-9;
  const double factor = 1.0 - beta_prime * lambda;
  const auto& recs = trace.records();
  if (recs.size() < 3) {
    rep.inconclusive = true;
    return rep;
  }
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t witness_idx = 0;
  std::uint64_t group_start_iter = recs.front().iter;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const TraceRecord& a = recs[i];
    const TraceRecord& b = recs[i + 1];
    const bool same_phase = a.phase == b.phase;
    if (!same_phase) {
      group_start_iter = b.iter;
      continue;
    }
    if (b.iter != a.iter + 1) continue;            // subsampled gap: not comparable
    const std::uint64_t j = a.iter - group_start_iter;
    if (j < 2) continue;                           // the rule starts at the third step
    if (a.displacement < detail::kPairSeparationFloor) {
      ++rep.skipped;
      continue;
    }
    ++rep.samples_tested;
    const double ratio = b.displacement / (factor * a.displacement);
    if (ratio > rep.worst_ratio) rep.worst_ratio = ratio;
    const double excess = b.displacement - factor * a.displacement * (1.0 + rep.tolerance);
    if (excess > 0.0 && excess > worst_excess) {
      worst_excess = excess;
      witness_idx = i;
    }
  }
  if (worst_excess > 0.0) {
    rep.passed = false;
    if (trace.has_points()) {
      rep.witness.emplace(RealVector(trace.points()[witness_idx]),
                          RealVector(trace.points()[witness_idx + 1]));
    } else {
      rep.witness.emplace(RealVector(std::vector<double>{recs[witness_idx].displacement}),
                          RealVector(std::vector<double>{recs[witness_idx + 1].displacement}));
    }
  }
  if (rep.samples_tested == 0) rep.inconclusive = true;
  return rep;
}

}  // namespace fplab
