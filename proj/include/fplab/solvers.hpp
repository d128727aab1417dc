// fplab/solvers.hpp
//
// The iteration schemes. All of them share the same oracle contract: every
// inner iterate costs exactly one counted query, the image T(x) obtained by
// that query is cached and reused for the residual test, the progress
// safeguard, and the next update, and phase boundaries are free (the
// incoming iterate's image is already known). Budgets are hard caps checked
// before each evaluation; on exhaustion the argmin-residual iterate seen so
// far is returned with termination BudgetExhausted.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fplab/core.hpp"
#include "fplab/oracle.hpp"
#include "fplab/trace.hpp"

namespace fplab {

// Thrown by `resolvent` when the inner map is not contracting (either the
// a-priori factor tau*gamma/(1+tau) is >= 1, or displacements grow).
struct ContractionFailure : std::runtime_error {
  explicit ContractionFailure(const std::string& what) : std::runtime_error(what) {}
};

struct SolverConfig {
  double target_eps = 1e-6;             // epsilon: stop once residual <= this
  std::uint64_t max_queries = 1000000;  // hard oracle budget
  double beta = 0.975;                  // outer shrink factor (GHAL)
  double beta_prime = 1.0 / 1.01;       // safeguard slack factor (GHAL)
  std::optional<double> lambda;         // fixed anchor weight, when forced
  std::optional<double> D;              // diameter estimate (GHAL requires it)
  std::optional<double> mu;             // error-bound constant (restarted variant)
  HaltMode halt_mode = HaltMode::Halt;  // safeguard reaction (GHAL)
  std::uint64_t trace_every = 1;        // record every n-th iterate
  bool record_points = false;           // keep iterate snapshots in the trace
};

inline void validate_config(const SolverConfig& cfg) {
  if (!(cfg.target_eps > 0.0)) throw std::invalid_argument("SolverConfig: target_eps must be > 0");
  if (cfg.max_queries == 0) throw std::invalid_argument("SolverConfig: max_queries must be >= 1");
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) {
    throw std::invalid_argument("SolverConfig: beta must lie in (0,1)");
  }
  if (!(cfg.beta_prime > 0.0 && cfg.beta_prime < 1.0)) {
    throw std::invalid_argument("SolverConfig: beta_prime must lie in (0,1)");
  }
  if (cfg.lambda && !(*cfg.lambda > 0.0 && *cfg.lambda < 1.0)) {
    throw std::invalid_argument("SolverConfig: lambda must lie in (0,1)");
  }
  if (cfg.D && !(*cfg.D > 0.0)) throw std::invalid_argument("SolverConfig: D must be > 0");
  if (cfg.mu && !(*cfg.mu > 0.0)) throw std::invalid_argument("SolverConfig: mu must be > 0");
  if (cfg.trace_every == 0) throw std::invalid_argument("SolverConfig: trace_every must be >= 1");
}

namespace detail {

struct TraceMeta {
  double lambda = 0.0;
  std::optional<double> eps_k;
  std::optional<double> D_estimate;
  std::optional<std::uint64_t> phase;
  double displacement = 0.0;
};

// Shared run bookkeeping: budget gate, query-counted evaluation, residual
// computation, best-so-far tracking, trace subsampling with a pending slot
// so phase-boundary and terminal iterates are recorded even when subsampled.
class Driver {
 public:
  Driver(CountedOperator& op, const SolverConfig& cfg, const RealVector& x0)
      : op_(op), cfg_(cfg), trace_(cfg.record_points), best_point_(x0.coords()) {}

  // One counted query; returns the residual at x. Call record() right after.
  double evaluate(const std::vector<double>& x, std::vector<double>& image) {
    if (!all_finite(x)) throw NonFiniteImage{};
    if (op_.queries() >= cfg_.max_queries) throw BudgetExceeded{};
    op_.evaluate(x, image);
    last_res_ = residual_of(op_.spec(), x, image);
    last_iter_ = iter_count_++;
    if (last_res_ < best_res_) {
      best_res_ = last_res_;
      best_point_ = x;
    }
    return last_res_;
  }

  void record(const std::vector<double>& x, const TraceMeta& m) {
    TraceRecord rec;
    rec.iter = last_iter_;
    rec.queries = op_.queries();
    rec.residual = last_res_;
    rec.lambda = m.lambda;
    rec.eps_k = m.eps_k;
    rec.D_estimate = m.D_estimate;
    rec.phase = m.phase;
    rec.displacement = m.displacement;
    if (last_iter_ % cfg_.trace_every == 0) {
      trace_.append(rec, x);
      pending_ = false;
    } else {
      pending_rec_ = rec;
      pending_point_ = x;
      pending_ = true;
    }
  }

  // Force out the pending record (phase boundaries, termination).
  void flush() {
    if (pending_) {
      trace_.append(pending_rec_, pending_point_);
      pending_ = false;
    }
  }

  RunResult finish(Termination t, const std::vector<double>& x, double residual) {
    flush();
    RunResult out;
    out.final_point = RealVector(x);
    out.final_residual = residual;
    out.total_queries = op_.queries();
    out.total_iters = iter_count_;
    out.termination = t;
    out.trace = std::move(trace_);
    return out;
  }

  RunResult finish_best(Termination t) { return finish(t, best_point_, best_res_); }

 private:
  CountedOperator& op_;
  const SolverConfig& cfg_;
  IterationTrace trace_;
  std::vector<double> best_point_;
  double best_res_ = std::numeric_limits<double>::infinity();
  double last_res_ = 0.0;
  std::uint64_t last_iter_ = 0;
  std::uint64_t iter_count_ = 0;
  bool pending_ = false;
  TraceRecord pending_rec_;
  std::vector<double> pending_point_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Picard iteration x_{k+1} = T(x_k).

inline RunResult picard(CountedOperator& op, const RealVector& x0, const SolverConfig& cfg) {
  validate_config(cfg);
  detail::Driver drv(op, cfg, x0);
  std::vector<double> x = x0.coords();
  std::vector<double> img;
  try {
    double res = drv.evaluate(x, img);
    drv.record(x, {.lambda = 0.0, .eps_k = {}, .D_estimate = {}, .phase = {}, .displacement = 0.0});
    while (res > cfg.target_eps) {
      const double disp = res;  // ||T(x_k) - x_k|| is exactly the Picard step size
      x = img;
      res = drv.evaluate(x, img);
      drv.record(x, {.lambda = 0.0, .eps_k = {}, .D_estimate = {}, .phase = {}, .displacement = disp});
    }
    return drv.finish(Termination::TargetReached, x, res);
  } catch (const BudgetExceeded&) {
    return drv.finish_best(Termination::BudgetExhausted);
  } catch (const NonFiniteImage&) {
    return drv.finish_best(Termination::NonFinite);
  }
}

// ---------------------------------------------------------------------------
// Classical Halpern iteration with the vanishing schedule: iterate m is
// formed with anchor weight 1/(m+1), i.e. x_{k+1} = x_0/(k+2) + (k+1)/(k+2) T(x_k).
// For T = 0 and scalar x_0 = 1 this gives x_m = 1/(m+1) exactly.

inline RunResult halpern_classic(CountedOperator& op, const RealVector& x0,
                                 const SolverConfig& cfg) {
  validate_config(cfg);
  detail::Driver drv(op, cfg, x0);
  const std::vector<double> anchor = x0.coords();
  std::vector<double> x = anchor;
  std::vector<double> img;
  std::vector<double> next;
  try {
    double res = drv.evaluate(x, img);
    drv.record(x, {.lambda = 1.0, .eps_k = {}, .D_estimate = {}, .phase = {}, .displacement = 0.0});
    std::uint64_t k = 0;
    while (res > cfg.target_eps) {
      const double lam = 1.0 / static_cast<double>(k + 2);
      combine_into(anchor, img, lam, next);
      const double disp = distance_of(next, x, op.spec().norm());
      x.swap(next);
      res = drv.evaluate(x, img);
      drv.record(x, {.lambda = lam, .eps_k = {}, .D_estimate = {}, .phase = {}, .displacement = disp});
      ++k;
    }
    return drv.finish(Termination::TargetReached, x, res);
  } catch (const BudgetExceeded&) {
    return drv.finish_best(Termination::BudgetExhausted);
  } catch (const NonFiniteImage&) {
    return drv.finish_best(Termination::NonFinite);
  }
}

// ---------------------------------------------------------------------------
// Fixed-step Halpern iteration x_{k+1} = lambda x_0 + (1-lambda) T(x_k).

inline RunResult fixhal(CountedOperator& op, const RealVector& x0, double lambda,
                        const SolverConfig& cfg) {
  validate_config(cfg);
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("fixhal: lambda must lie in (0,1)");
  }
  detail::Driver drv(op, cfg, x0);
  const std::vector<double> anchor = x0.coords();
  std::vector<double> x = anchor;
  std::vector<double> img;
  std::vector<double> next;
  try {
    double res = drv.evaluate(x, img);
    drv.record(x, {.lambda = lambda, .eps_k = {}, .D_estimate = {}, .phase = {}, .displacement = 0.0});
    while (res > cfg.target_eps) {
      combine_into(anchor, img, lambda, next);
      const double disp = distance_of(next, x, op.spec().norm());
      x.swap(next);
      res = drv.evaluate(x, img);
      drv.record(x, {.lambda = lambda, .eps_k = {}, .D_estimate = {}, .phase = {}, .displacement = disp});
    }
    return drv.finish(Termination::TargetReached, x, res);
  } catch (const BudgetExceeded&) {
    return drv.finish_best(Termination::BudgetExhausted);
  } catch (const NonFiniteImage&) {
    return drv.finish_best(Termination::NonFinite);
  }
}

// ---------------------------------------------------------------------------
// Restarted fixed-step Halpern: run fixhal until the residual halves, then
// restart with the current iterate as the new anchor. The per-phase anchor
// weight comes from, in order of preference:
//   - cfg.lambda, when forced;
//   - the error-bound rule (mu*beta/4)/(1 + mu*beta/4) with beta = 1/2, when
//     cfg.mu is supplied;
//   - the fallback eps_phase/(4 D_phase + eps_phase), where eps_phase is the
//     phase's residual goal (half the phase-start residual, floored at
//     target_eps) and D_phase is a running diameter estimate seeded with the
//     initial residual and grown to the largest anchor displacement seen.

inline RunResult fixhal_restarted(CountedOperator& op, const RealVector& x0,
                                  const SolverConfig& cfg) {
  validate_config(cfg);
  detail::Driver drv(op, cfg, x0);
  std::vector<double> anchor = x0.coords();
  std::vector<double> x = anchor;
  std::vector<double> img;
  std::vector<double> next;
  const NormKind norm = op.spec().norm();
  try {
    double res = drv.evaluate(x, img);
    double rho = res;           // residual at the current phase's anchor
    double D_phase = res;       // running diameter estimate
    std::uint64_t phase = 0;
    auto phase_lambda = [&]() {
      if (cfg.lambda) return *cfg.lambda;
      if (cfg.mu) {
        const double t = *cfg.mu * 0.5 / 4.0;
        return t / (1.0 + t);
      }
      const double eps_phase = std::max(rho / 2.0, cfg.target_eps);
      return eps_phase / (4.0 * D_phase + eps_phase);
    };
    double lam = phase_lambda();
    drv.record(x, {.lambda = lam, .eps_k = {}, .D_estimate = {}, .phase = phase, .displacement = 0.0});
    while (res > cfg.target_eps) {
      combine_into(anchor, img, lam, next);
      const double disp = distance_of(next, x, norm);
      x.swap(next);
      res = drv.evaluate(x, img);
      drv.record(x, {.lambda = lam, .eps_k = {}, .D_estimate = {}, .phase = phase, .displacement = disp});
      D_phase = std::max(D_phase, distance_of(x, anchor, norm));
      if (res <= cfg.target_eps) break;
      if (res <= rho / 2.0) {  // residual halved: restart from here
        drv.flush();
        ++phase;
        anchor = x;
        rho = res;
        lam = phase_lambda();
      }
    }
    return drv.finish(Termination::TargetReached, x, res);
  } catch (const BudgetExceeded&) {
    return drv.finish_best(Termination::BudgetExhausted);
  } catch (const NonFiniteImage&) {
    return drv.finish_best(Termination::NonFinite);
  }
}

// ---------------------------------------------------------------------------
// Gradual Halpern: outer phases shrink the per-phase residual goal
// eps_k = beta * eps_{k-1} and anchor weight lambda_k = (beta eps_k / D) /
// (1 + beta eps_k / D); each phase runs the fixed-step iteration anchored at
// the previous phase's output until the goal is met. A displacement
// safeguard guards against expansive operators: once j >= 2, if
// ||y_{j+1} - y_j|| >= (1 - beta' lambda_k) ||y_j - y_{j-1}|| (ties included),
// the run either halts with the better of {y_j, y_0} (ties to y_0) or, in
// BreakRevert mode, ends the phase early and freezes the anchor weight at
// its previous value while the goals keep shrinking.

inline RunResult ghal(CountedOperator& op, const RealVector& x0, const SolverConfig& cfg) {
  validate_config(cfg);
  if (!cfg.D) throw std::invalid_argument("ghal: cfg.D (diameter estimate) is required");
  const double D = *cfg.D;
  detail::Driver drv(op, cfg, x0);
  const NormKind norm = op.spec().norm();
  std::vector<double> xhat = x0.coords();
  std::vector<double> xhat_img;
  try {
    double xhat_res = drv.evaluate(xhat, xhat_img);
    const double eps0 = xhat_res;
    drv.record(xhat, {.lambda = 0.0, .eps_k = eps0, .D_estimate = D, .phase = 0, .displacement = 0.0});
    double eps_k = eps0;
    std::uint64_t k = 0;
    double lambda_prev = 0.0;
    bool lambda_frozen = false;
    double lambda_freeze_value = 0.0;
    while (xhat_res > cfg.target_eps) {
      ++k;
      eps_k *= cfg.beta;
      double lambda_k;
      if (lambda_frozen) {
        lambda_k = lambda_freeze_value;
      } else {
        const double t = cfg.beta * eps_k / D;
        lambda_k = t / (1.0 + t);
      }
      // Inner fixed-step run anchored at the phase start; its image and
      // residual are already cached, so entering the phase costs no queries.
      const std::vector<double> y0 = xhat;
      const std::vector<double> y0_img = xhat_img;
      const double y0_res = xhat_res;
      std::vector<double> yj = y0;
      std::vector<double> yj_img = y0_img;
      double yj_res = y0_res;
      std::vector<double> ynext;
      double disp_prev = 0.0;
      std::uint64_t j = 0;
      while (yj_res > eps_k) {
        combine_into(y0, yj_img, lambda_k, ynext);
        const double disp = distance_of(ynext, yj, norm);
        if (j >= 2 && disp >= (1.0 - cfg.beta_prime * lambda_k) * disp_prev) {
          if (cfg.halt_mode == HaltMode::Halt) {
            const bool keep_yj = yj_res < y0_res;  // ties go to the phase anchor
            return drv.finish(Termination::SafeguardHalt, keep_yj ? yj : y0,
                              keep_yj ? yj_res : y0_res);
          }
          // BreakRevert: end the phase at y_j and pin the anchor weight to
          // the previous phase's value (the first phase keeps its own).
          if (!lambda_frozen) {
            lambda_freeze_value = k == 1 ? lambda_k : lambda_prev;
            lambda_frozen = true;
          }
          break;
        }
        const double res = drv.evaluate(ynext, yj_img);
        drv.record(ynext, {.lambda = lambda_k,
                           .eps_k = eps_k,
                           .D_estimate = D,
                           .phase = k,
                           .displacement = disp});
        yj.swap(ynext);
        yj_res = res;
        disp_prev = disp;
        ++j;
      }
      xhat = std::move(yj);
      xhat_img = std::move(yj_img);
      xhat_res = yj_res;
      lambda_prev = lambda_k;
      drv.flush();  // the phase output is always recorded
    }
    return drv.finish(Termination::TargetReached, xhat, xhat_res);
  } catch (const BudgetExceeded&) {
    return drv.finish_best(Termination::BudgetExhausted);
  } catch (const NonFiniteImage&) {
    return drv.finish_best(Termination::NonFinite);
  }
}

// ---------------------------------------------------------------------------
// Adaptive Gradual Halpern: like the gradual scheme with beta = 1/2, but the
// diameter estimate D starts at the initial residual and doubles whenever the
// iterate strays more than D from the phase anchor. On a doubling event the
// anchor weight is recomputed and the working iterate is reset to the better
// of the freshly formed point and the phase anchor (ties to the anchor);
// scoring the fresh point costs one counted query.

inline RunResult adaghal(CountedOperator& op, const RealVector& x0, const SolverConfig& cfg) {
  validate_config(cfg);
  detail::Driver drv(op, cfg, x0);
  const NormKind norm = op.spec().norm();
  std::vector<double> xhat = x0.coords();
  std::vector<double> xhat_img;
  try {
    double xhat_res = drv.evaluate(xhat, xhat_img);
    const double eps0 = xhat_res;
    double D = eps0;
    drv.record(xhat, {.lambda = 0.0, .eps_k = eps0, .D_estimate = D, .phase = 0, .displacement = 0.0});
    double eps_k = eps0;
    std::uint64_t k = 0;
    std::vector<double> ynext;
    std::vector<double> ynext_img;
    while (xhat_res > cfg.target_eps) {
      ++k;
      eps_k /= 2.0;
      auto lambda_of = [&]() {
        const double t = eps_k / (2.0 * D);
        return t / (1.0 + t);
      };
      double lambda_k = lambda_of();
      const std::vector<double> y0 = xhat;
      const std::vector<double> y0_img = xhat_img;
      const double y0_res = xhat_res;
      std::vector<double> yj = y0;
      std::vector<double> yj_img = y0_img;
      double yj_res = y0_res;
      while (yj_res > eps_k) {
        combine_into(y0, yj_img, lambda_k, ynext);
        const double disp = distance_of(ynext, yj, norm);
        if (distance_of(yj, y0, norm) <= D) {
          const double res = drv.evaluate(ynext, yj_img);
          drv.record(ynext, {.lambda = lambda_k,
                             .eps_k = eps_k,
                             .D_estimate = D,
                             .phase = k,
                             .displacement = disp});
          yj.swap(ynext);
          yj_res = res;
        } else {
          D *= 2.0;
          lambda_k = lambda_of();
          // Score the freshly formed point so the working iterate can be
          // reset to the better of {y_{j+1}, y_0}; this is a counted query.
          const double res = drv.evaluate(ynext, ynext_img);
          drv.record(ynext, {.lambda = lambda_k,
                             .eps_k = eps_k,
                             .D_estimate = D,
                             .phase = k,
                             .displacement = disp});
          if (res < y0_res) {
            yj = ynext;
            yj_img = ynext_img;
            yj_res = res;
          } else {
            yj = y0;
            yj_img = y0_img;
            yj_res = y0_res;
          }
        }
      }
      xhat = std::move(yj);
      xhat_img = std::move(yj_img);
      xhat_res = yj_res;
      drv.flush();  // the phase output is always recorded
    }
    return drv.finish(Termination::TargetReached, xhat, xhat_res);
  } catch (const BudgetExceeded&) {
    return drv.finish_best(Termination::BudgetExhausted);
  } catch (const NonFiniteImage&) {
    return drv.finish_best(Termination::NonFinite);
  }
}

// ---------------------------------------------------------------------------
// Resolvent evaluation: Picard-iterate the contraction
//   S_{x,tau}(y) = x/(1+tau) + tau/(1+tau) T(y)
// from y_0 = x until the displacement certifies ||y - S(y)|| small enough
// that the returned point is within tol of the true resolvent R_tau(x).

inline RealVector resolvent(CountedOperator& op, const RealVector& x, double tau, double tol,
                            std::uint64_t budget = 1000000) {
  if (!(tau > 0.0)) throw std::invalid_argument("resolvent: tau must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("resolvent: tol must be > 0");
  const double gamma = op.spec().gamma_known().value_or(1.0);
  const double q = tau * gamma / (1.0 + tau);
  if (q >= 1.0) {
    throw ContractionFailure("resolvent: tau*gamma/(1+tau) >= 1, inner map is not a contraction");
  }
  constexpr double kTiny = 1e-12;
  const double threshold = tol * (1.0 - q) / std::max(q, kTiny);
  const std::vector<double>& anchor = x.coords();
  std::vector<double> y = anchor;
  std::vector<double> img;
  std::vector<double> next;
  double disp_prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t j = 0; j < budget; ++j) {
    op.evaluate(y, img);
    combine_into(anchor, img, 1.0 / (1.0 + tau), next);
    const double disp = distance_of(next, y, op.spec().norm());
    y.swap(next);
    if (disp <= threshold) return RealVector(y);
    if (disp > disp_prev * (1.0 + 1e-9)) {
      throw ContractionFailure("resolvent: displacements grew; operator exceeds claimed gamma");
    }
    disp_prev = disp;
  }
  throw BudgetExceeded{};
}

}  // namespace fplab
