// fplab/bounds.hpp
//
// Closed-form iteration-count bounds for the fixed-step anchored iteration
// and its restarted/gradual variants. Each evaluator returns the step size
// the bound prescribes together with the iteration count k, computed exactly
// from the closed form. A log argument <= 1 means "already converged" and
// yields k = 0; a k beyond 2^53 (no budget could ever reach it) saturates
// and sets k_diverged.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace fplab {

struct GammaOutOfRange : std::domain_error {
  explicit GammaOutOfRange(const std::string& what) : std::domain_error(what) {}
};

struct BoundInputs {
  double eps0 = 0.0;                 // initial residual ||T(x0) - x0||
  double eps = 0.0;                  // target residual
  double gamma = 1.0;                // Lipschitz constant
  std::optional<double> D_star;      // bound on ||x0 - x*||
  std::optional<double> D;           // diameter of the iterate set
  std::optional<double> beta;
  std::optional<double> beta_prime;
  std::optional<double> mu;          // error-bound constant
};

struct BoundValue {
  double lambda = 0.0;
  std::uint64_t k = 0;
  std::optional<double> error_level;  // only the mild-expansion corollary sets this
  bool k_diverged = false;            // k saturated at 2^53
};

namespace detail {

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("bounds: ") + name + " must be positive and finite");
  }
}

inline void require_unit_open(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string("bounds: ") + name + " must lie in (0,1)");
  }
}

// ceil() with the already-converged and divergence conventions above.
inline std::uint64_t ceil_count(double real_k, bool& diverged) {
  diverged = false;
  if (!(real_k > 0.0)) return 0;
  if (!std::isfinite(real_k) || real_k >= kMaxExactInteger) {
    diverged = true;
    return static_cast<std::uint64_t>(kMaxExactInteger);
  }
  return static_cast<std::uint64_t>(std::ceil(real_k));
}

}  // namespace detail

// Fixed-step rule for contractive/nonexpansive operators:
//   lambda = eps / (4 D* + eps),
//   k = ceil( ln(2 eps0 / eps) / (ln(1/(1-lambda)) + ln(1/gamma)) ).
inline BoundValue bound_fixed_step(const BoundInputs& in) {
  detail::require_positive(in.eps0, "eps0");
  detail::require_positive(in.eps, "eps");
  if (!in.D_star) throw std::invalid_argument("bound_fixed_step: D_star is required");
  detail::require_positive(*in.D_star, "D_star");
  if (!(in.gamma > 0.0 && in.gamma <= 1.0)) {
    throw GammaOutOfRange("bound_fixed_step: gamma must lie in (0,1]");
  }
  BoundValue out;
  out.lambda = in.eps / (4.0 * *in.D_star + in.eps);
  const double arg = 2.0 * in.eps0 / in.eps;
  if (arg <= 1.0) return out;  // k = 0: already converged
  const double denom = std::log(1.0 / (1.0 - out.lambda)) + std::log(1.0 / in.gamma);
  out.k = detail::ceil_count(std::log(arg) / denom, out.k_diverged);
  return out;
}

// Fixed-step rule for mildly expansive operators:
//   lambda = (beta eps / D) / (1 + beta eps / D),
//   k = ceil( ln(eps0 / ((1-beta) eps)) / (-ln((1-lambda) gamma)) ),
// valid only while (1-lambda) gamma < 1, i.e. gamma < 1 + beta eps / D.
inline BoundValue bound_mild(const BoundInputs& in) {
  detail::require_positive(in.eps0, "eps0");
  detail::require_positive(in.eps, "eps");
  detail::require_positive(in.gamma, "gamma");
  if (!in.D) throw std::invalid_argument("bound_mild: D is required");
  detail::require_positive(*in.D, "D");
  if (!in.beta) throw std::invalid_argument("bound_mild: beta is required");
  detail::require_unit_open(*in.beta, "beta");
  const double ratio = *in.beta * in.eps / *in.D;
  if (in.gamma >= 1.0 + ratio) {
    throw GammaOutOfRange("bound_mild: gamma >= 1 + beta*eps/D, the iteration does not contract");
  }
  BoundValue out;
  out.lambda = ratio / (1.0 + ratio);
  const double arg = in.eps0 / ((1.0 - *in.beta) * in.eps);
  if (arg <= 1.0) return out;
  const double denom = -std::log((1.0 - out.lambda) * in.gamma);
  out.k = detail::ceil_count(std::log(arg) / denom, out.k_diverged);
  return out;
}

// Mild-expansion corollary with the larger step lambda = 1 - beta/gamma:
//   k = ceil( ln(eps0/eps) / ln(1/beta) ),
//   residual level (gamma/beta - 1) D + eps; when beta is the particular
//   choice 1 - eps/(2 gamma D), the level tightens to (gamma - 1) D + eps.
inline BoundValue bound_corollary_mild(const BoundInputs& in) {
  detail::require_positive(in.eps0, "eps0");
  detail::require_positive(in.eps, "eps");
  if (!(in.gamma > 1.0)) {
    throw GammaOutOfRange("bound_corollary_mild: gamma must be > 1");
  }
  if (!in.D) throw std::invalid_argument("bound_corollary_mild: D is required");
  detail::require_positive(*in.D, "D");
  if (!in.beta) throw std::invalid_argument("bound_corollary_mild: beta is required");
  detail::require_unit_open(*in.beta, "beta");
  const double beta = *in.beta;
  BoundValue out;
  out.lambda = 1.0 - beta / in.gamma;
  const double arg = in.eps0 / in.eps;
  if (arg > 1.0) {
    out.k = detail::ceil_count(std::log(arg) / std::log(1.0 / beta), out.k_diverged);
  }
  const double particular = 1.0 - in.eps / (2.0 * in.gamma * *in.D);
  if (beta == particular) {
    out.error_level = (in.gamma - 1.0) * *in.D + in.eps;
  } else {
    out.error_level = (in.gamma / beta - 1.0) * *in.D + in.eps;
  }
  return out;
}

// Restart rule under a local error bound with constant mu:
//   lambda_max = (mu beta / 4) / (1 + mu beta / 4),
//   k = ceil( ln(2/beta) / ln(1/(1-lambda_max)) )   per restart phase.
inline BoundValue bound_leb(double beta, double mu) {
  detail::require_unit_open(beta, "beta");
  detail::require_positive(mu, "mu");
  const double t = mu * beta / 4.0;
  BoundValue out;
  out.lambda = t / (1.0 + t);
  const double arg = 2.0 / beta;  // > 1 always since beta < 1
  out.k = detail::ceil_count(std::log(arg) / std::log(1.0 / (1.0 - out.lambda)), out.k_diverged);
  return out;
}

// Residual plateau of the gradual scheme on a gamma-expansive operator:
//   eps_bar = (D / beta^2) (gamma - 1) / (1 - beta').
// beta = 1 and beta' = 0 are admissible boundary parameters here.
inline double bound_ghal_expansive_error(double D, double gamma, double beta,
                                         double beta_prime) {
  detail::require_positive(D, "D");
  if (!(gamma > 1.0)) {
    throw GammaOutOfRange("bound_ghal_expansive_error: gamma must be > 1");
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("bounds: beta must lie in (0,1]");
  }
  if (!(beta_prime >= 0.0 && beta_prime < 1.0)) {
    throw std::invalid_argument("bounds: beta_prime must lie in [0,1)");
  }
  return (D / (beta * beta)) * (gamma - 1.0) / (1.0 - beta_prime);
}

}  // namespace fplab
