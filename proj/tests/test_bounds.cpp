#include <catch2/catch_amalgamated.hpp>

#include <cstdint>

#include <fplab/bounds.hpp>

using namespace fplab;

namespace {

BoundInputs inputs(double eps0, double eps, double gamma) {
  BoundInputs in;
  in.eps0 = eps0;
  in.eps = eps;
  in.gamma = gamma;
  return in;
}

}  // namespace

TEST_CASE("fixed-step bound reproduces the frozen reference point", "[bounds]") {
  BoundInputs in = inputs(1.0, 0.01, 1.0);
  in.D_star = 1.0;
  BoundValue b = bound_fixed_step(in);
  CHECK(b.lambda == 0.01 / 4.01);
  CHECK(b.lambda == 0.0024937655860349131);
  CHECK(b.k == 2122);
  CHECK_FALSE(b.k_diverged);
  CHECK_FALSE(b.error_level.has_value());
}

TEST_CASE("fixed-step bound uses the contraction factor when gamma < 1", "[bounds]") {
  BoundInputs in = inputs(1.0, 1e-3, 0.5);
  in.D_star = 2.0;
  BoundValue b = bound_fixed_step(in);
  CHECK(b.lambda == 1e-3 / (8.0 + 1e-3));
  CHECK(b.k == 11);
}

TEST_CASE("fixed-step bound edge cases", "[bounds]") {
  BoundInputs in = inputs(1.0, 2.5, 1.0);  // eps >= 2*eps0: already done
  in.D_star = 1.0;
  CHECK(bound_fixed_step(in).k == 0);

  BoundInputs bad = inputs(1.0, 0.01, 1.5);
  bad.D_star = 1.0;
  CHECK_THROWS_AS(bound_fixed_step(bad), GammaOutOfRange);

  BoundInputs missing = inputs(1.0, 0.01, 1.0);
  CHECK_THROWS_AS(bound_fixed_step(missing), std::invalid_argument);
}

TEST_CASE("fixed-step count saturates rather than overflowing", "[bounds]") {
  BoundInputs in = inputs(1.0, 1e-300, 1.0);
  in.D_star = 1e290;
  BoundValue b = bound_fixed_step(in);
  CHECK(b.k_diverged);
  CHECK(b.k == (std::uint64_t{1} << 53));
}

TEST_CASE("mild-expansion bound and its admissibility window", "[bounds]") {
  BoundInputs in = inputs(1.0, 0.1, 1.02);
  in.D = 1.0;
  in.beta = 0.5;
  BoundValue b = bound_mild(in);
  CHECK(b.lambda == 0.047619047619047616);  // (0.05)/(1.05)
  CHECK(b.k == 104);

  // gamma at or beyond 1 + beta*eps/D is rejected
  BoundInputs bad = inputs(1.0, 0.1, 1.05);
  bad.D = 1.0;
  bad.beta = 0.5;
  CHECK_THROWS_AS(bound_mild(bad), GammaOutOfRange);
}

TEST_CASE("mild corollary reports its error level", "[bounds]") {
  BoundInputs in = inputs(1.0, 0.01, 2.0);
  in.D = 1.0;
  in.beta = 0.5;
  BoundValue b = bound_corollary_mild(in);
  CHECK(b.lambda == 0.75);  // 1 - beta/gamma
  CHECK(b.k == 7);          // ceil(ln(100)/ln(2))
  REQUIRE(b.error_level.has_value());
  CHECK(*b.error_level == 3.01);  // (gamma/beta - 1)*D + eps

  CHECK_THROWS_AS(bound_corollary_mild(inputs(1.0, 0.01, 1.0)), GammaOutOfRange);
}

TEST_CASE("mild corollary recognizes the balanced shrink factor", "[bounds]") {
  // With beta = 1 - eps/(2*gamma*D) the error level collapses to
  // (gamma - 1)*D + eps.
  const double gamma = 1.01, D = 1.0, eps = 0.02;
  BoundInputs in = inputs(1.0, eps, gamma);
  in.D = D;
  in.beta = 1.0 - eps / (2.0 * gamma * D);
  BoundValue b = bound_corollary_mild(in);
  REQUIRE(b.error_level.has_value());
  CHECK(*b.error_level == (gamma - 1.0) * D + eps);
}

TEST_CASE("error-bound step size and phase count", "[bounds]") {
  BoundValue a = bound_leb(0.5, 1.0);
  CHECK(a.lambda == 1.0 / 9.0);
  CHECK(a.k == 12);

  BoundValue b = bound_leb(0.5, 4.0);
  CHECK(b.lambda == 1.0 / 3.0);
  CHECK(b.k == 4);

  CHECK_THROWS_AS(bound_leb(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bound_leb(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("expansive error level matches the frozen reference", "[bounds]") {
  const double eps_bar = bound_ghal_expansive_error(2.0, 1.0001, 0.975, 1.0 / 1.01);
  CHECK(eps_bar == 0.021249178172252737);

  // degenerate slack: beta = 1, beta' = 0 reduces to D*(gamma - 1)
  const double degenerate = bound_ghal_expansive_error(1.0, 1.01, 1.0, 0.0);
  CHECK(degenerate == (1.0 / 1.0) * (1.01 - 1.0) / 1.0);

  CHECK_THROWS_AS(bound_ghal_expansive_error(2.0, 1.0, 0.975, 0.5), GammaOutOfRange);
  CHECK_THROWS_AS(bound_ghal_expansive_error(2.0, 1.01, 0.975, 1.0), std::invalid_argument);
}
