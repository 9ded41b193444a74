#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "evscale/asymptotics.hpp"
#include "evscale/exact.hpp"
#include "evscale/special.hpp"

using Catch::Approx;
using namespace evscale;

TEST_CASE("lr_approx values") {
  // direct evaluation: sqrt(pi/2e4) * exp(6.845) = 11.7708, a hair above
  // the exact LR 11.78 at the same u
  CHECK(lr_approx(10000, 3.70) == Approx(11.7708).margin(0.01));
  CHECK(lr_approx(2.0 * kPi, 0.0) == 0.5);
  CHECK(lr_approx(1e11, 4.97) == Approx(0.916).margin(5e-3));
  CHECK_THROWS_AS(lr_approx(0.0, 1.0), domain_error);
}

TEST_CASE("lr_envelope contains the exact LR at the table rows") {
  auto contains_exact = [](std::int64_t n, std::int64_t k) {
    Experiment e(n, k);
    double u = standardize(e, 0.5).u;
    auto env = lr_envelope(n, u);
    double exact = exact_lr_uniform_vs_fair(e);
    INFO("n=" << n << " k=" << k << " exact=" << exact << " ["
              << env.lower << ", " << env.upper << "]");
    CHECK(env.contains(exact));
    CHECK(env.lower <= env.value);
    CHECK(env.value <= env.upper);
    CHECK(env.provenance == BoundProvenance::e1e2);
  };
  contains_exact(20, 6);    // exact 1.288
  contains_exact(100, 50);  // center case
  contains_exact(1000, 460); // exact 0.972
}

TEST_CASE("lr_envelope traps the exact LR across the proven regime") {
  for (std::int64_t n : {20, 100, 1000, 10000}) {
    std::int64_t violations = 0;
    for (std::int64_t k = (n + 3) / 4; 4 * k <= 3 * n; ++k) {
      Experiment e(n, k);
      auto env = lr_envelope(n, standardize(e, 0.5).u);
      if (!env.contains(exact_lr_uniform_vs_fair(e))) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("lr_envelope rejects the unproven regime") {
  CHECK_THROWS_AS(lr_envelope(100, 5.1), domain_error); // needs |u| <= 5
  CHECK_NOTHROW(lr_envelope(100, 5.0));
}

TEST_CASE("p_approx relative error ladder") {
  auto rel_err = [](double u) {
    double truth = 2.0 * phi_cdf(-u);
    return std::fabs(p_approx(u).value - truth) / truth;
  };
  CHECK(rel_err(2.0) < 0.19);
  CHECK(rel_err(3.0) < 0.10);
  CHECK(rel_err(5.0) < 0.04);
}

TEST_CASE("p_approx Mills bounds contain the true tail") {
  for (double u : {0.5, 1.0, 2.0, 3.0, 5.0, 8.0}) {
    auto env = p_approx(u);
    double truth = 2.0 * phi_cdf(-u);
    INFO("u=" << u);
    CHECK(env.lower <= truth);
    CHECK(truth <= env.upper);
    CHECK(env.provenance == BoundProvenance::mills);
    // the leading-order value overshoots the tail by construction
    CHECK(env.value >= env.upper);
  }
  CHECK_THROWS_AS(p_approx(0.0), domain_error);
}

TEST_CASE("p_from_lr reproduces the table p-values approximately") {
  CHECK(std::fabs(p_from_lr(1000000, 1.001) - 0.00026) / 0.00026 < 0.10);
  CHECK(std::fabs(p_from_lr(10000, 1.002) - 0.00318) / 0.00318 < 0.10);
  CHECK_THROWS_AS(p_from_lr(1, 0.5), domain_error); // log argument below 1
}

TEST_CASE("p_from_lr round trip through lr_approx") {
  for (std::int64_t n : {std::int64_t(10000), std::int64_t(1000000)}) {
    for (double u = 2.5; u <= 5.0; u += 0.25) {
      double composed = p_from_lr(n, lr_approx(double(n), u));
      CHECK(composed == Approx(p_approx(u).value).epsilon(0.02));
    }
  }
}

TEST_CASE("lr_pvalue_under_h1 r formula") {
  auto res = lr_pvalue_under_h1(400, 1.0);
  CHECK(res.r == Approx(21.0 / 401.0).epsilon(1e-15));
  CHECK_FALSE(res.within_proven_regime); // r ~ 0.0524 > 0.05

  auto maxed = lr_pvalue_under_h1(400, 20.0); // v = sqrt(n)
  CHECK(maxed.r == 1.0);

  CHECK_THROWS_AS(lr_pvalue_under_h1(400, 20.5), domain_error);
}

TEST_CASE("lr_pvalue_under_h1 ell tracks the exact LR") {
  auto res = lr_pvalue_under_h1(10000, 3.70);
  CHECK(res.r == Approx(371.0 / 10001.0).epsilon(1e-15));
  CHECK(res.within_proven_regime);
  double exact = exact_lr_uniform_vs_fair(Experiment(10000, 4815));
  CHECK(std::fabs(res.ell - exact) / exact < 0.10);
}

TEST_CASE("lr_pvalue_under_h1 r is a valid probability") {
  std::int64_t ns[] = {1, 10, 1000, 123457};
  for (std::int64_t n : ns) {
    double root = std::sqrt(double(n));
    for (double frac : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      auto res = lr_pvalue_under_h1(n, frac * root);
      CHECK(res.r >= 1.0 / (double(n) + 1.0));
      CHECK(res.r <= 1.0);
    }
  }
}
