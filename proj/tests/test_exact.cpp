#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "evscale/exact.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace evscale;

TEST_CASE("Experiment validation") {
  CHECK_THROWS_AS(Experiment(0, 0), domain_error);
  CHECK_THROWS_AS(Experiment(10, -1), domain_error);
  CHECK_THROWS_AS(Experiment(10, 11), domain_error);
}

TEST_CASE("standardize matches the paper's parametrization") {
  CHECK(standardize(Experiment(20, 6), 0.5).u == Approx(1.789).margin(5e-4));
  CHECK(standardize(Experiment(100, 50), 0.5).u == 0.0);
  CHECK(standardize(Experiment(10000, 4815), 0.5).u == Approx(3.70).margin(1e-12));
  CHECK_THROWS_AS(standardize(Experiment(10, 5), 0.0), domain_error);
  CHECK_THROWS_AS(standardize(Experiment(10, 5), 1.0), domain_error);
}

TEST_CASE("Parametrization invariants on random inputs") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dp(0.02, 0.98);
  std::uniform_int_distribution<std::int64_t> dn(1, 1000000);
  for (int i = 0; i < 500; ++i) {
    std::int64_t n = dn(rng);
    std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, n)(rng);
    double p0 = dp(rng);
    auto par = standardize(Experiment(n, k), p0);
    CHECK(par.q0 == 1.0 - p0);
    CHECK(par.sigma_n == Approx(par.c0 * std::sqrt(double(n))).epsilon(1e-14));
    double k_back = p0 * double(n) - par.u * par.sigma_n;
    CHECK(k_back == Approx(double(k)).margin(1e-9 * std::max<double>(1.0, double(n))));
  }
}

TEST_CASE("exact LR matches the direct factorial oracle") {
  CHECK(lr_uniform_vs_fair_rational(2, 1) == oracles::big_rational(2, 3));
  for (int n = 1; n <= 40; ++n) {
    for (int k = 0; k <= n; ++k) {
      CHECK(lr_uniform_vs_fair_rational(n, k) == oracles::lr_uniform_vs_fair(n, k));
    }
  }
}

TEST_CASE("exact LR printed values") {
  CHECK(exact_lr_uniform_vs_fair(Experiment(20, 6)) == Approx(1.288).margin(5e-4));
  CHECK(exact_lr_uniform_vs_fair(Experiment(1000000, 498172)) ==
        Approx(1.001).margin(5e-4));
}

TEST_CASE("exact LR symmetry in k <-> n-k") {
  std::mt19937 rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    int n = std::uniform_int_distribution<int>(1, 200)(rng);
    int k = std::uniform_int_distribution<int>(0, n)(rng);
    CHECK(lr_uniform_vs_fair_rational(n, k) ==
          lr_uniform_vs_fair_rational(n, n - k));
  }
}

TEST_CASE("exact LR is monotone toward the mean") {
  for (int n : {17, 40, 101}) {
    double prev = exact_lr_uniform_vs_fair(Experiment(n, 0));
    for (int k = 1; 2 * k <= n; ++k) {
      double cur = exact_lr_uniform_vs_fair(Experiment(n, k));
      CHECK(cur <= prev * (1.0 + 1e-12));
      prev = cur;
    }
  }
}

TEST_CASE("rational and log-space paths agree") {
  for (std::int64_t n : {500, 1000}) {
    for (std::int64_t k = 0; k <= n; ++k) {
      double exact = lr_uniform_vs_fair_rational(n, k).convert_to<double>();
      double logged = std::exp(lr_uniform_vs_fair_log(n, k));
      CHECK(logged == Approx(exact).epsilon(1e-9));
    }
  }
  // central regime above the rational dispatch threshold (Stirling branch)
  for (std::int64_t k : {1200, 1500, 1800, 2047}) {
    double exact = lr_uniform_vs_fair_rational(3000, k).convert_to<double>();
    double logged = std::exp(lr_uniform_vs_fair_log(3000, k));
    CHECK(logged == Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("exact p-values match enumeration over all sequences") {
  for (int n = 1; n <= 16; ++n) {
    auto tally = oracles::sequence_tally(n);
    for (int k = 0; k <= n; ++k) {
      Experiment e(n, k);
      CHECK(exact_p_value_fair_rational(e, Sided::one) ==
            oracles::enum_p_one_sided(tally, n, k));
      CHECK(exact_p_value_fair_rational(e, Sided::two) ==
            oracles::enum_p_two_sided(tally, n, k));
    }
  }
}

TEST_CASE("exact p-value printed values") {
  CHECK(exact_p_value_fair(Experiment(20, 6), Sided::two) ==
        Approx(0.11532).margin(5e-6));
  CHECK(exact_p_value_fair(Experiment(100, 40), Sided::two) ==
        Approx(0.05689).margin(5e-6));
  CHECK(exact_p_value_fair(Experiment(10, 5), Sided::two) == 1.0);
}

TEST_CASE("p-value log-space path agrees with rational path") {
  for (std::int64_t n : {500, 1000}) {
    for (std::int64_t k = 0; k <= n; k += 7) {
      Experiment e(n, k);
      double exact =
          exact_p_value_fair_rational(e, Sided::two).convert_to<double>();
      double logged = std::min(
          1.0, 2.0 * detail::binomial_tail_log_space(n, std::min(k, n - k)));
      if (exact > 1e-300) CHECK(logged == Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("uniform marginal is flat at 1/(n+1) and sums to 1") {
  auto m1 = uniform_marginal_check(1);
  REQUIRE(m1.size() == 2);
  CHECK(m1[0] == oracles::big_rational(1, 2));
  CHECK(m1[1] == oracles::big_rational(1, 2));

  auto m0 = uniform_marginal_check(0);
  REQUIRE(m0.size() == 1);
  CHECK(m0[0] == 1);

  for (int n : {2, 7, 20, 53, 200}) {
    auto m = uniform_marginal_check(n);
    REQUIRE(m.size() == static_cast<std::size_t>(n) + 1);
    oracles::big_rational sum = 0;
    for (const auto& q : m) {
      CHECK(q == oracles::big_rational(1, n + 1));
      sum += q;
    }
    CHECK(sum == 1);
  }
}

TEST_CASE("find_neutral_k reproduces the table rows") {
  CHECK(find_neutral_k(20).k == 6);
  CHECK(find_neutral_k(10000).k == 4852);
  CHECK(find_neutral_k(100000).k == 49474);
}

TEST_CASE("find_neutral_k agrees with a linear scan for small n") {
  for (int n = 1; n <= 120; ++n) {
    int best_k = 0;
    double best = std::fabs(exact_lr_uniform_vs_fair(Experiment(n, 0)) - 1.0);
    for (int k = 1; 2 * k <= n; ++k) {
      double d = std::fabs(exact_lr_uniform_vs_fair(Experiment(n, k)) - 1.0);
      if (d < best) {
        best = d;
        best_k = k;
      }
    }
    CHECK(find_neutral_k(n).k == best_k);
  }
}
