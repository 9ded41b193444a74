#pragma once

// Exact (non-asymptotic) coin-tossing computations: the uniform-vs-fair
// likelihood ratio, exact binomial tail p-values under the fair null, and
// the u/k/sigma_n parametrization shared by the rest of the library.
//
// Arithmetic runs on two paths: exact integer/rational arithmetic (Boost
// cpp_int) for n up to kExactArithmeticMaxN, and a cancellation-free
// log-space evaluation above that. The two paths overlap so they can be
// cross-validated.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "evscale/errors.hpp"
#include "evscale/special.hpp"

namespace evscale {

using big_int = boost::multiprecision::cpp_int;
using big_rational = boost::multiprecision::cpp_rational;

// Largest n handled by the exact rational path of the public operations.
inline constexpr std::int64_t kExactArithmeticMaxN = 1024;

// An observed coin-toss outcome: n tosses, k heads.
struct Experiment {
  std::int64_t n;
  std::int64_t k;

  Experiment(std::int64_t n_, std::int64_t k_) : n(n_), k(k_) {
    if (n < 1) throw domain_error("Experiment: n must be positive");
    if (k < 0 || k > n) throw domain_error("Experiment: k must lie in [0,n]");
  }
};

// Null parametrization: k = p0*n - u*sigma_n, sigma_n = c0*sqrt(n),
// c0 = sqrt(p0*q0). k below the mean gives u > 0.
struct Parametrization {
  double p0;
  double q0;
  double sigma_n;
  double u;
  double c0;
};

inline Parametrization standardize(const Experiment& e, double p0) {
  if (!(p0 > 0.0 && p0 < 1.0))
    throw domain_error("standardize: p0 must lie in (0,1)");
  double q0 = 1.0 - p0;
  double c0 = std::sqrt(p0 * q0);
  double sigma_n = c0 * std::sqrt(static_cast<double>(e.n));
  double u = (p0 * static_cast<double>(e.n) - static_cast<double>(e.k)) /
             sigma_n;
  return Parametrization{p0, q0, sigma_n, u, c0};
}

namespace detail {

inline big_int big_factorial(std::int64_t m) {
  big_int f = 1;
  for (std::int64_t i = 2; i <= m; ++i) f *= i;
  return f;
}

inline big_int big_binomial(std::int64_t n, std::int64_t k) {
  k = std::min(k, n - k);
  big_int c = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    c *= (n - k + i);
    c /= i; // exact at every step
  }
  return c;
}

inline double ln_n_plus_1(std::int64_t n) {
  double nd = static_cast<double>(n);
  return std::log(nd) + std::log1p(1.0 / nd);
}

} // namespace detail

// LR for "p uniform on (0,1)" against "p = 1/2", as an exact rational:
// k!(n-k)!/n! * 2^n/(n+1). Intended for n up to a few thousand.
inline big_rational lr_uniform_vs_fair_rational(std::int64_t n,
                                                std::int64_t k) {
  Experiment e(n, k); // validates
  big_int numer = big_int(1) << static_cast<unsigned>(n);
  big_int denom = detail::big_binomial(n, k) * (n + 1);
  return big_rational(numer, denom);
}

// ln of the same likelihood ratio, evaluated without large cancellations so
// it stays accurate up to n ~ 10^12 and beyond. Small min(k,n-k) is summed
// directly; the central regime uses the Stirling form in which the big
// x*ln(x) terms cancel analytically, leaving only the series corrections.
inline double lr_uniform_vs_fair_log(std::int64_t n, std::int64_t k) {
  Experiment e(n, k);
  const std::int64_t kmin = std::min(k, n - k);
  const double nd = static_cast<double>(n);
  const double ln_np1 = detail::ln_n_plus_1(n);

  if (kmin == 0) return nd * std::log(2.0) - ln_np1;

  if (kmin <= 1024) {
    long double lnC = 0.0L;
    for (std::int64_t i = 1; i <= kmin; ++i) {
      lnC += std::log(static_cast<long double>(n - kmin + i));
      lnC -= std::log(static_cast<long double>(i));
    }
    return nd * std::log(2.0) - ln_np1 - static_cast<double>(lnC);
  }

  // k = (n/2)(1-z) with z = (n-2k)/n; |z| < 1 strictly here.
  const double d = static_cast<double>(n - 2 * k); // exact in double
  const double z = d / nd;
  const double lp = std::log1p(z);
  const double lm = std::log1p(-z);
  const double corr = detail::stirling_correction(static_cast<double>(kmin)) +
                      detail::stirling_correction(static_cast<double>(n - kmin)) -
                      detail::stirling_correction(nd);
  return 0.5 * (std::log(kPi / 2.0) + std::log(nd)) - ln_np1 +
         (0.5 * nd + 0.5) * (lp + lm) + 0.5 * d * (lp - lm) + corr;
}

// Exact value of the uniform-vs-fair likelihood ratio; rational arithmetic
// below kExactArithmeticMaxN, log space above. Symmetric in k <-> n-k.
inline double exact_lr_uniform_vs_fair(const Experiment& e) {
  if (e.n <= kExactArithmeticMaxN)
    return lr_uniform_vs_fair_rational(e.n, e.k).convert_to<double>();
  return std::exp(lr_uniform_vs_fair_log(e.n, e.k));
}

enum class Sided { one, two };

namespace detail {

// P(X <= kmin) for X ~ Binomial(n, 1/2) with kmin = min(k, n-k), exact.
inline big_rational binomial_tail_rational(std::int64_t n, std::int64_t kmin) {
  big_int sum = 0;
  big_int c = 1; // C(n,0)
  sum += c;
  for (std::int64_t i = 1; i <= kmin; ++i) {
    c *= (n - i + 1);
    c /= i;
    sum += c;
  }
  return big_rational(sum, big_int(1) << static_cast<unsigned>(n));
}

// Same tail in log space: descending ratio recurrence from the largest term.
inline double binomial_tail_log_space(std::int64_t n, std::int64_t kmin) {
  double ln_pmf = -ln_n_plus_1(n) - lr_uniform_vs_fair_log(n, kmin);
  double term = 1.0;
  double sum = 1.0;
  for (std::int64_t i = kmin; i >= 1; --i) {
    term *= static_cast<double>(i) / static_cast<double>(n - i + 1);
    sum += term;
    if (term <= 1e-18 * sum) break;
  }
  return std::exp(ln_pmf) * sum;
}

} // namespace detail

// Exact two-sided p-value as a rational: min(1, 2*min(P(X<=k), P(X>=k))),
// observed point included in each tail. One-sided: the tail on the observed
// side. Fair null only; valid for n up to a few thousand.
inline big_rational exact_p_value_fair_rational(const Experiment& e,
                                                Sided sided) {
  const std::int64_t kmin = std::min(e.k, e.n - e.k);
  big_rational tail = detail::binomial_tail_rational(e.n, kmin);
  if (sided == Sided::one) return tail;
  big_rational doubled = 2 * tail;
  return doubled > 1 ? big_rational(1) : doubled;
}

// Exact binomial p-value under the fair null. Rational arithmetic for
// n <= kExactArithmeticMaxN, stable log-space summation above.
inline double exact_p_value_fair(const Experiment& e, Sided sided) {
  if (e.n <= kExactArithmeticMaxN)
    return exact_p_value_fair_rational(e, sided).convert_to<double>();
  const std::int64_t kmin = std::min(e.k, e.n - e.k);
  double tail = detail::binomial_tail_log_space(e.n, kmin);
  if (sided == Sided::one) return tail;
  return std::min(1.0, 2.0 * tail);
}

// P(k heads | p uniform) = C(n,k) * B(k+1, n-k+1) for every k, in exact
// rational arithmetic. Each entry must come out as 1/(n+1).
inline std::vector<big_rational> uniform_marginal_check(std::int64_t n) {
  if (n < 0 || n > 2000)
    throw domain_error("uniform_marginal_check: n outside [0, 2000]");
  std::vector<big_rational> marginal;
  marginal.reserve(static_cast<std::size_t>(n) + 1);
  const big_int np1_fact = detail::big_factorial(n + 1);
  big_int fact_k = 1;                        // k!
  big_int fact_nk = detail::big_factorial(n); // (n-k)!
  big_int cnk = 1;                           // C(n,k)
  for (std::int64_t k = 0; k <= n; ++k) {
    if (k > 0) {
      fact_k *= k;
      fact_nk /= (n - k + 1);
      cnk *= (n - k + 1);
      cnk /= k;
    }
    big_rational beta(fact_k * fact_nk, np1_fact);
    marginal.push_back(cnk * beta);
  }
  return marginal;
}

// The k <= n/2 whose likelihood ratio is closest to 1, ties broken toward
// smaller k. Uses the monotonicity of LR in k on [0, n/2] (LR grows with
// u^2), so a binary search suffices.
inline Experiment find_neutral_k(std::int64_t n) {
  if (n < 1) throw domain_error("find_neutral_k: n must be positive");
  auto lr = [n](std::int64_t k) {
    return exact_lr_uniform_vs_fair(Experiment(n, k));
  };
  std::int64_t hi = n / 2;
  if (lr(hi) >= 1.0) return Experiment(n, hi);
  std::int64_t a = 0; // LR(0) = 2^n/(n+1) >= 1 always
  std::int64_t b = hi;
  while (b - a > 1) {
    std::int64_t mid = a + (b - a) / 2;
    (lr(mid) >= 1.0 ? a : b) = mid;
  }
  double da = lr(a) - 1.0;
  double db = 1.0 - lr(b);
  return Experiment(n, da <= db ? a : b);
}

} // namespace evscale
