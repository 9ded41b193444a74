#pragma once

// Small self-contained special-function kernel: normal CDF/quantile,
// log-factorial, Kummer's confluent hypergeometric M(a,b,z), and a
// bracketing root finder. Everything is a pure function of its arguments.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "evscale/errors.hpp"

namespace evscale {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
inline constexpr double kSqrt2Pi = 2.506628274631000502415765284811045253;

// Standard normal CDF via the complementary error function, accurate in both
// tails.
inline double phi_cdf(double u) {
  if (!std::isfinite(u))
    throw domain_error("phi_cdf: argument must be finite");
  return 0.5 * std::erfc(-u / kSqrt2);
}

// Standard normal density.
inline double phi_pdf(double u) {
  return std::exp(-0.5 * u * u) / kSqrt2Pi;
}

// Inverse normal CDF. Seeded with Acklam's rational approximation
// (https://web.archive.org/web/20151030215612/http://home.online.no/~pjacklam/notes/invnorm/)
// and polished with two Halley steps against phi_cdf, which brings the
// round-trip error down to a few ulp.
inline double phi_inv(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw domain_error("phi_inv: p must lie in (0,1)");

  static constexpr double a[6] = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[6] = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  for (int i = 0; i < 2; ++i) {
    double err = phi_cdf(x) - p;
    double t = err / phi_pdf(x);
    x -= t / (1.0 + 0.5 * x * t); // Halley
  }
  return x;
}

namespace detail {

// ln(x!) - [x ln x - x + 0.5 ln(2 pi x)], i.e. the Stirling-series tail.
// For large x the first three series terms already leave an error below
// 1/(1680 x^7); for small x it is evaluated from the exact log-factorial.
double stirling_correction(double x);

inline const std::array<double, 1025>& ln_factorial_table() {
  static const std::array<double, 1025> table = [] {
    std::array<double, 1025> t{};
    long double acc = 0.0L;
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      acc += std::log(static_cast<long double>(i));
      t[i] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

} // namespace detail

// ln(n!). Exact summation of ln(i) below `exact_threshold`, Stirling-series
// log-gamma above it.
inline double ln_factorial(std::uint64_t n,
                           std::uint64_t exact_threshold = 1024) {
  const auto& table = detail::ln_factorial_table();
  if (n < exact_threshold) {
    if (n < table.size()) return table[n];
    long double acc = table.back();
    for (std::uint64_t i = table.size(); i <= n; ++i)
      acc += std::log(static_cast<long double>(i));
    return static_cast<double>(acc);
  }
  double x = static_cast<double>(n);
  return x * std::log(x) - x + 0.5 * std::log(2.0 * kPi * x) +
         detail::stirling_correction(x);
}

namespace detail {

inline double stirling_correction(double x) {
  if (x >= 1024.0) {
    double x2 = x * x;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * x2)) / x2) / x;
  }
  // Small arguments: difference against the tabulated exact value. Only
  // integer x reaches this branch in practice.
  std::uint64_t n = static_cast<std::uint64_t>(x + 0.5);
  return ln_factorial_table()[n] -
         (x * std::log(x) - x + 0.5 * std::log(2.0 * kPi * x));
}

} // namespace detail

// Parameters of Kummer's M(a,b,z). b must be positive; z is restricted to
// [0, 50], the range exercised by the stopping-time moments (c <= 10).
struct KummerParams {
  double a = 0.0;
  double b = 1.0;
  double z = 0.0;
};

inline constexpr int kKummerMaxTerms = 512;

// M(a,b,z) = sum_j (a)_j z^j / ((b)_j j!) by forward term recurrence
// t_{j+1} = t_j (a+j) z / ((b+j)(j+1)). The series terminates exactly when a
// is a non-positive integer (the (a+j) factor reaches zero). No asymptotic
// switching: the use range here keeps the terms well behaved.
inline double kummer_m(const KummerParams& p) {
  if (!(p.b > 0.0))
    throw domain_error("kummer_m: b must be positive");
  if (!(p.z >= 0.0 && p.z <= 50.0))
    throw domain_error("kummer_m: z outside supported range [0,50]");

  double sum = 1.0;
  double term = 1.0;
  for (int j = 0; j < kKummerMaxTerms; ++j) {
    term *= (p.a + j) * p.z / ((p.b + j) * (j + 1));
    if (term == 0.0) return sum; // terminating (polynomial) case
    sum += term;
    if (std::fabs(term) <= 1e-16 * std::fabs(sum)) return sum;
  }
  throw numeric_error("kummer_m: series did not converge within " +
                      std::to_string(kKummerMaxTerms) + " terms");
}

inline double kummer_m(double a, double b, double z) {
  return kummer_m(KummerParams{a, b, z});
}

// Locates a root of f in [lo, hi] by bisection, with a secant probe on
// alternate iterations for faster convergence. Requires a sign change over
// the bracket; stops once |f| <= f_tol or the bracket width <= x_tol.
inline double find_root(const std::function<double(double)>& f, double lo,
                        double hi, double x_tol = 1e-12,
                        double f_tol = 1e-12) {
  double fa = f(lo);
  double fb = f(hi);
  if (std::fabs(fa) <= f_tol) return lo;
  if (std::fabs(fb) <= f_tol) return hi;
  if ((fa > 0.0) == (fb > 0.0))
    throw bracket_error("find_root: no sign change over bracket");

  double a = lo, b = hi;
  for (int iter = 0; iter < 300; ++iter) {
    double mid = 0.5 * (a + b);
    double probe = mid;
    if ((iter & 1) != 0 && fb != fa) {
      double s = b - fb * (b - a) / (fb - fa);
      if (s > a && s < b) probe = s;
    }
    double fp = f(probe);
    if (std::fabs(fp) <= f_tol) return probe;
    if ((fp > 0.0) == (fa > 0.0)) {
      a = probe;
      fa = fp;
    } else {
      b = probe;
      fb = fp;
    }
    if (b - a <= x_tol) break;
  }
  return 0.5 * (a + b);
}

} // namespace evscale
