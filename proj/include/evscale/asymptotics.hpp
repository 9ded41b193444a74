#pragma once

// Leading-order approximation formulas for the uniform-vs-fair likelihood
// ratio and the two-sided p-value, together with guaranteed error envelopes:
// the exact LR is trapped between Stirling-series bounds, and the true
// p-value between two-sided Mills-ratio bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "evscale/errors.hpp"
#include "evscale/special.hpp"

namespace evscale {

enum class BoundProvenance { e1e2, mills, truncation, none };

// A guaranteed interval [lower, upper] for an exact quantity, with a central
// estimate and the origin of the bounds. Note that for the p-value
// approximation the estimate deliberately sits above the interval: the
// leading-order formula overshoots the true tail, which is exactly what the
// bounds quantify.
struct ErrorEnvelope {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  BoundProvenance provenance = BoundProvenance::none;

  bool contains(double x) const { return lower <= x && x <= upper; }
};

// sqrt(pi/(2n)) * exp(u^2/2). Takes a real n so scale arguments like 2*pi
// work; callers normally pass the toss count.
inline double lr_approx(double n, double u) {
  if (!(n > 0.0)) throw domain_error("lr_approx: n must be positive");
  return std::sqrt(kPi / (2.0 * n)) * std::exp(0.5 * u * u);
}

// Guaranteed interval for the exact LR, from
//   (1+E1) LR = sqrt(pi/2n) exp(u^2/2 (1+E2)),
//   0 <= E1 <= 1/n,  u^2/(6n) - 4/(3n) <= E2 <= 2u^2/(9n) - 1/n,
// proven for n <= 4k <= 3n, i.e. |u| <= sqrt(n)/2.
inline ErrorEnvelope lr_envelope(std::int64_t n, double u) {
  if (n < 1) throw domain_error("lr_envelope: n must be positive");
  const double nd = static_cast<double>(n);
  if (!(std::fabs(u) <= 0.5 * std::sqrt(nd)))
    throw domain_error("lr_envelope: requires |u| <= sqrt(n)/2");
  const double u2 = u * u;
  // assembled in log space; near u = sqrt(n)/2 the raw exp would overflow
  // even where the bounds themselves are representable
  const double ln_base = 0.5 * std::log(kPi / (2.0 * nd));
  const double e2_lo = u2 / (6.0 * nd) - 4.0 / (3.0 * nd);
  const double e2_hi = 2.0 * u2 / (9.0 * nd) - 1.0 / nd;
  const double lower =
      std::exp(ln_base + 0.5 * u2 * (1.0 + e2_lo) - std::log1p(1.0 / nd));
  const double upper = std::exp(ln_base + 0.5 * u2 * (1.0 + e2_hi));
  const double value = std::clamp(lr_approx(nd, u), lower, upper);
  return ErrorEnvelope{value, lower, upper, BoundProvenance::e1e2};
}

// Leading behavior of the two-sided p-value, sqrt(2/(pi u^2)) exp(-u^2/2),
// with the true 2*Phi(-|u|) trapped between the Mills-ratio bounds
// value * u^2/(u^2+1) and value * (u^2+2)/(u^2+3).
inline ErrorEnvelope p_approx(double u) {
  if (!(u != 0.0) || !std::isfinite(u))
    throw domain_error("p_approx: u must be finite and nonzero");
  const double u2 = u * u;
  const double value = std::sqrt(2.0 / (kPi * u2)) * std::exp(-0.5 * u2);
  const double lower = value * u2 / (u2 + 1.0);
  const double upper = value * (u2 + 2.0) / (u2 + 3.0);
  return ErrorEnvelope{value, lower, upper, BoundProvenance::mills};
}

// The p-value implied by an observed LR at sample size n:
// 1/sqrt(n LR^2 ln(2 n LR^2 / pi)).
inline double p_from_lr(std::int64_t n, double lr) {
  if (n < 1) throw domain_error("p_from_lr: n must be positive");
  if (!(lr > 0.0)) throw domain_error("p_from_lr: lr must be positive");
  const double nd = static_cast<double>(n);
  const double arg = 2.0 * nd * lr * lr / kPi;
  if (!(arg > 1.0))
    throw domain_error("p_from_lr: requires 2 n lr^2 / pi > 1");
  return 1.0 / std::sqrt(nd * lr * lr * std::log(arg));
}

struct LrPValueUnderH1 {
  double r;   // P(LR <= observed | p uniform)
  double ell; // the LR corresponding to that tail probability
  bool within_proven_regime; // the approximation is proven for r <= 0.05
};

// p-value of the likelihood ratio under the uniform hypothesis: every k is
// equally likely there, so r = (|v| sqrt(n) + 1)/(n + 1) exactly. ell is the
// leading-order LR at the u implied by r; equivalently
// sqrt(pi/2n) exp(n r^2/2 - r(1-r) + (1-r)^2/(2n)).
inline LrPValueUnderH1 lr_pvalue_under_h1(std::int64_t n, double v) {
  if (n < 1) throw domain_error("lr_pvalue_under_h1: n must be positive");
  const double nd = static_cast<double>(n);
  const double av = std::fabs(v);
  if (!(av <= std::sqrt(nd)))
    throw domain_error("lr_pvalue_under_h1: requires |v| <= sqrt(n)");
  const double r = std::min(1.0, (av * std::sqrt(nd) + 1.0) / (nd + 1.0));
  const double expo =
      0.5 * nd * r * r - r * (1.0 - r) + (1.0 - r) * (1.0 - r) / (2.0 * nd);
  const double ell = std::sqrt(kPi / (2.0 * nd)) * std::exp(expo);
  return LrPValueUnderH1{r, ell, r <= 0.05};
}

} // namespace evscale
